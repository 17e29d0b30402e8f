// Copyright 2026 The qbc-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <initializer_list>
#include <cmath>
#include <random>

namespace qbc {

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed splitting: derive_seed(master, {a, b, ...}) folds each tag into the
/// running state with mix64. Every stream in a run comes from the master seed
/// this way, so (master, run index, stream tag) fully determines the draws.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> tags) noexcept {
    std::uint64_t s = mix64(master);
    for (std::uint64_t t : tags) s = mix64(s ^ mix64(t + 0x632be59bd9b4e019ULL));
    return s;
}

namespace stream {
inline constexpr std::uint64_t kBob = 1;     // settings and emission times
inline constexpr std::uint64_t kAlice = 2;   // measurement outcomes, fabrication
inline constexpr std::uint64_t kDecay = 3;   // decay times of held particles
}  // namespace stream

/// Seeded generator with a platform-independent uniform double.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1) from the top 53 bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n); n must be a power of two up to 2^32.
    std::uint32_t uniform_pow2(std::uint32_t n) {
        return static_cast<std::uint32_t>(engine_() >> 32) & (n - 1);
    }

    bool bernoulli(double p) { return uniform() < p; }

    /// Standard normal via Box-Muller (one value per call).
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793 * u2);
    }

    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace qbc
