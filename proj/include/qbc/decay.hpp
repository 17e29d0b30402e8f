// Copyright 2026 The qbc-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "qbc/error.hpp"
#include "qbc/random.hpp"

namespace qbc::decay {

struct ParticleSpecies {
    std::string name;
    double half_life = 1.0;  // seconds

    ParticleSpecies() = default;
    ParticleSpecies(std::string n, double t_half) : name(std::move(n)), half_life(t_half) {
        if (!std::isfinite(half_life) || !(half_life > 0.0)) {
            throw Error(Errc::BadSpecies, "half-life must be positive");
        }
    }

    double mean_lifetime() const { return half_life / std::numbers::ln2; }

    friend bool operator==(const ParticleSpecies&, const ParticleSpecies&) = default;
};

inline constexpr double kNeutronHalfLife = 608.9;   // s
inline constexpr double kMuonHalfLife = 1.523e-6;   // s

inline ParticleSpecies neutron() { return {"neutron", kNeutronHalfLife}; }
inline ParticleSpecies muon() { return {"muon", kMuonHalfLife}; }

/// Built-in species by name; "custom" requires an explicit half-life.
inline ParticleSpecies species_by_name(const std::string& name,
                                       std::optional<double> half_life = std::nullopt) {
    if (name == "neutron") return neutron();
    if (name == "muon") return muon();
    if (name == "custom") {
        if (!half_life) throw Error(Errc::BadSpecies, "custom species needs --half-life");
        return {"custom", *half_life};
    }
    throw Error(Errc::BadSpecies, "unknown particle '" + name + "'");
}

struct DeadlinePolicy {
    double multiplier = 10.0;

    DeadlinePolicy() = default;
    explicit DeadlinePolicy(double k) : multiplier(k) {
        if (!std::isfinite(k) || k < 1.0) {
            throw Error(Errc::ConfigInvalid, "deadline multiplier must be >= 1");
        }
    }
};

/// 2^(-t / half_life).
inline double survival_prob(const ParticleSpecies& species, double t) {
    if (!(t >= 0.0)) throw Error(Errc::NegativeTime, "t must be >= 0");
    return std::exp2(-t / species.half_life);
}

/// Inverse transform for a uniform u in [0, 1).
inline double sample_decay_time(const ParticleSpecies& species, double u) {
    return -species.half_life * std::log2(1.0 - u);
}

inline double sample_decay_time(const ParticleSpecies& species, Rng& rng) {
    return sample_decay_time(species, rng.uniform());
}

/// End of the commit phase: last detection plus k half-lives.
inline double commit_deadline(double last_detection, const ParticleSpecies& species,
                              const DeadlinePolicy& policy) {
    if (!(last_detection >= 0.0)) throw Error(Errc::NegativeTime, "last detection must be >= 0");
    return last_detection + policy.multiplier * species.half_life;
}

}  // namespace qbc::decay
