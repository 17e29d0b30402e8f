// Copyright 2026 The qbc-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

namespace qbc {

// Tolerances shared by every module. Tests calibrate against these.
struct NumericPolicy {
    double equality = 1e-8;       // state/unitary equality, concealing gap
    double positivity = 1e-9;     // eigenvalue floor, hermiticity, trace
    double normalization = 1e-6;  // accepted |norm - 1| on input states
    double degeneracy = 1e-10;    // Schmidt coefficients considered equal
    double rank_cutoff = 1e-12;   // singular values treated as zero
    std::size_t max_dim = 16;
};

inline constexpr NumericPolicy kPolicy{};

}  // namespace qbc
