// Copyright 2026 The qbc-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Toy-scale purification attack: if Bob's marginals for the two commitments
// coincide, Alice holds a unitary on her side alone that turns one commitment
// into the other.

#include <optional>
#include <string>
#include <variant>

#include "qbc/error.hpp"
#include "qbc/quantum.hpp"
#include "qbc/random.hpp"

namespace qbc::nogo {

using quantum::BipartiteDims;
using quantum::Matrix;
using quantum::PureState;
using quantum::Vector;
using quantum::Complex;

struct ToyCommitment {
    PureState psi0;
    PureState psi1;
    std::string label0 = "b=0";
    std::string label1 = "b=1";

    ToyCommitment(PureState s0, PureState s1, std::string l0 = "b=0", std::string l1 = "b=1")
        : psi0(std::move(s0)), psi1(std::move(s1)), label0(std::move(l0)), label1(std::move(l1)) {
        if (psi0.dims().size() != 2 || psi0.dims() != psi1.dims()) {
            throw Error(Errc::DimensionMismatch, "toy commitment needs two bipartite states with equal dims");
        }
    }

    BipartiteDims dims() const { return psi0.bipartite(); }
};

/// Trace distance between Bob's reduced states.
inline double concealing_gap(const ToyCommitment& tc) {
    return quantum::trace_distance(quantum::reduced_state(tc.psi0, quantum::Subsystem::B),
                                   quantum::reduced_state(tc.psi1, quantum::Subsystem::B));
}

struct AttackSuccess {
    Matrix unitary_a;
    double residual = 0.0;  // ||(U_A (x) I) psi0 - psi1||
};

struct ImpossibleAttack {
    double gap = 0.0;
};

using AttackResult = std::variant<AttackSuccess, ImpossibleAttack>;

inline AttackResult mount_attack(const ToyCommitment& tc) {
    try {
        AttackSuccess ok;
        ok.unitary_a = quantum::find_local_unitary(tc.psi0, tc.psi1, tc.dims());
        ok.residual =
            (quantum::apply_local(ok.unitary_a, tc.psi0.amplitudes(), tc.dims()) - tc.psi1.amplitudes()).norm();
        return ok;
    } catch (const ReducedStatesDiffer& e) {
        return ImpossibleAttack{e.distance()};
    }
}

// ---------------------------------------------------------------------------
// Random toy pairs

inline Vector random_vector(Rng& rng, Eigen::Index n) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = {rng.normal(), rng.normal()};
    return v;
}

/// Haar-distributed unitary from the QR decomposition of a complex Ginibre
/// matrix, with the diagonal phase fix.
inline Matrix random_unitary(Rng& rng, Eigen::Index n) {
    Matrix g(n, n);
    for (Eigen::Index c = 0; c < n; ++c) g.col(c) = random_vector(rng, n);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto d = r(i, i);
        if (std::abs(d) > 0.0) q.col(i) *= d / std::abs(d);
    }
    return q;
}

inline PureState random_state(Rng& rng, std::size_t dim, std::vector<std::size_t> dims = {}) {
    return PureState::normalized(random_vector(rng, static_cast<Eigen::Index>(dim)), std::move(dims));
}

/// Pair sharing the same Schmidt spectrum and B-side basis but with
/// independent A-side bases, so Bob's marginals agree exactly.
inline ToyCommitment random_concealing_pair(Rng& rng, BipartiteDims dims) {
    const auto da = static_cast<Eigen::Index>(dims.a);
    const auto db = static_cast<Eigen::Index>(dims.b);
    const Eigen::Index rank = std::min(da, db);
    Eigen::VectorXd spectrum(rank);
    for (Eigen::Index k = 0; k < rank; ++k) spectrum(k) = rng.uniform() + 1e-3;
    spectrum /= spectrum.norm();
    const Matrix vb = random_unitary(rng, db);
    auto build = [&](const Matrix& ua) {
        Vector v = Vector::Zero(da * db);
        for (Eigen::Index k = 0; k < rank; ++k) {
            for (Eigen::Index i = 0; i < da; ++i) {
                v.segment(i * db, db) += spectrum(k) * ua(i, k) * vb.col(k);
            }
        }
        return PureState::normalized(v, {dims.a, dims.b});
    };
    return ToyCommitment(build(random_unitary(rng, da)), build(random_unitary(rng, da)));
}

/// Concealing pair with psi1 pushed off by a random perturbation of size
/// `strength`; redrawn until the gap exceeds `min_gap`.
inline ToyCommitment random_perturbed_pair(Rng& rng, BipartiteDims dims, double strength,
                                           double min_gap) {
    for (;;) {
        ToyCommitment base = random_concealing_pair(rng, dims);
        const auto n = static_cast<Eigen::Index>(dims.total());
        Vector v = base.psi1.amplitudes() + strength * random_vector(rng, n);
        ToyCommitment tc(base.psi0, PureState::normalized(v, {dims.a, dims.b}));
        if (concealing_gap(tc) > min_gap) return tc;
    }
}

// ---------------------------------------------------------------------------
// Named demonstration pairs

inline PureState two_qubit(Complex a00, Complex a01, Complex a10, Complex a11) {
    Vector v(4);
    v << a00, a01, a10, a11;
    return PureState::normalized(v, {2, 2});
}

/// (|00> + |11>)/sqrt2 vs (|10> + |01>)/sqrt2: perfectly concealing.
inline ToyCommitment bell_pair() {
    return {two_qubit(1, 0, 0, 1), two_qubit(0, 1, 1, 0), "bell", "swapped-bell"};
}

/// |00> vs |01>: Bob's marginals are orthogonal.
inline ToyCommitment non_concealing_pair() {
    return {two_qubit(1, 0, 0, 0), two_qubit(0, 1, 0, 0), "|00>", "|01>"};
}

/// |r0>_A (x) |v>_B vs |r1>_A (x) |v>_B with a position-like record r0 and a
/// which-slit-like record r1 on Alice's side (non-orthogonal, not equal up to
/// phase). The B marginal is the same, so a local unitary exists: in this
/// model the binding has to come from something other than state geometry.
inline ToyCommitment protocol_analog_pair() {
    Vector r0(2);
    r0 << 1.0, 1.0;  // interference record
    Vector r1(2);
    r1 << 1.0, 0.0;  // which-slit record
    Vector vb(2);
    vb << std::sqrt(0.3), std::sqrt(0.7);
    const PureState a0 = PureState::normalized(r0);
    const PureState a1 = PureState::normalized(r1);
    const PureState b = PureState::normalized(vb);
    return {quantum::tensor(a0, b), quantum::tensor(a1, b), "position-record", "which-slit-record"};
}

}  // namespace qbc::nogo
