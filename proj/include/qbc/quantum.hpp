// Copyright 2026 The qbc-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Dense linear algebra on small Hilbert spaces (dimension <= 16): pure states,
// density operators, partial trace, trace distance, minimum-error
// discrimination and the local-unitary construction relating two
// purifications with equal marginals.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include "qbc/error.hpp"
#include "qbc/numeric_policy.hpp"

namespace qbc::quantum {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Subsystem dimensions of a bipartite space A (x) B. Basis index is a * dB + b.
struct BipartiteDims {
    std::size_t a = 0;
    std::size_t b = 0;
    std::size_t total() const { return a * b; }
    friend bool operator==(const BipartiteDims&, const BipartiteDims&) = default;
};

enum class Subsystem { A, B };

namespace detail {

inline std::size_t product(const std::vector<std::size_t>& dims) {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>{});
}

inline void check_dim(std::size_t n) {
    if (n == 0 || n > kPolicy.max_dim) {
        throw Error(Errc::DimensionMismatch,
                    "Hilbert dimension " + std::to_string(n) + " outside [1, 16]");
    }
}

}  // namespace detail

class PureState {
public:
    /// Takes ownership of `amplitudes`; throws NotNormalized if the norm is off
    /// by more than the input tolerance, then renormalizes to machine precision.
    PureState(Vector amplitudes, std::vector<std::size_t> dims)
        : amplitudes_(std::move(amplitudes)), dims_(std::move(dims)) {
        if (dims_.empty()) dims_.push_back(static_cast<std::size_t>(amplitudes_.size()));
        for (auto d : dims_) {
            if (d < 1) throw Error(Errc::DimensionMismatch, "subsystem dimension < 1");
        }
        if (detail::product(dims_) != static_cast<std::size_t>(amplitudes_.size())) {
            throw Error(Errc::DimensionMismatch, "dims product differs from vector length");
        }
        detail::check_dim(dims_.size() == 0 ? 0 : static_cast<std::size_t>(amplitudes_.size()));
        const double norm = amplitudes_.norm();
        if (!std::isfinite(norm) || std::abs(norm - 1.0) > kPolicy.normalization) {
            throw Error(Errc::NotNormalized, "state norm " + std::to_string(norm));
        }
        amplitudes_ /= norm;
    }

    explicit PureState(Vector amplitudes)
        : PureState(std::move(amplitudes), std::vector<std::size_t>{}) {}

    /// Scales an arbitrary nonzero vector to unit norm.
    static PureState normalized(Vector v, std::vector<std::size_t> dims = {}) {
        const double norm = v.norm();
        if (!(norm > 0.0) || !std::isfinite(norm)) {
            throw Error(Errc::NotNormalized, "zero or non-finite vector");
        }
        v /= norm;
        return PureState(std::move(v), std::move(dims));
    }

    static PureState basis(std::size_t dim, std::size_t index) {
        Vector v = Vector::Zero(static_cast<Eigen::Index>(dim));
        v(static_cast<Eigen::Index>(index)) = 1.0;
        return PureState(std::move(v));
    }

    const Vector& amplitudes() const { return amplitudes_; }
    const std::vector<std::size_t>& dims() const { return dims_; }
    std::size_t dim() const { return static_cast<std::size_t>(amplitudes_.size()); }

    BipartiteDims bipartite() const {
        if (dims_.size() != 2) throw Error(Errc::DimensionMismatch, "state is not bipartite");
        return {dims_[0], dims_[1]};
    }

private:
    Vector amplitudes_;
    std::vector<std::size_t> dims_;
};

/// |a> (x) |b>, with dims concatenated.
inline PureState tensor(const PureState& a, const PureState& b) {
    Vector v(static_cast<Eigen::Index>(a.dim() * b.dim()));
    for (Eigen::Index i = 0; i < a.amplitudes().size(); ++i) {
        v.segment(i * b.amplitudes().size(), b.amplitudes().size()) =
            a.amplitudes()(i) * b.amplitudes();
    }
    std::vector<std::size_t> dims = a.dims();
    dims.insert(dims.end(), b.dims().begin(), b.dims().end());
    return PureState(std::move(v), std::move(dims));
}

/// Eigenvalues (ascending) of a Hermitian matrix.
inline Eigen::VectorXd hermitian_eigenvalues(const Matrix& h) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
inline double trace_norm(const Matrix& h) {
    return hermitian_eigenvalues(h).cwiseAbs().sum();
}

class DensityMatrix {
public:
    /// Validates hermiticity, unit trace and positivity within the policy floor.
    explicit DensityMatrix(Matrix entries) : entries_(std::move(entries)) {
        if (entries_.rows() != entries_.cols()) {
            throw Error(Errc::DimensionMismatch, "density matrix must be square");
        }
        detail::check_dim(static_cast<std::size_t>(entries_.rows()));
        const double tol = kPolicy.positivity;
        if ((entries_ - entries_.adjoint()).cwiseAbs().maxCoeff() > tol) {
            throw Error(Errc::InvalidState, "matrix is not Hermitian");
        }
        const Complex tr = entries_.trace();
        if (std::abs(tr - Complex(1.0, 0.0)) > tol) {
            throw Error(Errc::InvalidState, "trace " + std::to_string(tr.real()) + " != 1");
        }
        // Symmetrize so downstream eigen solvers see an exactly Hermitian input.
        entries_ = (0.5 * (entries_ + entries_.adjoint())).eval();
        if (hermitian_eigenvalues(entries_).minCoeff() < -tol) {
            throw Error(Errc::InvalidState, "matrix has a negative eigenvalue");
        }
    }

    static DensityMatrix maximally_mixed(std::size_t dim) {
        const auto n = static_cast<Eigen::Index>(dim);
        return DensityMatrix(Matrix::Identity(n, n) / static_cast<double>(dim));
    }

    const Matrix& entries() const { return entries_; }
    std::size_t dim() const { return static_cast<std::size_t>(entries_.rows()); }
    Complex operator()(Eigen::Index r, Eigen::Index c) const { return entries_(r, c); }

private:
    Matrix entries_;
};

inline DensityMatrix dm_from_state(const PureState& psi) {
    const Vector& v = psi.amplitudes();
    return DensityMatrix(v * v.adjoint());
}

/// Overload for raw amplitudes: NotNormalized when |norm - 1| > 1e-6.
inline DensityMatrix dm_from_state(const Vector& amplitudes) {
    return dm_from_state(PureState(amplitudes));
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, BipartiteDims dims, Subsystem keep) {
    if (dims.a == 0 || dims.b == 0 || dims.total() != rho.dim()) {
        throw Error(Errc::DimensionMismatch, "dims product differs from density matrix size");
    }
    const auto da = static_cast<Eigen::Index>(dims.a);
    const auto db = static_cast<Eigen::Index>(dims.b);
    const Matrix& m = rho.entries();
    if (keep == Subsystem::B) {
        Matrix out = Matrix::Zero(db, db);
        for (Eigen::Index i = 0; i < da; ++i) out += m.block(i * db, i * db, db, db);
        return DensityMatrix(out);
    }
    Matrix out(da, da);
    for (Eigen::Index i = 0; i < da; ++i) {
        for (Eigen::Index k = 0; k < da; ++k) out(i, k) = m.block(i * db, k * db, db, db).trace();
    }
    return DensityMatrix(out);
}

/// Marginal of a bipartite pure state without forming the full projector.
inline DensityMatrix reduced_state(const PureState& psi, Subsystem keep) {
    return partial_trace(dm_from_state(psi), psi.bipartite(), keep);
}

inline double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim()) {
        throw Error(Errc::DimensionMismatch, "trace_distance of different dimensions");
    }
    return std::clamp(0.5 * trace_norm(rho.entries() - sigma.entries()), 0.0, 1.0);
}

namespace detail {

inline void check_priors(double p0, double p1) {
    if (!(p0 >= 0.0) || !(p1 >= 0.0) || std::abs(p0 + p1 - 1.0) > 1e-12) {
        throw Error(Errc::BadPriors, "priors must be nonnegative and sum to 1");
    }
}

}  // namespace detail

/// Optimal probability of identifying which of rho0 (prior p0) or rho1
/// (prior p1) was prepared: (1 + ||p1 rho1 - p0 rho0||_1) / 2.
inline double helstrom_success(const DensityMatrix& rho0, double p0,
                               const DensityMatrix& rho1, double p1) {
    detail::check_priors(p0, p1);
    if (rho0.dim() != rho1.dim()) {
        throw Error(Errc::DimensionMismatch, "helstrom_success of different dimensions");
    }
    const double value = 0.5 * (1.0 + trace_norm(p1 * rho1.entries() - p0 * rho0.entries()));
    return std::clamp(value, std::max(p0, p1), 1.0);
}

/// Projector onto the positive eigenspace of p1 rho1 - p0 rho0. Outcome
/// "in range" means guess hypothesis 1; the complement means hypothesis 0.
inline Matrix helstrom_measurement(const DensityMatrix& rho0, double p0,
                                   const DensityMatrix& rho1, double p1) {
    detail::check_priors(p0, p1);
    if (rho0.dim() != rho1.dim()) {
        throw Error(Errc::DimensionMismatch, "helstrom_measurement of different dimensions");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(p1 * rho1.entries() - p0 * rho0.entries());
    const auto n = static_cast<Eigen::Index>(rho0.dim());
    Matrix projector = Matrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        if (solver.eigenvalues()(k) > kPolicy.degeneracy) {
            const Vector& u = solver.eigenvectors().col(k);
            projector += u * u.adjoint();
        }
    }
    return projector;
}

/// Born probability <psi|P|psi> for a projector P.
inline double outcome_probability(const Matrix& projector, const PureState& psi) {
    const Vector& v = psi.amplitudes();
    return std::clamp((v.adjoint() * projector * v)(0, 0).real(), 0.0, 1.0);
}

/// Applies U on A to a bipartite state, leaving B untouched.
inline Vector apply_local(const Matrix& unitary_a, const Vector& psi, BipartiteDims dims) {
    const auto da = static_cast<Eigen::Index>(dims.a);
    const auto db = static_cast<Eigen::Index>(dims.b);
    // psi reshaped as a dA x dB coefficient matrix (row-major in A).
    Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        coeffs(psi.data(), da, db);
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> out =
        unitary_a * coeffs;
    return Eigen::Map<const Vector>(out.data(), da * db);
}

namespace detail {

inline Matrix coefficient_matrix(const PureState& psi, BipartiteDims dims) {
    const auto da = static_cast<Eigen::Index>(dims.a);
    const auto db = static_cast<Eigen::Index>(dims.b);
    Matrix m(da, db);
    for (Eigen::Index i = 0; i < da; ++i) {
        for (Eigen::Index j = 0; j < db; ++j) m(i, j) = psi.amplitudes()(i * db + j);
    }
    return m;
}

// Modified Gram-Schmidt: orthonormalizes `seed` columns in order, then fills
// the remaining columns from the standard basis.
inline Matrix complete_orthonormal_basis(const Matrix& seed, Eigen::Index dim) {
    Matrix basis(dim, dim);
    Eigen::Index filled = 0;
    auto push = [&](Vector v) {
        for (int pass = 0; pass < 2; ++pass) {
            for (Eigen::Index k = 0; k < filled; ++k) {
                v -= basis.col(k).dot(v) * basis.col(k);
            }
        }
        const double n = v.norm();
        if (n > 1e-6 && filled < dim) basis.col(filled++) = v / n;
    };
    for (Eigen::Index c = 0; c < seed.cols(); ++c) push(seed.col(c));
    for (Eigen::Index e = 0; e < dim && filled < dim; ++e) push(Vector::Unit(dim, e));
    return basis;
}

}  // namespace detail

/// Unitary U_A with (U_A (x) I)|psi0> = |psi1>, which exists iff both states
/// have the same marginal on B. Throws ReducedStatesDiffer otherwise.
///
/// Write psi_k as a dA x dB coefficient matrix M_k. Equal B marginals means
/// M0^H M0 = M1^H M1, so with M0 = sum_k s_k u_k v_k^H the vectors
/// f_k = M1 v_k / s_k are orthonormal and U_A = sum_k f_k u_k^H (completed on
/// the orthogonal complement) solves U_A M0 = M1. This covers degenerate
/// Schmidt spectra without special casing: any orthonormal v_k inside a
/// degenerate block is mapped consistently.
inline Matrix find_local_unitary(const PureState& psi0, const PureState& psi1,
                                 BipartiteDims dims) {
    if (psi0.dim() != dims.total() || psi1.dim() != dims.total()) {
        throw Error(Errc::DimensionMismatch, "states do not match bipartite dims");
    }
    const DensityMatrix rho0 = partial_trace(dm_from_state(psi0), dims, Subsystem::B);
    const DensityMatrix rho1 = partial_trace(dm_from_state(psi1), dims, Subsystem::B);
    const double gap = trace_distance(rho0, rho1);
    if (gap >= kPolicy.equality) throw ReducedStatesDiffer(gap);

    const Matrix m0 = detail::coefficient_matrix(psi0, dims);
    const Matrix m1 = detail::coefficient_matrix(psi1, dims);
    Eigen::JacobiSVD<Matrix> svd(m0, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    Eigen::Index rank = 0;
    while (rank < s.size() && s(rank) > kPolicy.rank_cutoff) ++rank;

    const auto da = static_cast<Eigen::Index>(dims.a);
    Matrix source = svd.matrixU().leftCols(rank);
    Matrix target(da, rank);
    for (Eigen::Index k = 0; k < rank; ++k) target.col(k) = m1 * svd.matrixV().col(k) / s(k);

    const Matrix source_basis = detail::complete_orthonormal_basis(source, da);
    const Matrix target_basis = detail::complete_orthonormal_basis(target, da);
    Matrix unitary = target_basis * source_basis.adjoint();

    // Phase convention: the largest-magnitude amplitude of the image takes
    // psi1's argument at that index.
    const Vector image = apply_local(unitary, psi0.amplitudes(), dims);
    Eigen::Index arg_max = 0;
    image.cwiseAbs().maxCoeff(&arg_max);
    const Complex ratio = psi1.amplitudes()(arg_max) / image(arg_max);
    if (std::abs(ratio) > 0.0) unitary *= ratio / std::abs(ratio);
    return unitary;
}

/// Slit basis {|L>, |R>} for a single particle behind the double slit.
enum class Slit { Left = 0, Right = 1 };

inline PureState slit_basis_state(Slit slit) {
    return PureState::basis(2, static_cast<std::size_t>(slit));
}

/// (|L> + |R>) / sqrt(2): both slits open, zero relative phase.
inline PureState double_slit_state() {
    Vector v(2);
    v << 1.0, 1.0;
    return PureState::normalized(v);
}

}  // namespace qbc::quantum
