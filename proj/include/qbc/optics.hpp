// Copyright 2026 The qbc-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Far-field (Fraunhofer) screen model. Positions are dimensionless, in units
// of lambda * D / a, so the single-slit envelope is sinc^2(pi x) with its first
// zero at x = 1 and the two-slit fringes have period a / d.

#include <boost/math/special_functions/cos_pi.hpp>
#include <boost/math/special_functions/sin_pi.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "qbc/error.hpp"
#include "qbc/random.hpp"

namespace qbc::optics {

struct SlitGeometry {
    double slit_width = 1.0e-6;       // a
    double slit_separation = 1.0e-5;  // d
    double wavelength = 1.0e-9;       // lambda
    double screen_distance = 1.0;     // D
    double screen_halfwidth = 2.0;    // W, in units of lambda D / a
    std::size_t grid_nodes = 4001;

    double separation_ratio() const { return slit_separation / slit_width; }
    /// Fringe period in screen units.
    double fringe_period() const { return slit_width / slit_separation; }

    void validate() const {
        auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
        if (!positive(slit_width) || !positive(slit_separation) || !positive(wavelength) ||
            !positive(screen_distance)) {
            throw Error(Errc::BadGeometry, "lengths must be positive");
        }
        if (!(slit_separation > slit_width)) {
            throw Error(Errc::BadGeometry, "slit separation must exceed slit width");
        }
        if (!std::isfinite(screen_halfwidth) || screen_halfwidth < 1.0) {
            throw Error(Errc::BadGeometry, "screen half-width must be >= 1");
        }
        if (grid_nodes < 3) throw Error(Errc::BadGeometry, "grid needs at least 3 nodes");
    }

    friend bool operator==(const SlitGeometry&, const SlitGeometry&) = default;
};

/// sin(pi x) / (pi x); exactly zero at nonzero integers.
inline double sinc_pi(double x) {
    if (x == 0.0) return 1.0;
    return boost::math::sin_pi(x) / (std::numbers::pi * x);
}

/// Unnormalized single-slit intensity.
inline double envelope_intensity(double x) {
    const double s = sinc_pi(x);
    return s * s;
}

/// Unnormalized two-slit intensity for slit separation ratio d / a.
inline double doubleslit_intensity(double x, double separation_ratio) {
    const double c = boost::math::cos_pi(separation_ratio * x);
    return c * c * envelope_intensity(x);
}

/// Tabulated density on an ascending grid with its trapezoidal CDF.
class ScreenPdf {
public:
    /// Normalizes `density` so its trapezoidal integral over `grid` is 1.
    ScreenPdf(std::vector<double> grid, std::vector<double> density)
        : grid_(std::move(grid)), density_(std::move(density)) {
        if (grid_.size() < 2 || grid_.size() != density_.size()) {
            throw Error(Errc::BadPdf, "grid and density must have equal length >= 2");
        }
        for (std::size_t i = 0; i < grid_.size(); ++i) {
            if (!std::isfinite(grid_[i]) || !std::isfinite(density_[i]) || density_[i] < 0.0) {
                throw Error(Errc::BadPdf, "non-finite or negative entry");
            }
            if (i > 0 && !(grid_[i] > grid_[i - 1])) {
                throw Error(Errc::BadPdf, "grid must be strictly ascending");
            }
        }
        cdf_.assign(grid_.size(), 0.0);
        for (std::size_t i = 1; i < grid_.size(); ++i) {
            cdf_[i] = cdf_[i - 1] + 0.5 * (density_[i] + density_[i - 1]) * (grid_[i] - grid_[i - 1]);
        }
        const double total = cdf_.back();
        if (!(total > 0.0)) throw Error(Errc::BadPdf, "density has zero mass");
        normalization_ = total;
        for (auto& d : density_) d /= total;
        for (auto& c : cdf_) c /= total;
        cdf_.back() = 1.0;
    }

    const std::vector<double>& grid() const { return grid_; }
    const std::vector<double>& density() const { return density_; }
    const std::vector<double>& cdf() const { return cdf_; }
    /// Trapezoidal mass of the unnormalized input; divides analytic intensities.
    double normalization() const { return normalization_; }
    double lower() const { return grid_.front(); }
    double upper() const { return grid_.back(); }

    /// Piecewise-linear CDF, clamped outside the grid.
    double cdf_at(double x) const {
        if (x <= grid_.front()) return 0.0;
        if (x >= grid_.back()) return 1.0;
        const auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
        const auto i = static_cast<std::size_t>(it - grid_.begin()) - 1;
        const double t = (x - grid_[i]) / (grid_[i + 1] - grid_[i]);
        return cdf_[i] + t * (cdf_[i + 1] - cdf_[i]);
    }

    /// Mass of [lo, hi] under the tabulated CDF.
    double mass(double lo, double hi) const { return cdf_at(hi) - cdf_at(lo); }

private:
    std::vector<double> grid_;
    std::vector<double> density_;
    std::vector<double> cdf_;
    double normalization_ = 1.0;
};

/// Uniform grid over [-W, W]; node i sits at W (2i - (n-1)) / (n-1) so the
/// grid is exactly symmetric about 0.
inline std::vector<double> screen_grid(const SlitGeometry& geom) {
    const std::size_t n = geom.grid_nodes;
    const double span = static_cast<double>(n - 1);
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i) {
        grid[i] = geom.screen_halfwidth * (2.0 * static_cast<double>(i) - span) / span;
    }
    return grid;
}

inline ScreenPdf envelope_pdf(const SlitGeometry& geom) {
    geom.validate();
    auto grid = screen_grid(geom);
    std::vector<double> density(grid.size());
    std::transform(grid.begin(), grid.end(), density.begin(), envelope_intensity);
    return ScreenPdf(std::move(grid), std::move(density));
}

inline ScreenPdf doubleslit_pdf(const SlitGeometry& geom) {
    geom.validate();
    auto grid = screen_grid(geom);
    const double ratio = geom.separation_ratio();
    std::vector<double> density(grid.size());
    std::transform(grid.begin(), grid.end(), density.begin(),
                   [ratio](double x) { return doubleslit_intensity(x, ratio); });
    return ScreenPdf(std::move(grid), std::move(density));
}

/// Inverse-CDF draw for a given uniform u in [0, 1), interpolating linearly
/// between the two grid nodes that bracket u.
inline double sample_position(const ScreenPdf& pdf, double u) {
    const auto& cdf = pdf.cdf();
    const auto& grid = pdf.grid();
    if (u <= 0.0) return grid.front();
    if (u >= 1.0) return grid.back();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const auto i = static_cast<std::size_t>(it - cdf.begin()) - 1;
    const double t = (u - cdf[i]) / (cdf[i + 1] - cdf[i]);
    return grid[i] + t * (grid[i + 1] - grid[i]);
}

inline double sample_position(const ScreenPdf& pdf, Rng& rng) {
    return sample_position(pdf, rng.uniform());
}

}  // namespace qbc::optics
