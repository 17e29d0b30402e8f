// Copyright 2026 The qbc-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Goodness-of-fit and tail probabilities backing Bob's checks.

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "qbc/error.hpp"
#include "qbc/optics.hpp"

namespace qbc::stats {

struct GofResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
    std::size_t n_samples = 0;
    std::size_t n_bins = 0;  // effective bins after merging
};

/// Partition of [edges.front(), edges.back()] into elementary cells; each
/// cell belongs to one bin, and a bin may collect several disjoint cells.
struct Binning {
    std::vector<double> edges;
    std::vector<std::size_t> cell_bin;
    std::size_t n_bins = 0;

    std::size_t bin_of(double x) const {
        if (x <= edges.front()) return cell_bin.front();
        if (x >= edges.back()) return cell_bin.back();
        const auto it = std::upper_bound(edges.begin(), edges.end(), x);
        return cell_bin[static_cast<std::size_t>(it - edges.begin()) - 1];
    }
};

inline Binning equal_width_binning(double lo, double hi, std::size_t n_bins) {
    if (n_bins < 2 || !(hi > lo)) throw Error(Errc::BadArgs, "need n_bins >= 2 and hi > lo");
    Binning b;
    b.n_bins = n_bins;
    b.edges.resize(n_bins + 1);
    const double n = static_cast<double>(n_bins);
    for (std::size_t i = 0; i <= n_bins; ++i) {
        const double t = static_cast<double>(i);
        b.edges[i] = (lo * (n - t) + hi * t) / n;
    }
    b.cell_bin.resize(n_bins);
    std::iota(b.cell_bin.begin(), b.cell_bin.end(), std::size_t{0});
    return b;
}

/// Fringe-resolved partition of [-W, W]. Half-period cells are centred on
/// bright fringes (x = k T) and dark fringes (x = (k + 1/2) T); the screen is
/// split into `regions` equal-width regions and each region contributes one
/// bright bin and one dark bin, ordered (region 0 bright, region 0 dark, ...).
inline Binning fringe_binning(double period, double halfwidth, std::size_t regions) {
    if (!(period > 0.0) || !(halfwidth > 0.0) || regions < 1) {
        throw Error(Errc::BadArgs, "fringe binning needs period, halfwidth > 0 and regions >= 1");
    }
    const double half = 0.5 * period;
    const double offset = 0.25 * period;
    Binning b;
    b.n_bins = 2 * regions;
    b.edges.push_back(-halfwidth);
    auto j = static_cast<long long>(std::floor((-halfwidth - offset) / half)) + 1;
    for (;; ++j) {
        const double e = offset + static_cast<double>(j) * half;
        if (e >= halfwidth) break;
        if (e > b.edges.back()) b.edges.push_back(e);
    }
    b.edges.push_back(halfwidth);
    for (std::size_t c = 0; c + 1 < b.edges.size(); ++c) {
        const double centre = 0.5 * (b.edges[c] + b.edges[c + 1]);
        const double phase = centre / period - std::floor(centre / period);
        const bool bright = phase < 0.25 || phase >= 0.75;
        auto r = static_cast<std::size_t>((centre + halfwidth) / (2.0 * halfwidth) *
                                          static_cast<double>(regions));
        r = std::min(r, regions - 1);
        b.cell_bin.push_back(2 * r + (bright ? 0 : 1));
    }
    return b;
}

inline Binning fringe_binning(const optics::SlitGeometry& geom, std::size_t regions) {
    return fringe_binning(geom.fringe_period(), geom.screen_halfwidth, regions);
}

/// Q(dof / 2, x / 2).
inline double chi_square_upper_tail(double x, double dof) {
    if (!(x >= 0.0) || !(dof >= 1.0) || !std::isfinite(dof)) {
        throw Error(Errc::BadArgs, "chi-square tail needs x >= 0 and dof >= 1");
    }
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    return boost::math::gamma_q(0.5 * dof, 0.5 * x);
}

inline constexpr double kMinExpectedPerBin = 5.0;

/// Pearson chi-square of `samples` against `pdf` over `binning`. Bins with
/// expected count below 5 are merged rightward; the last merged group is
/// absorbed by its left neighbour.
inline GofResult chi_square_gof(std::span<const double> samples, const optics::ScreenPdf& pdf,
                                const Binning& binning, std::size_t min_samples = 30) {
    if (samples.size() < min_samples) {
        throw Error(Errc::TooFewSamples, std::to_string(samples.size()) + " samples < " +
                                             std::to_string(min_samples));
    }
    const auto n = static_cast<double>(samples.size());
    std::vector<double> expected(binning.n_bins, 0.0);
    for (std::size_t c = 0; c < binning.cell_bin.size(); ++c) {
        expected[binning.cell_bin[c]] += n * pdf.mass(binning.edges[c], binning.edges[c + 1]);
    }
    std::vector<double> observed(binning.n_bins, 0.0);
    for (double x : samples) observed[binning.bin_of(x)] += 1.0;

    std::vector<double> merged_exp;
    std::vector<double> merged_obs;
    double acc_exp = 0.0;
    double acc_obs = 0.0;
    for (std::size_t i = 0; i < binning.n_bins; ++i) {
        acc_exp += expected[i];
        acc_obs += observed[i];
        if (acc_exp >= kMinExpectedPerBin) {
            merged_exp.push_back(acc_exp);
            merged_obs.push_back(acc_obs);
            acc_exp = acc_obs = 0.0;
        }
    }
    if (acc_exp > 0.0 || acc_obs > 0.0) {
        if (merged_exp.empty()) {
            merged_exp.push_back(acc_exp);
            merged_obs.push_back(acc_obs);
        } else {
            merged_exp.back() += acc_exp;
            merged_obs.back() += acc_obs;
        }
    }

    GofResult r;
    r.n_samples = samples.size();
    r.n_bins = merged_exp.size();
    if (r.n_bins < 2) return r;
    for (std::size_t i = 0; i < merged_exp.size(); ++i) {
        if (merged_exp[i] > 0.0) {
            const double diff = merged_obs[i] - merged_exp[i];
            r.statistic += diff * diff / merged_exp[i];
        } else if (merged_obs[i] > 0.0) {
            r.statistic = std::numeric_limits<double>::infinity();
        }
    }
    r.dof = static_cast<int>(r.n_bins) - 1;
    r.p_value = chi_square_upper_tail(r.statistic, r.dof);
    return r;
}

/// Equal-width bins over the pdf's support.
inline GofResult chi_square_gof(std::span<const double> samples, const optics::ScreenPdf& pdf,
                                std::size_t n_bins, std::size_t min_samples = 30) {
    return chi_square_gof(samples, pdf, equal_width_binning(pdf.lower(), pdf.upper(), n_bins),
                          min_samples);
}

namespace detail {

inline void check_binomial(long long m, long long k, double p) {
    if (m < 0 || k < 0 || k > m || !(p >= 0.0 && p <= 1.0)) {
        throw Error(Errc::BadArgs, "binomial needs 0 <= k <= m and p in [0, 1]");
    }
}

inline double log_binomial_term(long long m, long long i, double p) {
    const auto md = static_cast<double>(m);
    const auto id = static_cast<double>(i);
    return std::lgamma(md + 1.0) - std::lgamma(id + 1.0) - std::lgamma(md - id + 1.0) +
           id * std::log(p) + (md - id) * std::log1p(-p);
}

// log-sum-exp of the pmf over [lo, hi].
inline double binomial_mass(long long m, long long lo, long long hi, double p) {
    if (lo > hi) return 0.0;
    if (p == 0.0) return lo == 0 ? 1.0 : 0.0;
    if (p == 1.0) return hi == m ? 1.0 : 0.0;
    std::vector<double> logs;
    logs.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (long long i = lo; i <= hi; ++i) logs.push_back(log_binomial_term(m, i, p));
    const double peak = *std::max_element(logs.begin(), logs.end());
    double sum = 0.0;
    for (double l : logs) sum += std::exp(l - peak);
    return std::min(1.0, std::exp(peak) * sum);
}

}  // namespace detail

/// P[Bin(m, p) >= k].
inline double binomial_tail(long long m, long long k, double p) {
    detail::check_binomial(m, k, p);
    if (k == 0) return 1.0;
    return detail::binomial_mass(m, k, m, p);
}

/// P[Bin(m, p) < k].
inline double binomial_lower(long long m, long long k, double p) {
    detail::check_binomial(m, k, p);
    if (k == 0) return 0.0;
    return detail::binomial_mass(m, 0, k - 1, p);
}

struct Interval {
    double low = 0.0;
    double high = 1.0;
};

/// Two-sided Clopper-Pearson interval for `successes` out of `trials`.
inline Interval clopper_pearson(std::size_t successes, std::size_t trials,
                                double confidence = 0.95) {
    if (trials == 0 || successes > trials || !(confidence > 0.0 && confidence < 1.0)) {
        throw Error(Errc::BadArgs, "clopper_pearson needs 0 <= successes <= trials, trials >= 1");
    }
    const double alpha = 1.0 - confidence;
    const auto x = static_cast<double>(successes);
    const auto n = static_cast<double>(trials);
    Interval ci;
    ci.low = successes == 0 ? 0.0 : boost::math::ibeta_inv(x, n - x + 1.0, 0.5 * alpha);
    ci.high = successes == trials ? 1.0 : boost::math::ibeta_inv(x + 1.0, n - x, 1.0 - 0.5 * alpha);
    return ci;
}

struct RankSumResult {
    double u = 0.0;
    double z = 0.0;
    double p_value = 1.0;
};

/// Two-sided Mann-Whitney U test, normal approximation with tie correction.
inline RankSumResult rank_sum_test(std::span<const double> xs, std::span<const double> ys) {
    if (xs.empty() || ys.empty()) throw Error(Errc::BadArgs, "rank_sum_test needs two samples");
    struct Item {
        double value;
        bool first;
    };
    std::vector<Item> all;
    all.reserve(xs.size() + ys.size());
    for (double x : xs) all.push_back({x, true});
    for (double y : ys) all.push_back({y, false});
    std::sort(all.begin(), all.end(), [](const Item& a, const Item& b) { return a.value < b.value; });

    const auto n1 = static_cast<double>(xs.size());
    const auto n2 = static_cast<double>(ys.size());
    const double n = n1 + n2;
    double rank_sum = 0.0;
    double tie_term = 0.0;
    for (std::size_t i = 0; i < all.size();) {
        std::size_t j = i;
        while (j < all.size() && all[j].value == all[i].value) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) {
            if (all[k].first) rank_sum += avg_rank;
        }
        const auto t = static_cast<double>(j - i);
        tie_term += t * t * t - t;
        i = j;
    }
    RankSumResult r;
    r.u = rank_sum - n1 * (n1 + 1.0) / 2.0;
    const double mean = n1 * n2 / 2.0;
    const double var = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if (!(var > 0.0)) return r;
    r.z = (r.u - mean) / std::sqrt(var);
    r.p_value = std::erfc(std::abs(r.z) / std::sqrt(2.0));
    return r;
}

/// Kolmogorov-Smirnov distance between the empirical CDF of `values` and U(0, 1).
inline double ks_distance_uniform(std::vector<double> values) {
    if (values.empty()) throw Error(Errc::BadArgs, "ks_distance_uniform needs data");
    std::sort(values.begin(), values.end());
    const auto n = static_cast<double>(values.size());
    double d = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double v = std::clamp(values[i], 0.0, 1.0);
        d = std::max({d, static_cast<double>(i + 1) / n - v, v - static_cast<double>(i) / n});
    }
    return d;
}

}  // namespace qbc::stats
