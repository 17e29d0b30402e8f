// Copyright 2026 The qbc-sim Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails. All randomness derives from kMaster.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../oracles.hpp"
#include "qbc/qbc.hpp"

namespace {

using namespace qbc;
using protocol::CommitBit;
using protocol::Strategy;

constexpr std::uint64_t kMaster = 20261016;

struct Outcome {
    bool passed = false;
    std::string detail;
};

std::uint64_t seed_for(std::uint64_t criterion, std::uint64_t tag = 0) {
    return derive_seed(kMaster, {criterion, tag});
}

oracle::CMatrix to_oracle(const quantum::Matrix& m) {
    oracle::CMatrix out(static_cast<std::size_t>(m.rows()), std::vector<oracle::Complex>(static_cast<std::size_t>(m.cols())));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) out[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = m(r, c);
    }
    return out;
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// 1. Decay deadline.
Outcome decay_deadline() {
    const auto s = decay::neutron();
    const double p10 = decay::survival_prob(s, 10.0 * s.half_life);
    const bool analytic = std::abs(p10 - std::ldexp(1.0, -10)) <= 1e-12;

    protocol::CommitConfig c;
    c.n_detections = 100000;
    c.seed = seed_for(1);
    const protocol::ScreenModel model(c.geometry);
    const auto run = protocol::run_protocol(c, Strategy::store_and_delay(CommitBit::Zero), model, {});
    const double n = static_cast<double>(run.unveil.genuine + run.unveil.fabricated);
    const double expected = n * p10;
    const double sigma = std::sqrt(n * p10 * (1.0 - p10));
    const double usable = static_cast<double>(run.unveil.genuine);
    const bool within = std::abs(usable - expected) <= 3.0 * sigma;

    std::ostringstream d;
    d << "survival(10 half-lives)=" << fmt("%.12g", p10) << " usable=" << run.unveil.genuine << "/"
      << static_cast<long long>(n) << " expected=" << fmt("%.1f", expected) << "+-" << fmt("%.1f", 3 * sigma)
      << " half-lives " << s.half_life << "s/" << decay::muon().half_life << "s";
    return {analytic && within && s.half_life == 608.9 && decay::muon().half_life == 1.523e-6, d.str()};
}

// 2. Helstrom routing.
Outcome helstrom_routing() {
    const auto single = quantum::DensityMatrix::maximally_mixed(2);
    const auto both = quantum::dm_from_state(quantum::double_slit_state());
    const double target = quantum::helstrom_success(both, 1.0 / 3.0, single, 2.0 / 3.0);

    protocol::CommitConfig c;
    c.n_detections = 100000;
    c.seed = seed_for(2);
    const protocol::ScreenModel model(c.geometry);
    protocol::RunStreams streams(c.seed);
    const auto t = protocol::run_commit(c, Strategy::helstrom_router(CommitBit::Zero), model, streams);
    std::size_t correct = 0;
    std::size_t events = 0;
    for (const auto& trial : t.trials) {
        if (!trial.detected) continue;
        ++events;
        const bool guessed = std::get<protocol::Routed>(trial.alice_record).guessed_double;
        correct += guessed == (trial.setting == protocol::SlitSetting::BothOpen);
    }
    const double acc = static_cast<double>(correct) / static_cast<double>(events);
    const double sigma = std::sqrt(target * (1.0 - target) / static_cast<double>(events));
    const bool converges = std::abs(acc - target) <= 3.0 * sigma && std::abs(target - 2.0 / 3.0) < 1e-12;

    Rng rng(seed_for(2, 1));
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const auto dim = static_cast<Eigen::Index>(2 + i % 3);
        auto random_dm = [&] {
            const quantum::Matrix a = nogo::random_unitary(rng, dim) *
                                      quantum::Vector::NullaryExpr(dim, [&] { return quantum::Complex(rng.uniform(), 0); })
                                          .asDiagonal();
            const quantum::Matrix r = a * a.adjoint();
            return quantum::DensityMatrix(r / r.trace().real());
        };
        const auto r0 = random_dm();
        const auto r1 = random_dm();
        const double p0 = 0.05 + 0.9 * rng.uniform();
        const double lib = quantum::helstrom_success(r0, p0, r1, 1.0 - p0);
        const double ref =
            0.5 * (1.0 + oracle::trace_norm(to_oracle((1.0 - p0) * r1.entries() - p0 * r0.entries())));
        worst = std::max(worst, std::abs(lib - ref));
    }
    std::ostringstream d;
    d << "accuracy=" << fmt("%.5f", acc) << " target=" << fmt("%.5f", target) << "+-" << fmt("%.5f", 3 * sigma)
      << " over " << events << " events; max |helstrom - oracle|=" << fmt("%.2e", worst) << " on 1000 pairs";
    return {converges && worst < 1e-9, d.str()};
}

// 3. Honest completeness.
Outcome honest_completeness() {
    protocol::CommitConfig c;
    c.n_detections = 1200;
    c.seed = seed_for(3);
    const protocol::ScreenModel model(c.geometry);
    const auto p0 = protocol::attack_sweep(c, Strategy::honest(CommitBit::Zero), 100, model, {}, 1);
    const auto p1 = protocol::attack_sweep(c, Strategy::honest(CommitBit::One), 100, model, {}, 1);
    std::ostringstream d;
    d << "b=0 accepted " << p0.acceptances << "/100, b=1 accepted " << p1.acceptances << "/100 (need >= 99)";
    return {p0.acceptances >= 99 && p1.acceptances >= 99, d.str()};
}

// 4. Binding against which-slit guessing.
Outcome binding_guess() {
    protocol::CommitConfig c;
    c.n_detections = 200;
    c.seed = seed_for(4);
    const protocol::ScreenModel model(c.geometry);
    const auto p = protocol::attack_sweep(c, Strategy::guess_which_slit(), 3000, model, {}, 1);
    const double bound = protocol::cheat_acceptance_bound(200, 0.02);
    const int m = 133;
    const int allowed = static_cast<int>(protocol::allowed_errors(m, 0.02));
    const oracle::Big exact = oracle::binomial_tail(m, m - allowed, oracle::Big(0.5));
    const double exact_d = exact.convert_to<double>();
    const bool agree = std::abs(bound - exact_d) <= 1e-9 * exact_d;
    std::ostringstream d;
    d << "acceptances=" << p.acceptances << "/3000 upper95=" << fmt("%.4e", p.ci.high)
      << " bound(m=133)=" << fmt("%.4e", bound) << " exact=" << fmt("%.4e", exact_d);
    return {p.acceptances == 0 && p.ci.high < 1.3e-3 && bound < 1e-25 && exact_d < 1e-25 && agree, d.str()};
}

// 5. Binding against forged interference.
Outcome binding_forge() {
    protocol::CommitConfig base;
    base.n_detections = 600;
    base.seed = seed_for(5);
    const protocol::ScreenModel model(base.geometry);
    std::size_t accepted = 0;
    std::vector<double> fringe_p;
    for (std::size_t rep = 0; rep < 3000; ++rep) {
        protocol::CommitConfig c = base;
        c.seed = protocol::repetition_seed(base.seed, base.n_detections, rep);
        const auto run = protocol::run_protocol(c, Strategy::forge_positions(), model, {});
        accepted += run.report.accepted;
        for (const auto& t : run.report.tests) {
            if (t.name == "fringe_fit") fringe_p.push_back(t.value);
        }
    }
    std::nth_element(fringe_p.begin(), fringe_p.begin() + static_cast<std::ptrdiff_t>(fringe_p.size() / 2),
                     fringe_p.end());
    const double median = fringe_p[fringe_p.size() / 2];
    const auto ci = stats::clopper_pearson(accepted, 3000);
    std::ostringstream d;
    d << "acceptances=" << accepted << "/3000 upper95=" << fmt("%.4e", ci.high)
      << " median fringe p=" << fmt("%.3e", median);
    return {accepted == 0 && median < 1e-9, d.str()};
}

// 6. Concealing.
Outcome concealing() {
    const std::set<std::string> allowed{"type", "index", "detected", "announce_time"};
    bool schema = true;
    for (auto bit : {CommitBit::Zero, CommitBit::One}) {
        protocol::CommitConfig c;
        c.n_detections = 200;
        c.seed = seed_for(6, 99);
        const protocol::ScreenModel model(c.geometry);
        protocol::RunStreams streams(c.seed);
        std::stringstream ss;
        io::write_public(ss, protocol::run_commit(c, Strategy::honest(bit), model, streams));
        std::string line;
        std::getline(ss, line);
        const auto header = Json::parse(line);
        schema = schema && !header.contains("strategy") && !header.at("config").contains("bit");
        while (std::getline(ss, line)) {
            const auto record = Json::parse(line);
            for (const auto& [key, value] : record.items()) schema = schema && allowed.count(key) > 0;
        }
    }

    protocol::CommitConfig c;
    const protocol::ScreenModel model(c.geometry);
    int passes = 0;
    for (std::uint64_t pair = 0; pair < 100; ++pair) {
        std::vector<double> counts[2];
        for (int bit = 0; bit < 2; ++bit) {
            for (std::uint64_t run = 0; run < 200; ++run) {
                c.seed = derive_seed(seed_for(6), {pair, static_cast<std::uint64_t>(bit), run});
                protocol::RunStreams streams(c.seed);
                const auto t = protocol::run_commit(c, Strategy::honest(protocol::bit_from_int(bit)), model, streams);
                counts[bit].push_back(static_cast<double>(t.trials.size()));
            }
        }
        passes += stats::rank_sum_test(counts[0], counts[1]).p_value >= 0.01;
    }
    std::ostringstream d;
    d << "public schema " << (schema ? "clean" : "LEAKS") << "; rank test passed in " << passes
      << "/100 pairs (need >= 98)";
    return {schema && passes >= 98, d.str()};
}

// 7. No-go demonstration.
Outcome nogo_demo() {
    Rng rng(seed_for(7));
    const quantum::BipartiteDims shapes[] = {{2, 2}, {2, 3}, {3, 2}, {3, 3}, {2, 4}, {4, 2}, {3, 4}, {4, 4}};
    int found = 0;
    int impossible = 0;
    double worst = 0.0;
    for (int i = 0; i < 500; ++i) {
        const auto result = nogo::mount_attack(nogo::random_concealing_pair(rng, shapes[i % 8]));
        if (const auto* ok = std::get_if<nogo::AttackSuccess>(&result)) {
            worst = std::max(worst, ok->residual);
            found += ok->residual < 1e-8;
        }
    }
    for (int i = 0; i < 500; ++i) {
        const auto tc = nogo::random_perturbed_pair(rng, shapes[i % 8], 0.05, 1e-3);
        impossible += nogo::concealing_gap(tc) > 1e-3 && std::holds_alternative<nogo::ImpossibleAttack>(nogo::mount_attack(tc));
    }
    std::ostringstream d;
    d << "unitary found " << found << "/500 (max residual " << fmt("%.2e", worst) << "), impossible " << impossible
      << "/500";
    return {found == 500 && impossible == 500, d.str()};
}

// 8. Optics fidelity.
Outcome optics_fidelity() {
    const optics::SlitGeometry g;
    const auto env = optics::envelope_pdf(g);
    const auto ds = optics::doubleslit_pdf(g);
    const double ratio = g.separation_ratio();
    const double w = g.screen_halfwidth;
    const double env_mass =
        oracle::simpson([&](double x) { return oracle::sinc2(x) / env.normalization(); }, -w, w, 400000);
    const double ds_mass = oracle::simpson(
        [&](double x) {
            const double c = std::cos(M_PI * ratio * x);
            return c * c * oracle::sinc2(x) / ds.normalization();
        },
        -w, w, 400000);
    const bool integrals = std::abs(env_mass - 1.0) <= 1e-6 && std::abs(ds_mass - 1.0) <= 1e-6;

    const auto bins = stats::equal_width_binning(-w, w, 80);
    int self_pass[2] = {0, 0};
    const optics::ScreenPdf* pdfs[2] = {&env, &ds};
    for (int which = 0; which < 2; ++which) {
        for (std::uint64_t s = 0; s < 50; ++s) {
            Rng rng(derive_seed(seed_for(8), {static_cast<std::uint64_t>(which), s}));
            std::vector<double> xs(100000);
            for (auto& x : xs) x = optics::sample_position(*pdfs[which], rng);
            self_pass[which] += stats::chi_square_gof(xs, *pdfs[which], bins).p_value >= 0.01;
        }
    }

    Rng rng(seed_for(8, 99));
    std::vector<double> xs(10000);
    for (auto& x : xs) x = optics::sample_position(env, rng);
    const auto binning = protocol::verification_binning(g, xs.size(), protocol::Thresholds{});
    const double reject_p = stats::chi_square_gof(xs, ds, binning).p_value;

    std::ostringstream d;
    d << "mass env=" << fmt("%.9f", env_mass) << " ds=" << fmt("%.9f", ds_mass) << "; self chi-square pass env "
      << self_pass[0] << "/50 ds " << self_pass[1] << "/50; envelope vs fringed p=" << fmt("%.3e", reject_p);
    return {integrals && self_pass[0] >= 49 && self_pass[1] >= 49 && reject_p < 1e-9, d.str()};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "decay deadline", 10, decay_deadline},
        {2, "helstrom routing", 30, helstrom_routing},
        {3, "honest completeness", 120, honest_completeness},
        {4, "binding: which-slit guessing", 300, binding_guess},
        {5, "binding: forged interference", 300, binding_forge},
        {6, "concealing", 0, concealing},
        {7, "no-go demonstration", 30, nogo_demo},
        {8, "optics fidelity", 0, optics_fidelity},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_budget = c.budget_s <= 0 || secs < c.budget_s;
        const bool ok = out.passed && in_budget;
        failures += !ok;
        std::printf("%s criterion %d (%s): %s [%.2fs%s]\n", ok ? "PASS" : "FAIL", c.id, c.name, out.detail.c_str(),
                    secs, in_budget ? "" : " over budget");
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
