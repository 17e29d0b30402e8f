// Copyright 2026 The qbc-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "oracles.hpp"
#include "qbc/protocol.hpp"

namespace {

using namespace qbc;
using namespace qbc::protocol;

const ScreenModel& model() {
    static const ScreenModel m{optics::SlitGeometry{}};
    return m;
}

CommitConfig config_with(std::size_t n, std::uint64_t seed) {
    CommitConfig c;
    c.n_detections = n;
    c.seed = seed;
    return c;
}

TEST(DrawSetting, UniformOverFourSettings) {
    Rng rng(1);
    std::map<SlitSetting, int> counts;
    const int n = 100000;
    for (int i = 0; i < n; ++i) ++counts[draw_setting(rng)];
    const double sigma = std::sqrt(0.25 * 0.75 * n);
    ASSERT_EQ(counts.size(), 4u);
    for (const auto& [setting, count] : counts) EXPECT_NEAR(count, 0.25 * n, 3.0 * sigma) << to_string(setting);
}

TEST(DrawSetting, Reproducible) {
    Rng a(42);
    Rng b(42);
    for (int i = 0; i < 1000; ++i) ASSERT_EQ(draw_setting(a), draw_setting(b));
}

TrialRecord trial(SlitSetting s, const Strategy& strat, Rng& alice, Rng& decay) {
    return run_trial(model(), decay::neutron(), s, strat, {alice, decay}, 0, 1.0, 0.0);
}

TEST(RunTrial, SingleSlitWhichSlitIsDeterministic) {
    Rng alice(2);
    Rng decay(3);
    for (int i = 0; i < 1000; ++i) {
        const auto rec = trial(SlitSetting::LeftShut, Strategy::honest(CommitBit::One), alice, decay);
        ASSERT_TRUE(rec.detected);
        ASSERT_EQ(std::get<WhichSlit>(rec.alice_record).slit, Slit::Right);
        const auto rec2 = trial(SlitSetting::RightShut, Strategy::honest(CommitBit::One), alice, decay);
        ASSERT_EQ(std::get<WhichSlit>(rec2.alice_record).slit, Slit::Left);
    }
}

TEST(RunTrial, BothShutIsNeverDetected) {
    Rng alice(2);
    Rng decay(3);
    for (auto s : {Strategy::honest(CommitBit::Zero), Strategy::honest(CommitBit::One), Strategy::forge_positions(),
                   Strategy::guess_which_slit(), Strategy::store_and_delay(CommitBit::Zero),
                   Strategy::helstrom_router(CommitBit::One)}) {
        const auto rec = trial(SlitSetting::BothShut, s, alice, decay);
        EXPECT_FALSE(rec.detected);
        EXPECT_TRUE(std::holds_alternative<NoRecord>(rec.alice_record));
    }
}

TEST(RunTrial, BothOpenPositionsFollowFringedPattern) {
    Rng alice(5);
    Rng decay(6);
    std::vector<double> xs;
    for (int i = 0; i < 10000; ++i) {
        xs.push_back(std::get<Position>(trial(SlitSetting::BothOpen, Strategy::honest(CommitBit::Zero), alice, decay)
                                            .alice_record)
                         .x);
    }
    EXPECT_GE(stats::chi_square_gof(xs, model().doubleslit(), 80).p_value, 0.01);
    EXPECT_GE(stats::chi_square_gof(xs, model().doubleslit(), stats::fringe_binning(model().geometry(), 8)).p_value,
              0.01);
}

TEST(RunTrial, BothOpenWhichSlitIsBalanced) {
    Rng alice(8);
    Rng decay(9);
    int left = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        left += std::get<WhichSlit>(trial(SlitSetting::BothOpen, Strategy::honest(CommitBit::One), alice, decay)
                                        .alice_record)
                    .slit == Slit::Left;
    }
    EXPECT_NEAR(left, n / 2, 3.0 * std::sqrt(n / 4.0));
}

TEST(RunTrial, HelstromRouterAccuracy) {
    Rng bob(10);
    Rng alice(11);
    Rng decay(12);
    const double target = quantum::helstrom_success(quantum::dm_from_state(quantum::double_slit_state()), 1.0 / 3.0,
                                                    quantum::DensityMatrix::maximally_mixed(2), 2.0 / 3.0);
    int correct = 0;
    int detections = 0;
    while (detections < 30000) {
        const auto s = draw_setting(bob);
        const auto rec = trial(s, Strategy::helstrom_router(CommitBit::Zero), alice, decay);
        if (!rec.detected) continue;
        ++detections;
        correct += std::get<Routed>(rec.alice_record).guessed_double == (s == SlitSetting::BothOpen);
    }
    const double sigma = std::sqrt(target * (1 - target) / detections);
    EXPECT_NEAR(static_cast<double>(correct) / detections, target, 3.0 * sigma);
}

TEST(RunCommit, DetectsExactlyN) {
    const auto tr = run_commit(config_with(100, 3), Strategy::honest(CommitBit::Zero), model());
    EXPECT_EQ(tr.n_detected, 100u);
    EXPECT_EQ(std::count_if(tr.trials.begin(), tr.trials.end(), [](const auto& t) { return t.detected; }), 100);
    EXPECT_TRUE(tr.trials.back().detected);
    EXPECT_DOUBLE_EQ(tr.commit_end_time, tr.last_detection + 10.0 * 608.9);
    for (const auto& t : tr.trials) {
        EXPECT_EQ(t.detected, t.setting != SlitSetting::BothShut);
        EXPECT_EQ(std::holds_alternative<NoRecord>(t.alice_record), !t.detected);
    }
}

TEST(RunCommit, EmittedCountMatchesNegativeBinomial) {
    // Trials needed for 100 detections at rate 3/4: mean 133.3, sd sqrt(100 * 1/4) / (3/4) = 6.67.
    const int runs = 200;
    double total = 0.0;
    for (int s = 0; s < runs; ++s) {
        total += static_cast<double>(run_commit(config_with(100, 1000 + s), Strategy::honest(CommitBit::One), model())
                                         .trials.size());
    }
    EXPECT_NEAR(total / runs, 400.0 / 3.0, 3.0 * (20.0 / 3.0) / std::sqrt(runs));
}

TEST(RunCommit, ZeroDetectionsIsConfigInvalid) {
    try {
        run_commit(config_with(0, 1), Strategy::honest(CommitBit::Zero), model());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::ConfigInvalid);
    }
}

TEST(RunCommit, PublicViewIndependentOfBitForSameSeed) {
    const auto t0 = run_commit(config_with(300, 77), Strategy::honest(CommitBit::Zero), model());
    const auto t1 = run_commit(config_with(300, 77), Strategy::honest(CommitBit::One), model());
    EXPECT_EQ(t0.public_view(), t1.public_view());
    EXPECT_EQ(t0.commit_end_time, t1.commit_end_time);
    // Cheaters announce the same way.
    const auto t2 = run_commit(config_with(300, 77), Strategy::store_and_delay(CommitBit::One), model());
    EXPECT_EQ(t0.public_view(), t2.public_view());
}

TEST(Unveil, HonestRecordsPassThrough) {
    for (auto bit : {CommitBit::Zero, CommitBit::One}) {
        const auto cfg = config_with(50, 9);
        RunStreams streams(cfg.seed);
        const auto tr = run_commit(cfg, Strategy::honest(bit), model(), streams);
        const auto u = unveil(tr.alice_view(), Strategy::honest(bit), model(), cfg, streams.alice);
        EXPECT_EQ(u.message.records.size(), 50u);
        EXPECT_EQ(u.genuine, 50u);
        EXPECT_EQ(u.fabricated, 0u);
        for (const auto& d : u.message.records) {
            if (bit == CommitBit::Zero) {
                EXPECT_TRUE(std::holds_alternative<double>(d.value));
            } else {
                EXPECT_TRUE(std::holds_alternative<Slit>(d.value));
            }
        }
    }
}

TEST(Unveil, MissingRecords) {
    std::vector<AliceTrial> alice{{0, true, NoRecord{}}};
    Rng rng(1);
    try {
        unveil(alice, Strategy::honest(CommitBit::Zero), model(), config_with(1, 0), rng);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::MissingRecords);
    }
}

TEST(Unveil, StoreAndDelayKeepsAboutTwoToMinusTen) {
    const auto cfg = config_with(1000, 4);
    const auto s = Strategy::store_and_delay(CommitBit::Zero);
    std::size_t genuine = 0;
    const int runs = 20;
    for (int r = 0; r < runs; ++r) {
        auto c = cfg;
        c.seed = 4 + r;
        const auto out = run_protocol(c, s, model(), Thresholds{});
        EXPECT_EQ(out.unveil.genuine + out.unveil.fabricated, 1000u);
        genuine += out.unveil.genuine;
        EXPECT_FALSE(out.report.accepted);
    }
    // ~0.98 usable records per 1000; over 20 runs expect 19.5 +- 3 * 4.4.
    EXPECT_NEAR(static_cast<double>(genuine), 20000.0 / 1024.0, 3.0 * std::sqrt(20000.0 / 1024.0));
}

TEST(MeasureHeld, DecayedParticleYieldsNothing) {
    Rng rng(1);
    const Held h{SlitSetting::LeftShut, 5.0};
    EXPECT_FALSE(measure_held(model(), h, CommitBit::One, 6.0, rng).has_value());
    const auto m = measure_held(model(), h, CommitBit::One, 4.0, rng);
    ASSERT_TRUE(m.has_value());
    EXPECT_EQ(std::get<Slit>(*m), Slit::Right);
}

TEST(Verify, HonestRunsAccepted) {
    for (auto bit : {CommitBit::Zero, CommitBit::One}) {
        const auto out = run_protocol(config_with(1200, 5), Strategy::honest(bit), model(), Thresholds{});
        EXPECT_TRUE(out.report.accepted) << "bit " << to_int(bit);
        EXPECT_EQ(out.report.tests.size(), bit == CommitBit::Zero ? 3u : 2u);
        for (const auto& t : out.report.tests) EXPECT_FALSE(t.warning) << t.name;
    }
}

TEST(Verify, GuessedLabelsRejected) {
    for (std::size_t n : {30, 60, 200}) {
        int accepted = 0;
        for (int s = 0; s < 20; ++s) {
            accepted += run_protocol(config_with(n, 100 + s), Strategy::guess_which_slit(), model(), Thresholds{})
                            .report.accepted;
        }
        EXPECT_EQ(accepted, 0) << "N=" << n;
    }
}

TEST(Verify, ForgedPositionsFailFringeFit) {
    const auto out = run_protocol(config_with(600, 8), Strategy::forge_positions(), model(), Thresholds{});
    EXPECT_FALSE(out.report.accepted);
    EXPECT_EQ(out.report.tests[0].name, "fringe_fit");
    EXPECT_LT(out.report.tests[0].value, 1e-9);
}

TEST(Verify, MalformedUnveil) {
    const auto cfg = config_with(40, 2);
    RunStreams streams(cfg.seed);
    const auto tr = run_commit(cfg, Strategy::honest(CommitBit::Zero), model(), streams);
    const auto good = unveil(tr.alice_view(), Strategy::honest(CommitBit::Zero), model(), cfg, streams.alice).message;
    auto expect_malformed = [&](const UnveilMessage& m) {
        try {
            verify(tr.bob_view(), m, model(), Thresholds{});
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), Errc::MalformedUnveil);
        }
    };
    auto short_msg = good;
    short_msg.records.pop_back();
    expect_malformed(short_msg);
    auto out_of_range = good;
    out_of_range.records[0].value = 2.5;
    expect_malformed(out_of_range);
    auto wrong_kind = good;
    wrong_kind.records[0].value = Slit::Left;
    expect_malformed(wrong_kind);
    auto duplicate = good;
    duplicate.records[1].index = duplicate.records[0].index;
    expect_malformed(duplicate);
    auto not_finite = good;
    not_finite.records[0].value = std::nan("");
    expect_malformed(not_finite);
    EXPECT_NO_THROW(verify(tr.bob_view(), good, model(), Thresholds{}));
}

TEST(Verify, SmallSamplesAutoPassWithWarning) {
    const auto out = run_protocol(config_with(20, 6), Strategy::honest(CommitBit::Zero), model(), Thresholds{});
    EXPECT_TRUE(out.report.accepted);
    for (const auto& t : out.report.tests) EXPECT_TRUE(t.warning);
    // The which-slit accuracy check is exact and applies to any event count.
    const auto b1 = run_protocol(config_with(20, 6), Strategy::honest(CommitBit::One), model(), Thresholds{});
    EXPECT_TRUE(b1.report.accepted);
    EXPECT_FALSE(b1.report.tests[0].warning);
    EXPECT_TRUE(b1.report.tests[1].warning);
}

TEST(AttackSweep, GuessingNeverAcceptedAtN200) {
    const auto point = attack_sweep(config_with(200, 1), Strategy::guess_which_slit(), 300, model(), Thresholds{}, 1);
    EXPECT_EQ(point.acceptances, 0u);
    EXPECT_EQ(point.estimate, 0.0);
    EXPECT_EQ(point.accepted.size(), 300u);
}

TEST(AttackSweep, DeterministicAcrossThreadCounts) {
    const auto a = attack_sweep(config_with(100, 9), Strategy::honest(CommitBit::One), 40, model(), Thresholds{}, 1);
    const auto b = attack_sweep(config_with(100, 9), Strategy::honest(CommitBit::One), 40, model(), Thresholds{}, 4);
    EXPECT_EQ(a.accepted, b.accepted);
}

TEST(AttackSweep, RejectsZeroRepetitions) {
    EXPECT_THROW(attack_sweep(config_with(10, 0), Strategy::honest(CommitBit::Zero), 0, model(), Thresholds{}),
                 Error);
}

TEST(CheatAcceptanceBound, AllCorrectRequirement) {
    EXPECT_NEAR(cheat_acceptance_bound(15, 1e-9), std::ldexp(1.0, -10), 1e-18);
}

TEST(CheatAcceptanceBound, MatchesExactSum) {
    // N = 300 -> m = 200, up to 4 errors allowed.
    const double ref = static_cast<double>(oracle::binomial_tail(200, 196, oracle::Big(0.5)));
    EXPECT_LT(ref, 1e-40);
    EXPECT_NEAR(cheat_acceptance_bound(300, 0.02) / ref, 1.0, 1e-10);
    // N = 200 -> m = 133, 2 errors allowed.
    const double ref133 = static_cast<double>(oracle::binomial_tail(133, 131, oracle::Big(0.5)));
    EXPECT_NEAR(cheat_acceptance_bound(200, 0.02) / ref133, 1.0, 1e-10);
    EXPECT_LT(ref133, 1e-25);
}

TEST(CheatAcceptanceBound, BadEpsilon) {
    try {
        cheat_acceptance_bound(100, 0.5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::BadEpsilon);
    }
    EXPECT_THROW(cheat_acceptance_bound(100, 0.0), Error);
}

}  // namespace
