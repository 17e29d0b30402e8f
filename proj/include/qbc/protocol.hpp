// Copyright 2026 The qbc-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Commit/unveil state machine for the double-slit commitment with unstable
// particles.
//
// Bob emits particles toward a double slit whose setting (both open, left
// shut, right shut, both shut) he draws uniformly and keeps private. Alice
// measures each particle that reaches her either on the screen (bit 0) or in
// the slit basis (bit 1) and publicly announces only whether it was detected.
// The commit phase ends k half-lives after the last of N detections. At unveil
// Alice names the bit and discloses her records; Bob checks them against his
// private settings.
//
// Randomness: every run uses three independent streams derived from its seed
// (Bob, Alice, decay). Bob's stream alone drives emission times and settings,
// so the public projection cannot depend on Alice's bit.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "qbc/decay.hpp"
#include "qbc/error.hpp"
#include "qbc/optics.hpp"
#include "qbc/quantum.hpp"
#include "qbc/random.hpp"
#include "qbc/stats.hpp"

namespace qbc::protocol {

using quantum::Slit;

enum class SlitSetting { BothOpen = 0, LeftShut = 1, RightShut = 2, BothShut = 3 };

enum class CommitBit { Zero = 0, One = 1 };

inline CommitBit bit_from_int(int b) {
    if (b != 0 && b != 1) throw Error(Errc::ConfigInvalid, "bit must be 0 or 1");
    return b == 0 ? CommitBit::Zero : CommitBit::One;
}

inline int to_int(CommitBit b) { return static_cast<int>(b); }

inline const char* to_string(SlitSetting s) {
    switch (s) {
        case SlitSetting::BothOpen: return "both_open";
        case SlitSetting::LeftShut: return "left_shut";
        case SlitSetting::RightShut: return "right_shut";
        case SlitSetting::BothShut: return "both_shut";
    }
    return "?";
}

inline std::optional<SlitSetting> setting_from_string(const std::string& s) {
    for (auto v : {SlitSetting::BothOpen, SlitSetting::LeftShut, SlitSetting::RightShut,
                   SlitSetting::BothShut}) {
        if (s == to_string(v)) return v;
    }
    return std::nullopt;
}

inline const char* to_string(Slit s) { return s == Slit::Left ? "L" : "R"; }

inline std::optional<Slit> slit_from_string(const std::string& s) {
    if (s == "L") return Slit::Left;
    if (s == "R") return Slit::Right;
    return std::nullopt;
}

inline bool is_single_slit(SlitSetting s) {
    return s == SlitSetting::LeftShut || s == SlitSetting::RightShut;
}

/// The slit a particle must have used; only meaningful for single-slit settings.
inline Slit open_slit(SlitSetting s) {
    return s == SlitSetting::LeftShut ? Slit::Right : Slit::Left;
}

inline SlitSetting draw_setting(Rng& rng) {
    return static_cast<SlitSetting>(rng.uniform_pow2(4));
}

// ---------------------------------------------------------------------------
// Alice-side records

struct NoRecord {
    friend bool operator==(const NoRecord&, const NoRecord&) = default;
};
struct Position {
    double x = 0.0;
    friend bool operator==(const Position&, const Position&) = default;
};
struct WhichSlit {
    Slit slit = Slit::Left;
    friend bool operator==(const WhichSlit&, const WhichSlit&) = default;
};
/// Particle stored unmeasured. `state` is the physical slit state she holds
/// (not knowledge she has); `lifetime` is when it decays after detection.
struct Held {
    SlitSetting state = SlitSetting::BothOpen;
    double lifetime = 0.0;
    friend bool operator==(const Held&, const Held&) = default;
};
/// Outcome of the minimum-error double-vs-single measurement.
struct Routed {
    bool guessed_double = false;
    friend bool operator==(const Routed&, const Routed&) = default;
};

using AliceRecord = std::variant<NoRecord, Position, WhichSlit, Held, Routed>;

struct TrialRecord {
    std::size_t index = 0;
    double emit_time = 0.0;
    SlitSetting setting = SlitSetting::BothShut;  // Bob-private
    bool detected = false;                         // public
    AliceRecord alice_record;                      // Alice-private
    double announce_time = 0.0;                    // public
};

// ---------------------------------------------------------------------------
// Strategies

enum class StrategyKind {
    Honest,
    ForgePositionsFromWhichSlit,
    GuessWhichSlitFromPositions,
    StoreAndDelay,
    HelstromRouter,
};

struct Strategy {
    StrategyKind kind = StrategyKind::Honest;
    CommitBit unveil_bit = CommitBit::Zero;

    static Strategy honest(CommitBit b) { return {StrategyKind::Honest, b}; }
    /// Commits to 1 by which-slit measurement, later claims 0.
    static Strategy forge_positions() {
        return {StrategyKind::ForgePositionsFromWhichSlit, CommitBit::Zero};
    }
    /// Commits to 0 by position measurement, later claims 1.
    static Strategy guess_which_slit() {
        return {StrategyKind::GuessWhichSlitFromPositions, CommitBit::One};
    }
    static Strategy store_and_delay(CommitBit target) { return {StrategyKind::StoreAndDelay, target}; }
    static Strategy helstrom_router(CommitBit target) { return {StrategyKind::HelstromRouter, target}; }

    friend bool operator==(const Strategy&, const Strategy&) = default;
};

inline const char* to_string(StrategyKind k) {
    switch (k) {
        case StrategyKind::Honest: return "honest";
        case StrategyKind::ForgePositionsFromWhichSlit: return "forge-positions";
        case StrategyKind::GuessWhichSlitFromPositions: return "guess-which-slit";
        case StrategyKind::StoreAndDelay: return "store-and-delay";
        case StrategyKind::HelstromRouter: return "helstrom-router";
    }
    return "?";
}

inline std::optional<StrategyKind> strategy_kind_from_string(const std::string& s) {
    for (auto k : {StrategyKind::Honest, StrategyKind::ForgePositionsFromWhichSlit,
                   StrategyKind::GuessWhichSlitFromPositions, StrategyKind::StoreAndDelay,
                   StrategyKind::HelstromRouter}) {
        if (s == to_string(k)) return k;
    }
    return std::nullopt;
}

/// Builds a strategy from its name; `bit` is the honest bit or the cheater's
/// target where the strategy takes one, and is ignored for the two forgers.
inline Strategy make_strategy(StrategyKind kind, CommitBit bit) {
    switch (kind) {
        case StrategyKind::Honest: return Strategy::honest(bit);
        case StrategyKind::ForgePositionsFromWhichSlit: return Strategy::forge_positions();
        case StrategyKind::GuessWhichSlitFromPositions: return Strategy::guess_which_slit();
        case StrategyKind::StoreAndDelay: return Strategy::store_and_delay(bit);
        case StrategyKind::HelstromRouter: return Strategy::helstrom_router(bit);
    }
    return Strategy::honest(bit);
}

// ---------------------------------------------------------------------------
// Configuration

struct Thresholds {
    double alpha = 0.01;             // per chi-square significance
    double epsilon = 0.02;           // which-slit error allowance
    std::size_t min_events = 30;     // m0: smaller statistical tests auto-pass with a warning
    std::size_t fringe_regions = 8;  // max spatial regions of the fringe-resolved binning
    double balance_sigmas = 3.0;     // both-open L/R balance band

    void validate() const {
        if (!(alpha > 0.0 && alpha < 1.0)) throw Error(Errc::ConfigInvalid, "alpha must be in (0, 1)");
        if (!(epsilon > 0.0 && epsilon < 0.5)) {
            throw Error(Errc::ConfigInvalid, "epsilon must be in (0, 1/2)");
        }
        if (min_events < 1 || fringe_regions < 1 || !(balance_sigmas > 0.0)) {
            throw Error(Errc::ConfigInvalid, "min_events, fringe_regions, balance_sigmas must be positive");
        }
    }

    friend bool operator==(const Thresholds&, const Thresholds&) = default;
};

struct CommitConfig {
    std::size_t n_detections = 1200;
    decay::ParticleSpecies species = decay::neutron();
    decay::DeadlinePolicy deadline{};
    optics::SlitGeometry geometry{};
    double mean_interarrival_half_lives = 1.0;
    double transit_latency = 0.0;  // seconds
    std::uint64_t seed = 0;

    void validate() const {
        if (n_detections < 1) throw Error(Errc::ConfigInvalid, "N must be >= 1");
        if (!(species.half_life > 0.0)) throw Error(Errc::ConfigInvalid, "half-life must be > 0");
        if (!(deadline.multiplier >= 1.0)) throw Error(Errc::ConfigInvalid, "k must be >= 1");
        if (!(mean_interarrival_half_lives > 0.0) || !(transit_latency >= 0.0)) {
            throw Error(Errc::ConfigInvalid, "inter-arrival must be > 0 and latency >= 0");
        }
        try {
            geometry.validate();
        } catch (const Error& e) {
            throw Error(Errc::ConfigInvalid, e.what());
        }
    }
};

/// Screen distributions and the discrimination measurement, built once per
/// geometry and shared read-only across runs.
class ScreenModel {
public:
    explicit ScreenModel(const optics::SlitGeometry& geom)
        : geometry_(geom),
          doubleslit_(optics::doubleslit_pdf(geom)),
          envelope_(optics::envelope_pdf(geom)),
          mixture_(make_mixture(doubleslit_, envelope_)),
          router_projector_(quantum::helstrom_measurement(
              quantum::dm_from_state(quantum::double_slit_state()), 1.0 / 3.0,
              quantum::DensityMatrix::maximally_mixed(2), 2.0 / 3.0)) {}

    const optics::SlitGeometry& geometry() const { return geometry_; }
    const optics::ScreenPdf& doubleslit() const { return doubleslit_; }
    const optics::ScreenPdf& envelope() const { return envelope_; }
    /// Marginal screen distribution given detection: 1/3 fringed, 2/3 envelope.
    const optics::ScreenPdf& mixture() const { return mixture_; }
    /// Projector whose outcome means "single slit" for the router.
    const quantum::Matrix& router_projector() const { return router_projector_; }

    const optics::ScreenPdf& position_pdf(SlitSetting s) const {
        return s == SlitSetting::BothOpen ? doubleslit_ : envelope_;
    }

private:
    static optics::ScreenPdf make_mixture(const optics::ScreenPdf& ds, const optics::ScreenPdf& env) {
        std::vector<double> density(ds.grid().size());
        for (std::size_t i = 0; i < density.size(); ++i) {
            density[i] = ds.density()[i] / 3.0 + 2.0 * env.density()[i] / 3.0;
        }
        return optics::ScreenPdf(ds.grid(), std::move(density));
    }

    optics::SlitGeometry geometry_;
    optics::ScreenPdf doubleslit_;
    optics::ScreenPdf envelope_;
    optics::ScreenPdf mixture_;
    quantum::Matrix router_projector_;
};

inline quantum::PureState slit_state(SlitSetting s) {
    switch (s) {
        case SlitSetting::LeftShut: return quantum::slit_basis_state(Slit::Right);
        case SlitSetting::RightShut: return quantum::slit_basis_state(Slit::Left);
        default: return quantum::double_slit_state();
    }
}

/// Ideal slit-basis measurement by the Born rule.
inline Slit measure_which_slit(SlitSetting s, Rng& rng) {
    const auto psi = slit_state(s);
    const double p_left = std::norm(psi.amplitudes()(0));
    return rng.uniform() < p_left ? Slit::Left : Slit::Right;
}

inline double measure_position(const ScreenModel& model, SlitSetting s, Rng& rng) {
    return optics::sample_position(model.position_pdf(s), rng);
}

/// Whether the particle prepared by a detected setting was routed to "both open".
inline bool route_double(const ScreenModel& model, SlitSetting s, Rng& rng) {
    const double p_single = quantum::outcome_probability(model.router_projector(), slit_state(s));
    return !(rng.uniform() < p_single);
}

/// Per-trial generators: Alice's measurements and nature's decay times.
struct TrialStreams {
    Rng& alice;
    Rng& decay;
};

/// One emitted particle. A particle is detected iff at least one slit is open.
inline TrialRecord run_trial(const ScreenModel& model, const decay::ParticleSpecies& species,
                             SlitSetting setting, const Strategy& strategy, TrialStreams streams,
                             std::size_t index, double emit_time, double latency) {
    TrialRecord rec;
    rec.index = index;
    rec.emit_time = emit_time;
    rec.setting = setting;
    rec.announce_time = emit_time + latency;
    rec.detected = setting != SlitSetting::BothShut;
    if (!rec.detected) return rec;

    auto measure_positions = [&] { rec.alice_record = Position{measure_position(model, setting, streams.alice)}; };
    auto measure_slits = [&] { rec.alice_record = WhichSlit{measure_which_slit(setting, streams.alice)}; };

    switch (strategy.kind) {
        case StrategyKind::Honest:
            if (strategy.unveil_bit == CommitBit::Zero) {
                measure_positions();
            } else {
                measure_slits();
            }
            break;
        case StrategyKind::ForgePositionsFromWhichSlit: measure_slits(); break;
        case StrategyKind::GuessWhichSlitFromPositions: measure_positions(); break;
        case StrategyKind::StoreAndDelay:
            rec.alice_record = Held{setting, decay::sample_decay_time(species, streams.decay)};
            break;
        case StrategyKind::HelstromRouter:
            rec.alice_record = Routed{route_double(model, setting, streams.alice)};
            break;
    }
    return rec;
}

// ---------------------------------------------------------------------------
// Transcripts

struct PublicTrial {
    std::size_t index = 0;
    bool detected = false;
    double announce_time = 0.0;
    friend bool operator==(const PublicTrial&, const PublicTrial&) = default;
};

struct BobTrial {
    std::size_t index = 0;
    double emit_time = 0.0;
    SlitSetting setting = SlitSetting::BothShut;
    bool detected = false;
    double announce_time = 0.0;
};

struct AliceTrial {
    std::size_t index = 0;
    bool detected = false;
    AliceRecord record;
};

struct Transcript {
    CommitConfig config;
    Strategy strategy;
    std::vector<TrialRecord> trials;
    std::size_t n_detected = 0;
    double last_detection = 0.0;
    double commit_end_time = 0.0;

    std::vector<PublicTrial> public_view() const {
        std::vector<PublicTrial> out;
        out.reserve(trials.size());
        for (const auto& t : trials) out.push_back({t.index, t.detected, t.announce_time});
        return out;
    }

    std::vector<BobTrial> bob_view() const {
        std::vector<BobTrial> out;
        out.reserve(trials.size());
        for (const auto& t : trials) {
            out.push_back({t.index, t.emit_time, t.setting, t.detected, t.announce_time});
        }
        return out;
    }

    std::vector<AliceTrial> alice_view() const {
        std::vector<AliceTrial> out;
        out.reserve(trials.size());
        for (const auto& t : trials) out.push_back({t.index, t.detected, t.alice_record});
        return out;
    }
};

/// Generators for one run, all derived from the run seed.
struct RunStreams {
    Rng bob;
    Rng alice;
    Rng decay;

    explicit RunStreams(std::uint64_t seed)
        : bob(derive_seed(seed, {stream::kBob})),
          alice(derive_seed(seed, {stream::kAlice})),
          decay(derive_seed(seed, {stream::kDecay})) {}
};

/// Emits particles until N are detected, then closes the commit phase k
/// half-lives after the last detection. Emission gaps are exponential with
/// mean `mean_interarrival_half_lives` half-lives.
inline Transcript run_commit(const CommitConfig& config, const Strategy& strategy,
                             const ScreenModel& model, RunStreams& streams) {
    config.validate();
    Transcript tr;
    tr.config = config;
    tr.strategy = strategy;
    tr.trials.reserve(config.n_detections * 4 / 3 + 16);
    const double mean_gap = config.mean_interarrival_half_lives * config.species.half_life;
    double clock = 0.0;
    std::size_t index = 0;
    while (tr.n_detected < config.n_detections) {
        clock += -mean_gap * std::log1p(-streams.bob.uniform());
        const SlitSetting setting = draw_setting(streams.bob);
        TrialRecord rec = run_trial(model, config.species, setting, strategy,
                                    {streams.alice, streams.decay}, index++, clock,
                                    config.transit_latency);
        if (rec.detected) {
            ++tr.n_detected;
            tr.last_detection = rec.announce_time;
        }
        tr.trials.push_back(std::move(rec));
    }
    tr.commit_end_time = decay::commit_deadline(tr.last_detection, config.species, config.deadline);
    return tr;
}

inline Transcript run_commit(const CommitConfig& config, const Strategy& strategy,
                             const ScreenModel& model) {
    RunStreams streams(config.seed);
    return run_commit(config, strategy, model, streams);
}

// ---------------------------------------------------------------------------
// Unveil

using DisclosedValue = std::variant<double, Slit>;

struct Disclosure {
    std::size_t index = 0;
    DisclosedValue value;
};

struct UnveilMessage {
    CommitBit bit = CommitBit::Zero;
    std::vector<Disclosure> records;
};

struct UnveilResult {
    UnveilMessage message;
    std::size_t genuine = 0;     // records backed by an actual measurement
    std::size_t fabricated = 0;  // records invented by the strategy
};

/// Measures a stored particle `hold_time` after detection, or nullopt if it
/// has decayed by then.
inline std::optional<DisclosedValue> measure_held(const ScreenModel& model, const Held& held,
                                                  CommitBit basis, double hold_time, Rng& rng) {
    if (held.lifetime <= hold_time) return std::nullopt;
    if (basis == CommitBit::Zero) return measure_position(model, held.state, rng);
    return measure_which_slit(held.state, rng);
}

/// Packages Alice's records for `strategy.unveil_bit`. Honest records pass
/// through; cheaters fill gaps with the strongest simple fabrication:
///  - positions from slit labels: envelope draws (labels carry no fringe phase),
///  - slit labels from positions: fair coin (Fraunhofer positions carry no
///    which-slit information),
///  - stored particles: measured in the claimed basis if still alive after k
///    half-lives, otherwise drawn from the detection-marginal (positions) or a
///    fair coin (labels),
///  - router outcomes: fringed or envelope positions by routed class; labels
///    by fair coin.
inline UnveilResult unveil(const std::vector<AliceTrial>& alice_private, const Strategy& strategy,
                           const ScreenModel& model, const CommitConfig& config, Rng& rng) {
    UnveilResult out;
    out.message.bit = strategy.unveil_bit;
    const bool want_position = strategy.unveil_bit == CommitBit::Zero;
    const double hold_time = config.deadline.multiplier * config.species.half_life;
    auto coin = [&rng] { return rng.uniform() < 0.5 ? Slit::Left : Slit::Right; };

    for (const auto& t : alice_private) {
        if (!t.detected) continue;
        Disclosure d;
        d.index = t.index;
        bool genuine = true;
        const AliceRecord& r = t.record;
        if (std::holds_alternative<NoRecord>(r)) {
            throw Error(Errc::MissingRecords, "detected trial " + std::to_string(t.index) + " has no record");
        } else if (const auto* p = std::get_if<Position>(&r)) {
            if (want_position) {
                d.value = p->x;
            } else {
                d.value = coin();
                genuine = false;
            }
        } else if (const auto* w = std::get_if<WhichSlit>(&r)) {
            if (want_position) {
                d.value = optics::sample_position(model.envelope(), rng);
                genuine = false;
            } else {
                d.value = w->slit;
            }
        } else if (const auto* h = std::get_if<Held>(&r)) {
            auto measured = measure_held(model, *h, strategy.unveil_bit, hold_time, rng);
            if (measured) {
                d.value = *measured;
            } else {
                genuine = false;
                if (want_position) {
                    d.value = optics::sample_position(model.mixture(), rng);
                } else {
                    d.value = coin();
                }
            }
        } else if (const auto* routed = std::get_if<Routed>(&r)) {
            genuine = false;
            if (want_position) {
                d.value = optics::sample_position(
                    routed->guessed_double ? model.doubleslit() : model.envelope(), rng);
            } else {
                d.value = coin();
            }
        }
        (genuine ? out.genuine : out.fabricated) += 1;
        out.message.records.push_back(std::move(d));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Verification

struct TestOutcome {
    std::string name;
    std::size_t events = 0;
    double statistic = 0.0;
    double value = 1.0;      // p-value or error rate
    double threshold = 0.0;
    bool passed = true;
    bool warning = false;    // fewer than m0 events, auto-passed
};

struct VerificationReport {
    CommitBit bit = CommitBit::Zero;
    bool accepted = false;
    std::vector<TestOutcome> tests;
};

// Fringe-resolved binning sized to the sample: about `kEventsPerRegion`
// events per spatial region, between 1 and `th.fringe_regions` regions. Small
// samples collapse to a single bright/dark split so merging never mixes the
// two phase classes.
inline constexpr std::size_t kEventsPerRegion = 200;

inline stats::Binning verification_binning(const optics::SlitGeometry& geom, std::size_t events,
                                           const Thresholds& th) {
    const std::size_t regions = std::clamp<std::size_t>(events / kEventsPerRegion, 1, th.fringe_regions);
    return stats::fringe_binning(geom, regions);
}

namespace detail {

inline TestOutcome chi_square_test(std::string name, const std::vector<double>& samples,
                                   const optics::ScreenPdf& pdf, const optics::SlitGeometry& geom,
                                   const Thresholds& th, bool expect_fit) {
    TestOutcome t;
    t.name = std::move(name);
    t.events = samples.size();
    t.threshold = th.alpha;
    if (samples.size() < th.min_events) {
        t.warning = true;
        return t;
    }
    const auto gof =
        stats::chi_square_gof(samples, pdf, protocol::verification_binning(geom, samples.size(), th), th.min_events);
    t.statistic = gof.statistic;
    t.value = gof.p_value;
    t.passed = expect_fit ? gof.p_value >= th.alpha : gof.p_value < th.alpha;
    return t;
}

}  // namespace detail

/// Maximum tolerated which-slit errors among `events` single-slit records.
inline long long allowed_errors(long long events, double epsilon) {
    return static_cast<long long>(std::floor(epsilon * static_cast<double>(events) + 1e-9));
}

/// Bob's decision. For bit 0: both-open positions must fit the fringed
/// pattern, single-slit positions must fit the envelope and must not fit the
/// fringed pattern. For bit 1: single-slit labels must name the open slit up
/// to an error rate epsilon, and both-open labels must be balanced within
/// `balance_sigmas` binomial standard deviations. Throws MalformedUnveil if the
/// disclosure does not line up with the detected trials.
inline VerificationReport verify(const std::vector<BobTrial>& bob_private, const UnveilMessage& msg,
                                 const ScreenModel& model, const Thresholds& th) {
    th.validate();
    std::vector<const BobTrial*> by_index;
    std::size_t n_detected = 0;
    for (const auto& t : bob_private) {
        if (t.index >= by_index.size()) by_index.resize(t.index + 1, nullptr);
        if (by_index[t.index] != nullptr) throw Error(Errc::MalformedUnveil, "duplicate trial index");
        by_index[t.index] = &t;
        if (t.detected) ++n_detected;
    }
    if (msg.records.size() != n_detected) {
        throw Error(Errc::MalformedUnveil, std::to_string(msg.records.size()) + " records for " +
                                               std::to_string(n_detected) + " detections");
    }

    const double halfwidth = model.geometry().screen_halfwidth;
    std::vector<bool> seen(by_index.size(), false);
    std::vector<double> open_positions;
    std::vector<double> single_positions;
    long long single_events = 0;
    long long single_errors = 0;
    long long open_events = 0;
    long long open_left = 0;

    for (const auto& d : msg.records) {
        if (d.index >= by_index.size() || by_index[d.index] == nullptr ||
            !by_index[d.index]->detected || seen[d.index]) {
            throw Error(Errc::MalformedUnveil, "record for unknown or repeated trial " + std::to_string(d.index));
        }
        seen[d.index] = true;
        const SlitSetting setting = by_index[d.index]->setting;
        if (msg.bit == CommitBit::Zero) {
            const double* x = std::get_if<double>(&d.value);
            if (x == nullptr) throw Error(Errc::MalformedUnveil, "bit 0 unveil needs positions");
            if (!std::isfinite(*x) || std::abs(*x) > halfwidth) {
                throw Error(Errc::MalformedUnveil, "position outside the screen");
            }
            (setting == SlitSetting::BothOpen ? open_positions : single_positions).push_back(*x);
        } else {
            const Slit* s = std::get_if<Slit>(&d.value);
            if (s == nullptr) throw Error(Errc::MalformedUnveil, "bit 1 unveil needs slit labels");
            if (setting == SlitSetting::BothOpen) {
                ++open_events;
                if (*s == Slit::Left) ++open_left;
            } else {
                ++single_events;
                if (*s != open_slit(setting)) ++single_errors;
            }
        }
    }

    VerificationReport report;
    report.bit = msg.bit;
    if (msg.bit == CommitBit::Zero) {
        const auto& geom = model.geometry();
        report.tests.push_back(
            detail::chi_square_test("fringe_fit", open_positions, model.doubleslit(), geom, th, true));
        report.tests.push_back(
            detail::chi_square_test("envelope_fit", single_positions, model.envelope(), geom, th, true));
        report.tests.push_back(
            detail::chi_square_test("anti_fringe", single_positions, model.doubleslit(), geom, th, false));
    } else {
        TestOutcome err;
        err.name = "which_slit_error";
        err.events = static_cast<std::size_t>(single_events);
        err.threshold = th.epsilon;
        err.statistic = static_cast<double>(single_errors);
        err.value = single_events > 0
                        ? static_cast<double>(single_errors) / static_cast<double>(single_events)
                        : 0.0;
        // Exact check: honest labels are never wrong, so no minimum count applies.
        if (err.events == 0) {
            err.warning = true;
        } else {
            err.passed = single_errors <= allowed_errors(single_events, th.epsilon);
        }
        report.tests.push_back(err);

        TestOutcome bal;
        bal.name = "double_slit_balance";
        bal.events = static_cast<std::size_t>(open_events);
        bal.threshold = th.balance_sigmas;
        if (bal.events < th.min_events) {
            bal.warning = true;
        } else {
            const double n = static_cast<double>(open_events);
            const double z = (static_cast<double>(open_left) - 0.5 * n) / std::sqrt(0.25 * n);
            bal.statistic = z;
            bal.value = static_cast<double>(open_left) / n;
            bal.passed = std::abs(z) <= th.balance_sigmas;
        }
        report.tests.push_back(bal);
    }
    report.accepted = std::all_of(report.tests.begin(), report.tests.end(),
                                  [](const TestOutcome& t) { return t.passed; });
    return report;
}

// ---------------------------------------------------------------------------
// Experiments

struct RunOutcome {
    Transcript transcript;
    UnveilResult unveil;
    VerificationReport report;
};

/// Commit, unveil and verify one run from `config.seed`.
inline RunOutcome run_protocol(const CommitConfig& config, const Strategy& strategy,
                               const ScreenModel& model, const Thresholds& th) {
    RunStreams streams(config.seed);
    RunOutcome out;
    out.transcript = run_commit(config, strategy, model, streams);
    out.unveil = unveil(out.transcript.alice_view(), strategy, model, config, streams.alice);
    out.report = verify(out.transcript.bob_view(), out.unveil.message, model, th);
    return out;
}

/// Seed of repetition `rep` at grid point N.
inline std::uint64_t repetition_seed(std::uint64_t master, std::size_t n, std::size_t rep) {
    return derive_seed(master, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(rep)});
}

/// Runs `fn(i)` for i in [0, count) on up to `threads` workers.
inline void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += threads) fn(i);
        });
    }
}

struct SweepPoint {
    std::size_t n = 0;
    Strategy strategy;
    std::size_t acceptances = 0;
    std::size_t repetitions = 0;
    double estimate = 0.0;
    stats::Interval ci;
    std::vector<bool> accepted;  // per repetition, in repetition order
};

/// Monte Carlo estimate of P(Bob accepts) under `strategy` at config.n_detections.
inline SweepPoint attack_sweep(const CommitConfig& config, const Strategy& strategy,
                               std::size_t repetitions, const ScreenModel& model,
                               const Thresholds& th, unsigned threads = 0) {
    if (repetitions < 1) throw Error(Errc::ConfigInvalid, "repetitions must be >= 1");
    config.validate();
    SweepPoint point;
    point.n = config.n_detections;
    point.strategy = strategy;
    point.repetitions = repetitions;
    std::vector<char> accepted(repetitions, 0);
    parallel_for(repetitions, threads, [&](std::size_t rep) {
        CommitConfig c = config;
        c.seed = repetition_seed(config.seed, config.n_detections, rep);
        accepted[rep] = run_protocol(c, strategy, model, th).report.accepted ? 1 : 0;
    });
    point.accepted.assign(accepted.begin(), accepted.end());
    point.acceptances = static_cast<std::size_t>(std::count(accepted.begin(), accepted.end(), 1));
    point.estimate = static_cast<double>(point.acceptances) / static_cast<double>(repetitions);
    point.ci = stats::clopper_pearson(point.acceptances, repetitions);
    return point;
}

/// Acceptance probability of a fair-coin labeller on the which-slit check:
/// P[Bin(m, 1/2) >= m - floor(epsilon m)] with m = round(single_fraction * N).
inline double cheat_acceptance_bound(long long n, double epsilon, double single_fraction = 2.0 / 3.0) {
    if (!(epsilon > 0.0 && epsilon < 0.5)) throw Error(Errc::BadEpsilon, "epsilon must be in (0, 1/2)");
    if (n < 1 || !(single_fraction > 0.0 && single_fraction <= 1.0)) {
        throw Error(Errc::BadArgs, "need N >= 1 and single_fraction in (0, 1]");
    }
    const auto m = static_cast<long long>(std::llround(single_fraction * static_cast<double>(n)));
    return stats::binomial_tail(m, m - allowed_errors(m, epsilon), 0.5);
}

}  // namespace qbc::protocol
