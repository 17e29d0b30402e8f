// Copyright 2026 The qbc-sim Authors
// SPDX-License-Identifier: Apache-2.0

// qbc: command-line driver for the double-slit bit commitment simulator.
//
//   qbc simulate      run the commit phase and Alice's unveil, write transcripts
//   qbc verify        Bob's check of an unveil message against his transcript
//   qbc attack-sweep  acceptance probability of a strategy versus N (CSV)
//   qbc pattern       screen densities as x,density CSV
//   qbc nogo-demo     local-unitary attack on toy commitments
//
// Exit codes: 0 ok/accept, 2 usage or malformed input, 3 verification reject.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qbc/qbc.hpp"

namespace {

namespace fs = std::filesystem;
using namespace qbc;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitReject = 3;

// Flags shared by the run-style subcommands. Unset flags leave the config
// file (or the defaults) untouched.
struct CommonFlags {
    std::optional<std::size_t> n;
    std::optional<int> bit;
    std::optional<std::string> particle;
    std::optional<double> half_life;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> strategy;
    std::optional<double> alpha;
    std::optional<double> epsilon;
    std::optional<double> k;
    std::optional<std::string> out_dir;
    std::string config_path;

    void attach(CLI::App* app) {
        app->add_option("--n", n, "Number of detections N");
        app->add_option("--bit", bit, "Committed bit, or a cheater's target bit");
        app->add_option("--particle", particle, "neutron | muon | custom");
        app->add_option("--half-life", half_life, "Half-life in seconds (custom particle)");
        app->add_option("--seed", seed, "Master seed");
        app->add_option("--strategy", strategy,
                        "honest | forge-positions | guess-which-slit | store-and-delay | helstrom-router");
        app->add_option("--alpha", alpha, "Per-test chi-square significance");
        app->add_option("--epsilon", epsilon, "Which-slit error allowance");
        app->add_option("--k", k, "Deadline multiplier in half-lives");
        app->add_option("--out-dir", out_dir, "Output directory");
        app->add_option("--config", config_path, "JSON config file (flags override)");
    }

    RunConfig resolve() const {
        RunConfig rc;
        if (!config_path.empty()) rc = load_config(config_path);
        Json overlay = Json::object();
        if (n) overlay["n"] = *n;
        if (bit) overlay["bit"] = *bit;
        if (particle) overlay["particle"] = *particle;
        if (half_life) {
            overlay["half_life"] = *half_life;
            if (!particle) overlay["particle"] = "custom";
        }
        if (seed) overlay["seed"] = *seed;
        if (strategy) overlay["strategy"] = *strategy;
        if (k) overlay["k"] = *k;
        if (out_dir) overlay["out_dir"] = *out_dir;
        if (alpha || epsilon) {
            overlay["thresholds"] = Json::object();
            if (alpha) overlay["thresholds"]["alpha"] = *alpha;
            if (epsilon) overlay["thresholds"]["epsilon"] = *epsilon;
        }
        if (particle && *particle != "custom" && !half_life) {
            // A named particle replaces any half-life carried by the config file.
            rc.commit.species = decay::species_by_name(*particle);
            overlay.erase("particle");
        }
        rc = from_json(overlay, rc);
        rc.validate();
        return rc;
    }
};

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(Errc::ConfigInvalid, "cannot create " + dir + ": " + ec.message());
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::ConfigInvalid, "cannot write " + path.string());
    return out;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

int cmd_simulate(const CommonFlags& flags) {
    const RunConfig rc = flags.resolve();
    const protocol::ScreenModel model(rc.commit.geometry);
    const protocol::Strategy strategy = rc.make_strategy();
    protocol::RunStreams streams(rc.commit.seed);
    const auto transcript = protocol::run_commit(rc.commit, strategy, model, streams);
    const auto unveiled = protocol::unveil(transcript.alice_view(), strategy, model, rc.commit, streams.alice);

    ensure_dir(rc.out_dir);
    const fs::path dir(rc.out_dir);
    {
        auto out = open_out(dir / "public.jsonl");
        io::write_public(out, transcript);
    }
    {
        auto out = open_out(dir / "bob.jsonl");
        io::write_bob(out, transcript);
    }
    {
        auto out = open_out(dir / "alice.jsonl");
        io::write_alice(out, transcript);
    }
    {
        auto out = open_out(dir / "unveil.jsonl");
        io::write_unveil(out, unveiled.message);
    }
    {
        auto out = open_out(dir / "config.json");
        out << to_json(rc).dump(2) << '\n';
    }
    std::cout << "detected=" << transcript.n_detected << " emitted=" << transcript.trials.size()
              << " commit_end_time=" << format_double(transcript.commit_end_time)
              << " strategy=" << protocol::to_string(strategy.kind)
              << " unveil_bit=" << protocol::to_int(strategy.unveil_bit)
              << " genuine=" << unveiled.genuine << " fabricated=" << unveiled.fabricated << '\n';
    return kExitOk;
}

struct VerifyFlags {
    std::string bob_path;
    std::string unveil_path;
    std::string report_path;
};

int cmd_verify(const CommonFlags& flags, const VerifyFlags& vf) {
    RunConfig rc;
    io::BobFile bob;
    protocol::UnveilMessage msg;
    try {
        rc = flags.resolve();
        bob = io::read_file(vf.bob_path, io::read_bob);
        msg = io::read_file(vf.unveil_path, io::read_unveil);
        // Geometry comes from Bob's own transcript, not from the unveiler.
        rc = from_json(Json{{"geometry", bob.header.at("config").at("geometry")}}, rc);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    const protocol::ScreenModel model(rc.commit.geometry);
    protocol::VerificationReport report;
    try {
        report = protocol::verify(bob.trials, msg, model, rc.thresholds);
    } catch (const Error& e) {
        std::cerr << "malformed unveil: " << e.what() << '\n';
        return kExitUsage;
    }

    std::string report_path = vf.report_path;
    if (report_path.empty()) {
        ensure_dir(rc.out_dir);
        report_path = (fs::path(rc.out_dir) / "report.jsonl").string();
    }
    {
        auto out = open_out(report_path);
        io::write_report(out, report);
    }
    for (const auto& t : report.tests) {
        std::cout << (t.passed ? "pass " : "FAIL ") << t.name << " events=" << t.events
                  << " statistic=" << format_double(t.statistic) << " value=" << format_double(t.value)
                  << " threshold=" << format_double(t.threshold) << (t.warning ? " (too few events)" : "")
                  << '\n';
    }
    std::cout << (report.accepted ? "ACCEPT" : "REJECT") << " bit=" << protocol::to_int(report.bit) << '\n';
    return report.accepted ? kExitOk : kExitReject;
}

struct SweepFlags {
    std::string grid = "50,100,200,400,800";
    std::size_t reps = 200;
    unsigned threads = 0;
    std::string csv_path;
};

std::vector<std::size_t> parse_grid(const std::string& text) {
    std::vector<std::size_t> grid;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t pos = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(item, &pos);
        } catch (const std::exception&) {
            throw Error(Errc::ConfigInvalid, "bad grid entry '" + item + "'");
        }
        if (pos != item.size() || v == 0) throw Error(Errc::ConfigInvalid, "bad grid entry '" + item + "'");
        grid.push_back(static_cast<std::size_t>(v));
    }
    if (grid.empty()) throw Error(Errc::ConfigInvalid, "N grid is empty");
    return grid;
}

int cmd_attack_sweep(const CommonFlags& flags, const SweepFlags& sf) {
    const RunConfig rc = flags.resolve();
    const auto grid = parse_grid(sf.grid);
    if (sf.reps < 1) throw Error(Errc::ConfigInvalid, "--reps must be >= 1");
    const protocol::ScreenModel model(rc.commit.geometry);
    const protocol::Strategy strategy = rc.make_strategy();

    std::ostringstream csv;
    csv << "N,strategy,acceptances,reps,estimate,ci_low,ci_high\n";
    for (std::size_t n : grid) {
        protocol::CommitConfig c = rc.commit;
        c.n_detections = n;
        const auto point = protocol::attack_sweep(c, strategy, sf.reps, model, rc.thresholds, sf.threads);
        csv << n << ',' << protocol::to_string(strategy.kind) << ',' << point.acceptances << ','
            << point.repetitions << ',' << format_double(point.estimate) << ','
            << format_double(point.ci.low) << ',' << format_double(point.ci.high) << '\n';
    }
    std::cout << csv.str();
    if (!sf.csv_path.empty()) {
        auto out = open_out(sf.csv_path);
        out << csv.str();
    }
    return kExitOk;
}

struct PatternFlags {
    double separation_ratio = 10.0;
    double halfwidth = 2.0;
    std::size_t grid_nodes = 4001;
    std::string which = "both";
    std::string out_dir;
};

void write_pattern(std::ostream& out, const optics::ScreenPdf& pdf) {
    out << "x,density\n";
    for (std::size_t i = 0; i < pdf.grid().size(); ++i) {
        out << format_double(pdf.grid()[i]) << ',' << format_double(pdf.density()[i]) << '\n';
    }
}

int cmd_pattern(const PatternFlags& pf) {
    optics::SlitGeometry geom;
    geom.slit_separation = pf.separation_ratio * geom.slit_width;
    geom.screen_halfwidth = pf.halfwidth;
    geom.grid_nodes = pf.grid_nodes;
    try {
        geom.validate();
    } catch (const Error& e) {
        throw Error(Errc::ConfigInvalid, e.what());
    }
    if (pf.which != "both" && pf.which != "envelope" && pf.which != "doubleslit") {
        throw Error(Errc::ConfigInvalid, "--which must be envelope, doubleslit or both");
    }
    const auto envelope = optics::envelope_pdf(geom);
    const auto doubleslit = optics::doubleslit_pdf(geom);
    if (pf.out_dir.empty()) {
        if (pf.which == "both") throw Error(Errc::ConfigInvalid, "printing to stdout needs --which");
        write_pattern(std::cout, pf.which == "envelope" ? envelope : doubleslit);
        return kExitOk;
    }
    ensure_dir(pf.out_dir);
    if (pf.which != "doubleslit") {
        auto out = open_out(fs::path(pf.out_dir) / "envelope.csv");
        write_pattern(out, envelope);
    }
    if (pf.which != "envelope") {
        auto out = open_out(fs::path(pf.out_dir) / "doubleslit.csv");
        write_pattern(out, doubleslit);
    }
    std::cout << "wrote " << geom.grid_nodes << " rows per pattern to " << pf.out_dir << '\n';
    return kExitOk;
}

struct NogoFlags {
    std::size_t pairs = 10;
    std::uint64_t seed = 0;
    std::string out_dir;
};

int cmd_nogo(const NogoFlags& nf) {
    struct Row {
        std::string name;
        nogo::ToyCommitment tc;
    };
    std::vector<Row> rows{{"bell-vs-swapped-bell", nogo::bell_pair()},
                          {"protocol-analog", nogo::protocol_analog_pair()},
                          {"non-concealing", nogo::non_concealing_pair()}};
    Rng rng(derive_seed(nf.seed, {0x6e6f676fULL}));
    for (std::size_t i = 0; i < nf.pairs; ++i) {
        const quantum::BipartiteDims dims{2 + i % 3, 2 + (i / 3) % 3};
        if (i % 2 == 0) {
            rows.push_back({"random-concealing-" + std::to_string(i), nogo::random_concealing_pair(rng, dims)});
        } else {
            rows.push_back({"random-perturbed-" + std::to_string(i),
                            nogo::random_perturbed_pair(rng, dims, 0.1, 1e-3)});
        }
    }

    std::ostringstream jsonl;
    jsonl << Json{{"type", "header"}, {"view", "nogo-demo"}, {"seed", nf.seed}, {"pairs", rows.size()}}.dump()
          << '\n';
    std::printf("%-26s %6s %14s %-18s %12s\n", "pair", "dims", "gap", "attack", "residual");
    for (const auto& row : rows) {
        const double gap = nogo::concealing_gap(row.tc);
        const auto result = nogo::mount_attack(row.tc);
        const auto dims = row.tc.dims();
        Json rec{{"type", "pair"}, {"name", row.name}, {"dim_a", dims.a}, {"dim_b", dims.b}, {"gap", gap}};
        std::string status;
        double residual = 0.0;
        if (const auto* ok = std::get_if<nogo::AttackSuccess>(&result)) {
            status = "unitary-found";
            residual = ok->residual;
            rec["attack"] = status;
            rec["residual"] = residual;
        } else {
            status = "impossible";
            rec["attack"] = status;
            rec["residual"] = nullptr;
        }
        jsonl << rec.dump() << '\n';
        const std::string dim_text = std::to_string(dims.a) + "x" + std::to_string(dims.b);
        char residual_text[32] = "-";
        if (status != "impossible") std::snprintf(residual_text, sizeof residual_text, "%.3e", residual);
        std::printf("%-26s %6s %14.6e %-18s %12s\n", row.name.c_str(), dim_text.c_str(), gap, status.c_str(),
                    residual_text);
    }
    if (!nf.out_dir.empty()) {
        ensure_dir(nf.out_dir);
        auto out = open_out(fs::path(nf.out_dir) / "nogo.jsonl");
        out << jsonl.str();
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Double-slit bit commitment simulator"};
    app.require_subcommand(1);

    CommonFlags sim_flags;
    auto* simulate = app.add_subcommand("simulate", "Run commit and unveil, write transcripts");
    sim_flags.attach(simulate);

    CommonFlags verify_common;
    VerifyFlags verify_flags;
    auto* verify = app.add_subcommand("verify", "Check an unveil message against Bob's transcript");
    verify_common.attach(verify);
    verify->add_option("--bob", verify_flags.bob_path, "Bob-private transcript (bob.jsonl)")->required();
    verify->add_option("--unveil", verify_flags.unveil_path, "Unveil message (unveil.jsonl)")->required();
    verify->add_option("--report", verify_flags.report_path, "Report output path");

    CommonFlags sweep_common;
    SweepFlags sweep_flags;
    auto* sweep = app.add_subcommand("attack-sweep", "Acceptance probability versus N");
    sweep_common.attach(sweep);
    sweep->add_option("--grid", sweep_flags.grid, "Comma-separated N values");
    sweep->add_option("--reps", sweep_flags.reps, "Repetitions per N");
    sweep->add_option("--threads", sweep_flags.threads, "Worker threads (0 = hardware)");
    sweep->add_option("--csv", sweep_flags.csv_path, "Also write the CSV here");

    PatternFlags pattern_flags;
    auto* pattern = app.add_subcommand("pattern", "Screen densities as CSV");
    pattern->add_option("--separation-ratio", pattern_flags.separation_ratio, "d / a");
    pattern->add_option("--halfwidth", pattern_flags.halfwidth, "Screen half-width W in units of lambda D / a");
    pattern->add_option("--grid-nodes", pattern_flags.grid_nodes, "Grid size");
    pattern->add_option("--which", pattern_flags.which, "envelope | doubleslit | both");
    pattern->add_option("--out-dir", pattern_flags.out_dir, "Write envelope.csv / doubleslit.csv here");

    NogoFlags nogo_flags;
    auto* nogo_cmd = app.add_subcommand("nogo-demo", "Local-unitary attack on toy commitments");
    nogo_cmd->add_option("--pairs", nogo_flags.pairs, "Random pairs after the fixed examples");
    nogo_cmd->add_option("--seed", nogo_flags.seed, "Seed for random pairs");
    nogo_cmd->add_option("--out-dir", nogo_flags.out_dir, "Write nogo.jsonl here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*simulate) return cmd_simulate(sim_flags);
        if (*verify) return cmd_verify(verify_common, verify_flags);
        if (*sweep) return cmd_attack_sweep(sweep_common, sweep_flags);
        if (*pattern) return cmd_pattern(pattern_flags);
        if (*nogo_cmd) return cmd_nogo(nogo_flags);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
