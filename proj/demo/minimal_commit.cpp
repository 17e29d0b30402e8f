// Copyright 2026 The qbc-sim Authors
// SPDX-License-Identifier: Apache-2.0

// Commit to a bit with 600 muons, unveil honestly, and let Bob check.

#include <iostream>

#include "qbc/qbc.hpp"

int main() {
    using namespace qbc;
    protocol::CommitConfig config;
    config.n_detections = 600;
    config.species = decay::muon();
    config.seed = 42;

    const protocol::ScreenModel model(config.geometry);
    const auto run = protocol::run_protocol(config, protocol::Strategy::honest(protocol::CommitBit::Zero),
                                            model, protocol::Thresholds{});
    std::cout << "emitted " << run.transcript.trials.size() << " particles, commit phase ends at "
              << run.transcript.commit_end_time << " s\n";
    for (const auto& t : run.report.tests) {
        std::cout << "  " << t.name << ": p = " << t.value << (t.passed ? " (pass)" : " (fail)") << '\n';
    }
    std::cout << (run.report.accepted ? "Bob accepts" : "Bob rejects") << '\n';
}
