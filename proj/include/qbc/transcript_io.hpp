// Copyright 2026 The qbc-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// JSON-lines persistence. Every file starts with a header record
// ({"type": "header" | "unveil" | "report", ...}) followed by one record per
// line. Transcripts are split into public, Bob-private and Alice-private files.

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "qbc/config.hpp"
#include "qbc/protocol.hpp"

namespace qbc::io {

using protocol::AliceTrial;
using protocol::BobTrial;
using protocol::PublicTrial;

inline constexpr int kFormatVersion = 1;

inline Json summary_json(const protocol::Transcript& t) {
    return Json{{"n_trials", t.trials.size()},
                {"n_detected", t.n_detected},
                {"last_detection", t.last_detection},
                {"commit_end_time", t.commit_end_time}};
}

inline Json header(const protocol::Transcript& t, const char* view) {
    Json h{{"type", "header"}, {"version", kFormatVersion}, {"view", view}};
    h["config"] = public_config_json(t.config);
    h["summary"] = summary_json(t);
    return h;
}

inline Json record_to_json(const protocol::AliceRecord& r) {
    using namespace protocol;
    if (const auto* p = std::get_if<Position>(&r)) return Json{{"kind", "position"}, {"x", p->x}};
    if (const auto* w = std::get_if<WhichSlit>(&r)) return Json{{"kind", "which_slit"}, {"slit", to_string(w->slit)}};
    if (const auto* h = std::get_if<Held>(&r)) {
        return Json{{"kind", "held"}, {"state", to_string(h->state)}, {"lifetime", h->lifetime}};
    }
    if (const auto* g = std::get_if<Routed>(&r)) return Json{{"kind", "routed"}, {"guessed_double", g->guessed_double}};
    return Json{{"kind", "none"}};
}

inline void write_public(std::ostream& out, const protocol::Transcript& t) {
    out << header(t, "public").dump() << '\n';
    for (const auto& p : t.public_view()) {
        out << Json{{"type", "trial"}, {"index", p.index}, {"detected", p.detected},
                    {"announce_time", p.announce_time}}.dump()
            << '\n';
    }
}

inline void write_bob(std::ostream& out, const protocol::Transcript& t) {
    out << header(t, "bob").dump() << '\n';
    for (const auto& b : t.bob_view()) {
        out << Json{{"type", "trial"}, {"index", b.index}, {"emit_time", b.emit_time},
                    {"setting", protocol::to_string(b.setting)}, {"detected", b.detected},
                    {"announce_time", b.announce_time}}.dump()
            << '\n';
    }
}

inline void write_alice(std::ostream& out, const protocol::Transcript& t) {
    Json h = header(t, "alice");
    h["strategy"] = protocol::to_string(t.strategy.kind);
    h["unveil_bit"] = protocol::to_int(t.strategy.unveil_bit);
    out << h.dump() << '\n';
    for (const auto& a : t.alice_view()) {
        out << Json{{"type", "trial"}, {"index", a.index}, {"detected", a.detected},
                    {"record", record_to_json(a.record)}}.dump()
            << '\n';
    }
}

inline void write_unveil(std::ostream& out, const protocol::UnveilMessage& msg) {
    out << Json{{"type", "unveil"}, {"version", kFormatVersion}, {"bit", protocol::to_int(msg.bit)},
                {"n_records", msg.records.size()}}.dump()
        << '\n';
    for (const auto& d : msg.records) {
        Json r{{"type", "record"}, {"index", d.index}};
        if (const double* x = std::get_if<double>(&d.value)) {
            r["position"] = *x;
        } else {
            r["slit"] = protocol::to_string(std::get<protocol::Slit>(d.value));
        }
        out << r.dump() << '\n';
    }
}

inline Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline void write_report(std::ostream& out, const protocol::VerificationReport& rep) {
    out << Json{{"type", "report"}, {"version", kFormatVersion}, {"bit", protocol::to_int(rep.bit)},
                {"accepted", rep.accepted}, {"n_tests", rep.tests.size()}}.dump()
        << '\n';
    for (const auto& t : rep.tests) {
        out << Json{{"type", "test"}, {"name", t.name}, {"events", t.events},
                    {"statistic", finite_or_null(t.statistic)}, {"value", finite_or_null(t.value)},
                    {"threshold", t.threshold}, {"passed", t.passed}, {"warning", t.warning}}.dump()
            << '\n';
    }
}

// ---------------------------------------------------------------------------
// Reading

namespace detail {

inline std::vector<Json> read_lines(std::istream& in, const std::string& what) {
    std::vector<Json> lines;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.empty()) continue;
        try {
            lines.push_back(Json::parse(line));
        } catch (const Json::exception& e) {
            throw Error(Errc::Parse, what + " line " + std::to_string(number) + ": " + e.what());
        }
    }
    if (lines.empty()) throw Error(Errc::Parse, what + " is empty");
    return lines;
}

template <typename F>
auto guarded(const std::string& what, F&& f) {
    try {
        return f();
    } catch (const Json::exception& e) {
        throw Error(Errc::Parse, what + ": " + e.what());
    }
}

}  // namespace detail

struct BobFile {
    Json header;
    std::vector<BobTrial> trials;
};

inline BobFile read_bob(std::istream& in) {
    auto lines = detail::read_lines(in, "bob transcript");
    return detail::guarded("bob transcript", [&] {
        BobFile f;
        f.header = lines.front();
        if (f.header.at("type") != "header" || f.header.at("view") != "bob") {
            throw Error(Errc::Parse, "not a Bob-private transcript");
        }
        const auto expected = f.header.at("summary").at("n_trials").get<std::size_t>();
        for (std::size_t i = 1; i < lines.size(); ++i) {
            const Json& r = lines[i];
            BobTrial t;
            t.index = r.at("index").get<std::size_t>();
            t.emit_time = r.at("emit_time").get<double>();
            auto s = protocol::setting_from_string(r.at("setting").get<std::string>());
            if (!s) throw Error(Errc::Parse, "unknown slit setting");
            t.setting = *s;
            t.detected = r.at("detected").get<bool>();
            t.announce_time = r.at("announce_time").get<double>();
            f.trials.push_back(t);
        }
        if (f.trials.size() != expected) {
            throw Error(Errc::Parse, "bob transcript truncated: " + std::to_string(f.trials.size()) +
                                         " of " + std::to_string(expected) + " trials");
        }
        return f;
    });
}

inline protocol::UnveilMessage read_unveil(std::istream& in) {
    auto lines = detail::read_lines(in, "unveil message");
    return detail::guarded("unveil message", [&] {
        const Json& h = lines.front();
        if (h.at("type") != "unveil") throw Error(Errc::Parse, "not an unveil message");
        protocol::UnveilMessage msg;
        msg.bit = protocol::bit_from_int(h.at("bit").get<int>());
        const auto expected = h.at("n_records").get<std::size_t>();
        for (std::size_t i = 1; i < lines.size(); ++i) {
            const Json& r = lines[i];
            protocol::Disclosure d;
            d.index = r.at("index").get<std::size_t>();
            if (r.contains("position")) {
                d.value = r.at("position").get<double>();
            } else {
                auto s = protocol::slit_from_string(r.at("slit").get<std::string>());
                if (!s) throw Error(Errc::Parse, "slit label must be L or R");
                d.value = *s;
            }
            msg.records.push_back(d);
        }
        if (msg.records.size() != expected) {
            throw Error(Errc::Parse, "unveil message truncated: " + std::to_string(msg.records.size()) +
                                         " of " + std::to_string(expected) + " records");
        }
        return msg;
    });
}

inline std::vector<PublicTrial> read_public(std::istream& in) {
    auto lines = detail::read_lines(in, "public transcript");
    return detail::guarded("public transcript", [&] {
        if (lines.front().at("view") != "public") throw Error(Errc::Parse, "not a public transcript");
        std::vector<PublicTrial> out;
        for (std::size_t i = 1; i < lines.size(); ++i) {
            out.push_back({lines[i].at("index").get<std::size_t>(), lines[i].at("detected").get<bool>(),
                           lines[i].at("announce_time").get<double>()});
        }
        return out;
    });
}

template <typename Reader>
auto read_file(const std::string& path, Reader&& reader) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::Parse, "cannot open " + path);
    return reader(in);
}

}  // namespace qbc::io
