// Copyright 2026 The qbc-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "qbc/protocol.hpp"

namespace qbc {

using Json = nlohmann::ordered_json;

/// Everything a CLI run needs. Serializes to a JSON object with a fixed key
/// order, so serialize -> parse -> serialize is byte-stable.
struct RunConfig {
    protocol::CommitConfig commit{};
    protocol::Thresholds thresholds{};
    protocol::StrategyKind strategy = protocol::StrategyKind::Honest;
    protocol::CommitBit bit = protocol::CommitBit::Zero;
    std::string out_dir = ".";

    protocol::Strategy make_strategy() const { return protocol::make_strategy(strategy, bit); }

    void validate() const {
        commit.validate();
        thresholds.validate();
    }
};

inline Json geometry_to_json(const optics::SlitGeometry& g) {
    return Json{{"slit_width", g.slit_width},
                {"slit_separation", g.slit_separation},
                {"wavelength", g.wavelength},
                {"screen_distance", g.screen_distance},
                {"screen_halfwidth", g.screen_halfwidth},
                {"grid_nodes", g.grid_nodes}};
}

/// Fields common to every transcript header; nothing here depends on the bit.
inline Json public_config_json(const protocol::CommitConfig& c) {
    return Json{{"n", c.n_detections},
                {"particle", c.species.name},
                {"half_life", c.species.half_life},
                {"k", c.deadline.multiplier},
                {"geometry", geometry_to_json(c.geometry)},
                {"mean_interarrival_half_lives", c.mean_interarrival_half_lives},
                {"transit_latency", c.transit_latency},
                {"seed", c.seed}};
}

inline Json thresholds_to_json(const protocol::Thresholds& t) {
    return Json{{"alpha", t.alpha},
                {"epsilon", t.epsilon},
                {"min_events", t.min_events},
                {"fringe_regions", t.fringe_regions},
                {"balance_sigmas", t.balance_sigmas}};
}

inline Json to_json(const RunConfig& rc) {
    Json j = public_config_json(rc.commit);
    j["thresholds"] = thresholds_to_json(rc.thresholds);
    j["strategy"] = protocol::to_string(rc.strategy);
    j["bit"] = protocol::to_int(rc.bit);
    j["out_dir"] = rc.out_dir;
    return j;
}

namespace detail {

template <typename T>
void read_if(const Json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace detail

/// Overlays the keys present in `j` onto `base`. Throws ConfigInvalid on
/// wrong types or unknown names.
inline RunConfig from_json(const Json& j, RunConfig base = {}) {
    try {
        if (!j.is_object()) throw Error(Errc::ConfigInvalid, "config must be a JSON object");
        auto& c = base.commit;
        detail::read_if(j, "n", c.n_detections);
        std::string particle = c.species.name;
        double half_life = c.species.half_life;
        detail::read_if(j, "particle", particle);
        detail::read_if(j, "half_life", half_life);
        if (particle == "custom" || j.contains("half_life")) {
            c.species = decay::ParticleSpecies(particle, half_life);
        } else {
            c.species = decay::species_by_name(particle);
        }
        if (j.contains("k")) c.deadline = decay::DeadlinePolicy(j.at("k").get<double>());
        if (j.contains("geometry")) {
            const Json& g = j.at("geometry");
            detail::read_if(g, "slit_width", c.geometry.slit_width);
            detail::read_if(g, "slit_separation", c.geometry.slit_separation);
            detail::read_if(g, "wavelength", c.geometry.wavelength);
            detail::read_if(g, "screen_distance", c.geometry.screen_distance);
            detail::read_if(g, "screen_halfwidth", c.geometry.screen_halfwidth);
            detail::read_if(g, "grid_nodes", c.geometry.grid_nodes);
        }
        detail::read_if(j, "mean_interarrival_half_lives", c.mean_interarrival_half_lives);
        detail::read_if(j, "transit_latency", c.transit_latency);
        detail::read_if(j, "seed", c.seed);
        if (j.contains("thresholds")) {
            const Json& t = j.at("thresholds");
            detail::read_if(t, "alpha", base.thresholds.alpha);
            detail::read_if(t, "epsilon", base.thresholds.epsilon);
            detail::read_if(t, "min_events", base.thresholds.min_events);
            detail::read_if(t, "fringe_regions", base.thresholds.fringe_regions);
            detail::read_if(t, "balance_sigmas", base.thresholds.balance_sigmas);
        }
        if (j.contains("strategy")) {
            auto kind = protocol::strategy_kind_from_string(j.at("strategy").get<std::string>());
            if (!kind) throw Error(Errc::ConfigInvalid, "unknown strategy");
            base.strategy = *kind;
        }
        if (j.contains("bit")) base.bit = protocol::bit_from_int(j.at("bit").get<int>());
        detail::read_if(j, "out_dir", base.out_dir);
    } catch (const Json::exception& e) {
        throw Error(Errc::ConfigInvalid, e.what());
    } catch (const Error& e) {
        if (e.code() == Errc::ConfigInvalid) throw;
        throw Error(Errc::ConfigInvalid, e.what());
    }
    return base;
}

inline RunConfig load_config(const std::string& path, RunConfig base = {}) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::ConfigInvalid, "cannot open config " + path);
    try {
        return from_json(Json::parse(in), std::move(base));
    } catch (const Json::exception& e) {
        throw Error(Errc::ConfigInvalid, e.what());
    }
}

}  // namespace qbc
