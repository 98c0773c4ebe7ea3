#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgi/constants.hpp"
#include "sgi/quantum_solver.hpp"
#include "sgi/sequencer.hpp"
#include "sgi/wavepacket_dynamics.hpp"

namespace sgi {

using json = nlohmann::json;

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    json j;
    in >> j;
    return j;
}

/// FNV-1a over the canonical (sorted-key, no-whitespace) JSON dump; stamped
/// into every CSV header so outputs are traceable to their inputs.
inline std::uint64_t config_hash(const json& j) {
    const std::string s = j.dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

struct Scenario {
    std::string label;
    bool is_full_loop = false;
    HalfLoopScenario half;
    FullLoopSequence full;
    ChipGeometry geom;
    double z_trap = 95 * units::um;
    FluctuationSpec noise;
    double eps = 0.0;  // random-vector strength for the quantum model
    NoiseCorrelation corr = NoiseCorrelation::Infinite;
    std::uint64_t seed = 1;
};

/// Parse the scenario list. Schema per entry:
///   {"label": str, "type": "half"|"full", "times_us": {...},
///    "current_mA": num, "z_trap_um": num, "scheme": "spin"|"current",
///    "noise": {"eta": num, "phase_rms_rad": num, "position_rms_um": num,
///              "eps": num, "correlation": "zero"|"infinite"}, "seed": int}
inline std::vector<Scenario> load_scenarios(const json& root) {
    if (!root.contains("scenarios") || !root["scenarios"].is_array())
        throw std::runtime_error("load_scenarios: missing 'scenarios' array");
    std::vector<Scenario> out;
    for (const auto& e : root["scenarios"]) {
        Scenario sc;
        sc.label = e.at("label").get<std::string>();
        const std::string type = e.at("type").get<std::string>();
        if (type != "half" && type != "full")
            throw std::runtime_error("scenario '" + sc.label + "': unknown type '" + type + "'");
        sc.is_full_loop = (type == "full");

        if (e.contains("current_mA")) sc.geom.current = e["current_mA"].get<double>() * units::mA;
        if (e.contains("z_trap_um")) sc.z_trap = e["z_trap_um"].get<double>() * units::um;
        if (e.contains("seed")) sc.seed = e["seed"].get<std::uint64_t>();

        const auto& t = e.at("times_us");
        auto tu = [&](const char* key, double fallback) {
            return t.contains(key) ? t[key].get<double>() * units::us : fallback;
        };
        if (!sc.is_full_loop) {
            sc.half.t1 = tu("T1", sc.half.t1);
            sc.half.td = tu("Td", sc.half.td);
            sc.half.t2 = tu("T2", sc.half.t2);
            sc.half.tof = tu("TOF", sc.half.tof);
            sc.half.current = sc.geom.current;
            sc.half.kappa = differential_kick_rate_chip_only(sc.geom, sc.z_trap);
        } else {
            sc.full.t1 = tu("T1", sc.full.t1);
            sc.full.td1 = tu("Td1", sc.full.td1);
            sc.full.t2 = tu("T2", sc.full.t2);
            sc.full.t3 = tu("T3", sc.full.t3);
            sc.full.td2 = tu("Td2", sc.full.td2);
            sc.full.t4 = tu("T4", sc.full.t4);
            if (e.contains("scheme")) {
                const std::string s = e["scheme"].get<std::string>();
                if (s == "spin")
                    sc.full.scheme = LoopScheme::SpinInversion;
                else if (s == "current")
                    sc.full.scheme = LoopScheme::CurrentInversion;
                else
                    throw std::runtime_error("scenario '" + sc.label + "': unknown scheme '" + s +
                                             "'");
            }
        }

        if (e.contains("noise")) {
            const auto& nz = e["noise"];
            if (nz.contains("eta")) sc.noise.current_rel = nz["eta"].get<double>();
            if (nz.contains("phase_rms_rad")) sc.noise.phase_rms = nz["phase_rms_rad"].get<double>();
            if (nz.contains("position_rms_um"))
                sc.noise.position_rms = nz["position_rms_um"].get<double>() * units::um;
            if (nz.contains("eps")) sc.eps = nz["eps"].get<double>();
            if (nz.contains("correlation")) {
                const std::string c = nz["correlation"].get<std::string>();
                if (c == "zero")
                    sc.corr = NoiseCorrelation::Zero;
                else if (c == "infinite")
                    sc.corr = NoiseCorrelation::Infinite;
                else
                    throw std::runtime_error("scenario '" + sc.label +
                                             "': unknown correlation '" + c + "'");
            }
        }
        out.push_back(std::move(sc));
    }
    return out;
}

}  // namespace sgi
