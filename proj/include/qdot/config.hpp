#pragma once

// Run configuration: a single JSON file (config_version 1) with
// geometry, scan, dynamics, bath, detector, budget and output
// sections.  Built-in presets seed the defaults; any key can be
// overridden from the environment with QDOT_<section>__<key>=value.

#include <cstdlib>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qdot/calibration.hpp"
#include "qdot/device.hpp"
#include "qdot/io.hpp"
#include "qdot/parallel.hpp"
#include "qdot/presets.hpp"

extern "C" char** environ;

namespace qdot {

using nlohmann::json;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ScanSettings {
    double bias_lo_v = 0.0;
    double bias_hi_v = 0.185;
    double bias_step_v = 1e-3;       // coarse grid for the exported map
    double fine_bias_step_v = 1e-5;  // grid inside the delocalization windows
    BiasInterval calibration_bracket{0.12, 0.19};
};

struct DynamicsSettings {
    double barrier_height_ev = 3.1;  // V0
    double well_width_nm = 5.0;      // l_w, average dot width
    double barrier_width_nm = 1.5;   // l_d, inter-dot barrier
    double effective_mass = 0.2;
    // incident energy for the tunneling estimate; <= 0 solves the
    // single averaged well and uses its ground level
    double incident_energy_ev = 0.0;
};

struct BudgetSettings {
    double hbar_delta_ev = 1e-5;  // tunneling matrix element, eV
    double gate_time_s = 5.2e-12;
};

struct OutputSettings {
    std::string dir = "out";
    std::string cache_dir;  // empty: <dir>/cache
};

struct RunConfig {
    int config_version = 1;
    QubitGeometry geometry;
    ScanSettings scan;
    CalibrationOptions solver;
    DynamicsSettings dynamics;
    BathParameters bath;
    DetectorParameters detector;
    BudgetSettings budget;
    OutputSettings output;
    int threads = 0;  // 0: hardware concurrency

    int effective_threads() const { return threads > 0 ? threads : default_threads(); }
    std::filesystem::path out_dir() const { return output.dir; }
    std::filesystem::path cache_dir() const {
        return output.cache_dir.empty() ? out_dir() / "cache" : std::filesystem::path(output.cache_dir);
    }
};

namespace detail {

template <typename T>
T field(const json& j, const std::string& pointer) {
    try {
        return j.at(json::json_pointer(pointer)).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("config key " + pointer + ": " + e.what());
    }
}

template <typename T>
T field_or(const json& j, const std::string& pointer, T fallback) {
    const json::json_pointer p(pointer);
    if (!j.contains(p)) return fallback;
    return field<T>(j, pointer);
}

inline LayerKind layer_kind(const std::string& s, const std::string& where) {
    if (s == "channel_contact") return LayerKind::channel_contact;
    if (s == "barrier") return LayerKind::barrier;
    if (s == "dot_a") return LayerKind::dot_a;
    if (s == "dot_b") return LayerKind::dot_b;
    if (s == "gate_contact") return LayerKind::gate_contact;
    throw ConfigError("config key " + where + ": unknown layer kind \"" + s + "\"");
}

}  // namespace detail

// ---- presets ---------------------------------------------------------------

inline json geometry_to_json(const QubitGeometry& g) {
    json layers = json::array();
    for (const auto& l : g.layers)
        layers.push_back(json{{"kind", to_string(l.kind)},
                              {"thickness_nm", l.thickness_nm},
                              {"band_offset_ev", l.band_offset_ev},
                              {"effective_mass", l.effective_mass}});
    return json{{"dielectric_constant", g.dielectric_constant},
                {"layers", layers},
                {"distances_nm",
                 json{{"aa", g.distances.aa_nm},
                      {"ab", g.distances.ab_nm},
                      {"ba", g.distances.ba_nm},
                      {"bb", g.distances.bb_nm}}}};
}

inline json bath_to_json(const BathParameters& b) {
    return json{{"deformation_potential_ev", b.deformation_potential_ev},
                {"sound_velocity_m_s", b.sound_velocity_m_s},
                {"mass_density_kg_m3", b.mass_density_kg_m3},
                {"lattice_constant_m", b.lattice_constant_m},
                {"coupling_ratio", b.coupling_ratio},
                {"debye_temperature_k", b.debye_temperature_k}};
}

inline json detector_to_json(const DetectorParameters& d) {
    return json{{"transconductance_s", d.transconductance_s},
                {"operating_current_a", d.operating_current_a},
                {"inter_dot_distance_nm", d.inter_dot_distance_nm},
                {"dielectric_constant", d.dielectric_constant},
                {"area_per_dot_nm2", d.area_per_dot_nm2}};
}

// Complete configuration for a named preset.  "default": the
// Si/SiO2 nanocrystal stack at 20 nm lateral spacing; "close-packed":
// the same stack at 15 nm, which roughly doubles the control-state
// selectivity of the gate.
inline json config_from_preset(const std::string& name) {
    double spacing = 20.0;
    if (name == "close-packed")
        spacing = 15.0;
    else if (name != "default")
        throw ConfigError("unknown preset \"" + name + "\" (have: default, close-packed)");
    json j;
    j["config_version"] = 1;
    j["geometry"] = geometry_to_json(presets::qubit_stack(spacing));
    j["scan"] = json{{"bias_lo_v", 0.0},
                     {"bias_hi_v", 0.185},
                     {"bias_step_v", 1e-3},
                     {"fine_bias_step_v", 1e-5},
                     {"calibration_bracket_v", json{0.12, 0.19}}};
    j["solver"] = json{{"n_mesh", 1000},
                       {"coarse_step_ev", 2e-4},
                       {"fine_step_ev", 1e-6},
                       {"refine_tol_ev", 1e-9},
                       {"energy_floor_ev", 2e-3},
                       {"energy_rel_lo_ev", 8e-3},
                       {"energy_rel_hi_ev", 0.16},
                       {"localization_threshold", 0.98},
                       {"bias_tol_v", 1e-5},
                       {"coarse_bias_step_v", 1e-3}};
    j["dynamics"] = json{{"barrier_height_ev", 3.1},
                         {"well_width_nm", 5.0},
                         {"barrier_width_nm", 1.5},
                         {"effective_mass", 0.2},
                         {"incident_energy_ev", 0.0}};
    j["bath"] = json{{"preset", "a-SiO2"}};
    j["detector"] = json{{"preset", "guo-fet"}};
    j["budget"] = json{{"hbar_delta_ev", 1e-5}, {"gate_time_s", 5.2e-12}};
    j["output"] = json{{"dir", "out"}};
    j["threads"] = 0;
    return j;
}

// Named preset as the base when given; explicit keys override single
// fields, and without a preset every field is required.
inline BathParameters bath_from_json(const json& b) {
    BathParameters p;
    bool have_base = false;
    if (b.contains("preset")) {
        const auto name = b.at("preset").get<std::string>();
        if (name != "a-SiO2") throw ConfigError("config key /bath/preset: unknown preset \"" +
                                                name + "\" (have: a-SiO2)");
        p = presets::a_sio2_bath();
        have_base = true;
    }
    auto pick = [&](const char* key, double& dst) {
        if (b.contains(key))
            dst = detail::field<double>(b, std::string("/") + key);
        else if (!have_base)
            throw ConfigError(std::string("config key /bath/") + key + ": required");
    };
    pick("deformation_potential_ev", p.deformation_potential_ev);
    pick("sound_velocity_m_s", p.sound_velocity_m_s);
    pick("mass_density_kg_m3", p.mass_density_kg_m3);
    pick("lattice_constant_m", p.lattice_constant_m);
    pick("coupling_ratio", p.coupling_ratio);
    pick("debye_temperature_k", p.debye_temperature_k);
    return p;
}

inline DetectorParameters detector_from_json(const json& d) {
    DetectorParameters p;
    bool have_base = false;
    if (d.contains("preset")) {
        const auto name = d.at("preset").get<std::string>();
        if (name != "guo-fet")
            throw ConfigError("config key /detector/preset: unknown preset \"" + name +
                              "\" (have: guo-fet)");
        p = presets::guo_fet_detector();
        have_base = true;
    }
    auto pick = [&](const char* key, double& dst) {
        if (d.contains(key))
            dst = detail::field<double>(d, std::string("/") + key);
        else if (!have_base)
            throw ConfigError(std::string("config key /detector/") + key + ": required");
    };
    pick("transconductance_s", p.transconductance_s);
    pick("operating_current_a", p.operating_current_a);
    pick("inter_dot_distance_nm", p.inter_dot_distance_nm);
    pick("dielectric_constant", p.dielectric_constant);
    pick("area_per_dot_nm2", p.area_per_dot_nm2);
    return p;
}

// Applies QDOT_<path>__<to>__<key>=<value> environment overrides onto
// the configuration; values parse as JSON scalars, falling back to
// strings.
inline void apply_env_overrides(json& j) {
    for (char** e = environ; e && *e; ++e) {
        const std::string entry(*e);
        if (entry.rfind("QDOT_", 0) != 0) continue;
        const auto eq = entry.find('=');
        if (eq == std::string::npos) continue;
        std::string key = entry.substr(5, eq - 5);
        const std::string value = entry.substr(eq + 1);
        std::string pointer;
        std::size_t pos = 0;
        while (pos < key.size()) {
            const auto sep = key.find("__", pos);
            pointer += "/" + key.substr(pos, sep == std::string::npos ? sep : sep - pos);
            pos = sep == std::string::npos ? key.size() : sep + 2;
        }
        json parsed;
        try {
            parsed = json::parse(value);
        } catch (const json::exception&) {
            parsed = value;
        }
        try {
            j[json::json_pointer(pointer)] = parsed;
        } catch (const json::exception& e2) {
            throw ConfigError("environment override " + entry + ": " + e2.what());
        }
    }
}

// Parses and validates the effective configuration.
inline RunConfig load_config(const json& j) {
    RunConfig c;
    c.config_version = detail::field<int>(j, "/config_version");
    if (c.config_version != 1)
        throw ConfigError("config key /config_version: unsupported version " +
                          std::to_string(c.config_version));

    const json& layers = j.at(json::json_pointer("/geometry/layers"));
    if (!layers.is_array() || layers.empty())
        throw ConfigError("config key /geometry/layers: non-empty array required");
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const std::string base = "/geometry/layers/" + std::to_string(i);
        Layer l;
        l.kind = detail::layer_kind(detail::field<std::string>(j, base + "/kind"), base + "/kind");
        l.thickness_nm = detail::field<double>(j, base + "/thickness_nm");
        l.band_offset_ev = detail::field<double>(j, base + "/band_offset_ev");
        l.effective_mass = detail::field<double>(j, base + "/effective_mass");
        c.geometry.layers.push_back(l);
    }
    c.geometry.dielectric_constant = detail::field<double>(j, "/geometry/dielectric_constant");
    c.geometry.distances.aa_nm = detail::field<double>(j, "/geometry/distances_nm/aa");
    c.geometry.distances.ab_nm = detail::field<double>(j, "/geometry/distances_nm/ab");
    c.geometry.distances.ba_nm = detail::field<double>(j, "/geometry/distances_nm/ba");
    c.geometry.distances.bb_nm = detail::field<double>(j, "/geometry/distances_nm/bb");
    try {
        validate(c.geometry);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config key /geometry: ") + e.what());
    }

    c.scan.bias_lo_v = detail::field<double>(j, "/scan/bias_lo_v");
    c.scan.bias_hi_v = detail::field<double>(j, "/scan/bias_hi_v");
    c.scan.bias_step_v = detail::field<double>(j, "/scan/bias_step_v");
    c.scan.fine_bias_step_v = detail::field<double>(j, "/scan/fine_bias_step_v");
    c.scan.calibration_bracket = {detail::field<double>(j, "/scan/calibration_bracket_v/0"),
                                  detail::field<double>(j, "/scan/calibration_bracket_v/1")};
    if (!(c.scan.bias_lo_v < c.scan.bias_hi_v))
        throw ConfigError("config key /scan: empty bias range");
    if (!(c.scan.bias_step_v > 0.0) || !(c.scan.fine_bias_step_v > 0.0))
        throw ConfigError("config key /scan: bias steps must be positive");

    c.solver.n_mesh = detail::field<std::size_t>(j, "/solver/n_mesh");
    c.solver.search.coarse_step_ev = detail::field<double>(j, "/solver/coarse_step_ev");
    c.solver.search.fine_step_ev = detail::field<double>(j, "/solver/fine_step_ev");
    c.solver.search.refine_tol_ev = detail::field<double>(j, "/solver/refine_tol_ev");
    c.solver.energy_floor_ev = detail::field<double>(j, "/solver/energy_floor_ev");
    c.solver.energy_rel_lo_ev = detail::field<double>(j, "/solver/energy_rel_lo_ev");
    c.solver.energy_rel_hi_ev = detail::field<double>(j, "/solver/energy_rel_hi_ev");
    c.solver.localization_threshold = detail::field<double>(j, "/solver/localization_threshold");
    c.solver.bias_tol_v = detail::field<double>(j, "/solver/bias_tol_v");
    c.solver.coarse_bias_step_v = detail::field<double>(j, "/solver/coarse_bias_step_v");
    if (!(c.solver.search.coarse_step_ev > 0.0) || !(c.solver.search.fine_step_ev > 0.0) ||
        !(c.solver.search.refine_tol_ev > 0.0))
        throw ConfigError("config key /solver: energy steps must be positive");

    c.dynamics.barrier_height_ev = detail::field<double>(j, "/dynamics/barrier_height_ev");
    c.dynamics.well_width_nm = detail::field<double>(j, "/dynamics/well_width_nm");
    c.dynamics.barrier_width_nm = detail::field<double>(j, "/dynamics/barrier_width_nm");
    c.dynamics.effective_mass = detail::field<double>(j, "/dynamics/effective_mass");
    c.dynamics.incident_energy_ev = detail::field<double>(j, "/dynamics/incident_energy_ev");

    c.bath = bath_from_json(j.at("bath"));
    try {
        validate(c.bath);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config key /bath: ") + e.what());
    }
    c.detector = detector_from_json(j.at("detector"));
    try {
        validate(c.detector);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config key /detector: ") + e.what());
    }

    c.budget.hbar_delta_ev = detail::field<double>(j, "/budget/hbar_delta_ev");
    c.budget.gate_time_s = detail::field<double>(j, "/budget/gate_time_s");
    if (!(c.budget.hbar_delta_ev > 0.0) || !(c.budget.gate_time_s > 0.0))
        throw ConfigError("config key /budget: hbar_delta_ev and gate_time_s must be positive");

    c.output.dir = detail::field_or<std::string>(j, "/output/dir", "out");
    c.output.cache_dir = detail::field_or<std::string>(j, "/output/cache_dir", "");
    c.threads = detail::field_or<int>(j, "/threads", 0);
    c.solver.threads = c.effective_threads();
    return c;
}

// preset -> optional file overlay -> environment overrides
inline json effective_config(const std::string& seed_preset,
                             const std::optional<std::filesystem::path>& config_file,
                             bool use_env = true) {
    json j = config_from_preset(seed_preset.empty() ? "default" : seed_preset);
    if (config_file) {
        std::ifstream in(*config_file);
        if (!in) throw ConfigError("cannot open config file " + config_file->string());
        json overlay;
        try {
            overlay = json::parse(in);
        } catch (const json::exception& e) {
            throw ConfigError("config file " + config_file->string() + ": " + e.what());
        }
        j.merge_patch(overlay);
    }
    if (use_env) apply_env_overrides(j);
    return j;
}

}  // namespace qdot
