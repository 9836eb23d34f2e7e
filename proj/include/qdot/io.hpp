#pragma once

// Output plumbing: CSV/JSON formatting conventions and JSON
// serialization of the report structures.
//
// CSV: decimal, 12 significant digits, '.' separator, '\n' newlines;
// the generation timestamp is isolated on the first header line so
// repeated runs stay byte-comparable.  JSON: pretty-printed, keys
// sorted (library default), infinities encoded as the string "inf".

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qdot/calibration.hpp"
#include "qdot/dynamics.hpp"
#include "qdot/environment.hpp"
#include "qdot/measurement.hpp"

namespace qdot::io {

using nlohmann::json;

inline std::string format_g12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline std::string iso8601_utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

class CsvWriter {
  public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns) {
        std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
        out_.open(path);
        if (!out_) throw std::runtime_error("cannot open " + path.string());
        out_ << "# generated " << iso8601_utc_now() << "\n";
        for (std::size_t i = 0; i < columns.size(); ++i)
            out_ << (i ? "," : "") << columns[i];
        out_ << "\n";
    }

    void row(const std::vector<double>& values) {
        for (std::size_t i = 0; i < values.size(); ++i)
            out_ << (i ? "," : "") << format_g12(values[i]);
        out_ << "\n";
    }

  private:
    std::ofstream out_;
};

// +-inf survive the JSON round trip as strings
inline json encode_double(double v) {
    if (v == std::numeric_limits<double>::infinity()) return "inf";
    if (v == -std::numeric_limits<double>::infinity()) return "-inf";
    return v;
}

inline double decode_double(const json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        throw std::runtime_error("expected number or \"inf\", got \"" + s + "\"");
    }
    return j.get<double>();
}

inline void write_json_file(const std::filesystem::path& path, const json& j) {
    std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << j.dump(2) << "\n";
}

inline json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return json::parse(in);
}

// ---- report serialization ------------------------------------------------

inline json to_json(const BiasInterval& v) { return json{v.lo_v, v.hi_v}; }

inline BiasInterval bias_interval_from_json(const json& j) {
    return {j.at(0).get<double>(), j.at(1).get<double>()};
}

inline json to_json(const CalibrationResult& r) {
    return json{{"v_res_v", r.v_res_v},
                {"v_res_equal_population_v", r.v_res_equal_population_v},
                {"delta_e_at_res_ev", r.delta_e_at_res_ev},
                {"ground_energy_at_res_ev", r.ground_energy_at_res_ev},
                {"region_a_v", to_json(r.region_a)},
                {"hatched_v", to_json(r.hatched)},
                {"region_b_v", to_json(r.region_b)},
                {"occupancy", json{r.occupancy.rho_a, r.occupancy.rho_b}}};
}

inline CalibrationResult calibration_from_json(const json& j) {
    CalibrationResult r;
    r.v_res_v = j.at("v_res_v").get<double>();
    r.v_res_equal_population_v = j.at("v_res_equal_population_v").get<double>();
    r.delta_e_at_res_ev = j.at("delta_e_at_res_ev").get<double>();
    r.ground_energy_at_res_ev = j.at("ground_energy_at_res_ev").get<double>();
    r.region_a = bias_interval_from_json(j.at("region_a_v"));
    r.hatched = bias_interval_from_json(j.at("hatched_v"));
    r.region_b = bias_interval_from_json(j.at("region_b_v"));
    r.occupancy = {j.at("occupancy").at(0).get<double>(), j.at("occupancy").at(1).get<double>()};
    return r;
}

inline json to_json(const CnotParameters& p) {
    return json{{"level_energy_ev", p.level_energy_ev},
                {"coupling_on_per_ps", p.coupling_on},
                {"coupling_off_per_ps", p.coupling_off},
                {"detuning_off_per_ps", p.detuning_off},
                {"bias_on_v", p.bias_on_v},
                {"duration_ps", p.duration_ps},
                {"infidelity_bound", p.infidelity_bound},
                {"delta_over_c", p.delta_over_c}};
}

inline CnotParameters cnot_parameters_from_json(const json& j) {
    CnotParameters p;
    p.level_energy_ev = j.at("level_energy_ev").get<double>();
    p.coupling_on = j.at("coupling_on_per_ps").get<double>();
    p.coupling_off = j.at("coupling_off_per_ps").get<double>();
    p.detuning_off = j.at("detuning_off_per_ps").get<double>();
    p.bias_on_v = j.at("bias_on_v").get<double>();
    p.duration_ps = j.at("duration_ps").get<double>();
    p.infidelity_bound = j.at("infidelity_bound").get<double>();
    p.delta_over_c = j.at("delta_over_c").get<double>();
    return p;
}

inline json to_json(const DecoherenceReport& r) {
    return json{{"delta_bare_per_ps", r.delta_bare_per_ps},
                {"delta_tilde_per_ps", r.delta_tilde_per_ps},
                {"renormalization_exponent", r.renormalization_exponent},
                {"omega_c_per_s", r.omega_c_s},
                {"gamma_so_bare_per_s", r.gamma_so_bare_s},
                {"gamma_so_renormalized_per_s", r.gamma_so_renorm_s},
                {"tau_so_bare_s", encode_double(r.tau_so_bare_s)},
                {"tau_so_renormalized_s", encode_double(r.tau_so_renorm_s)},
                {"alpha_ohmic", r.alpha_ohmic},
                {"ohmic_crossover_per_s", r.ohmic_crossover_s},
                {"regime", to_string(r.regime)},
                {"gate_time_s", r.gate_time_s},
                {"ops_per_coherence", encode_double(r.ops_per_coherence)},
                {"temperature", "T=0"}};
}

inline DecoherenceReport decoherence_from_json(const json& j) {
    DecoherenceReport r;
    r.delta_bare_per_ps = j.at("delta_bare_per_ps").get<double>();
    r.delta_tilde_per_ps = j.at("delta_tilde_per_ps").get<double>();
    r.renormalization_exponent = j.at("renormalization_exponent").get<double>();
    r.omega_c_s = j.at("omega_c_per_s").get<double>();
    r.gamma_so_bare_s = j.at("gamma_so_bare_per_s").get<double>();
    r.gamma_so_renorm_s = j.at("gamma_so_renormalized_per_s").get<double>();
    r.tau_so_bare_s = decode_double(j.at("tau_so_bare_s"));
    r.tau_so_renorm_s = decode_double(j.at("tau_so_renormalized_s"));
    r.alpha_ohmic = j.at("alpha_ohmic").get<double>();
    r.ohmic_crossover_s = j.at("ohmic_crossover_per_s").get<double>();
    r.regime = j.at("regime").get<std::string>() == "incoherent"
                   ? CoherenceRegime::incoherent
                   : CoherenceRegime::coherent_underdamped;
    r.gate_time_s = j.at("gate_time_s").get<double>();
    r.ops_per_coherence = decode_double(j.at("ops_per_coherence"));
    return r;
}

inline json to_json(const ReadoutReport& r) {
    json damping{{"regime", to_string(r.damping.regime)}, {"boundary", r.damping.boundary}};
    if (r.damping.regime == DampingRegime::strong_damping)
        damping["tau_zeno_s"] = r.damping.tau_zeno_s;
    return json{{"delta_v_th_v", r.delta_v_th_v},
                {"delta_i_d_a", r.delta_i_d_a},
                {"tau_ms_s", encode_double(r.tau_ms_s)},
                {"delta_per_s", r.delta_s},
                {"damping", damping}};
}

inline ReadoutReport readout_from_json(const json& j) {
    ReadoutReport r;
    r.delta_v_th_v = j.at("delta_v_th_v").get<double>();
    r.delta_i_d_a = j.at("delta_i_d_a").get<double>();
    r.tau_ms_s = decode_double(j.at("tau_ms_s"));
    r.delta_s = j.at("delta_per_s").get<double>();
    const auto& d = j.at("damping");
    r.damping.regime = d.at("regime").get<std::string>() == "strong_damping"
                           ? DampingRegime::strong_damping
                           : DampingRegime::weak_damping;
    r.damping.boundary = d.at("boundary").get<bool>();
    r.damping.tau_zeno_s = d.contains("tau_zeno_s") ? d.at("tau_zeno_s").get<double>() : 0.0;
    return r;
}

struct GateReport {
    std::string initial;
    std::string final_state;
    double target_flip_probability = 0.0;
    double infidelity = 0.0;
    double delta_over_c = 0.0;
    double duration_ps = 0.0;
    double bias_v = 0.0;
};

inline json to_json(const GateReport& g) {
    return json{{"initial", g.initial},
                {"final", g.final_state},
                {"target_flip_probability", g.target_flip_probability},
                {"infidelity", g.infidelity},
                {"delta_over_c", g.delta_over_c},
                {"duration_ps", g.duration_ps},
                {"bias_v", g.bias_v}};
}

inline GateReport gate_report_from_json(const json& j) {
    GateReport g;
    g.initial = j.at("initial").get<std::string>();
    g.final_state = j.at("final").get<std::string>();
    g.target_flip_probability = j.at("target_flip_probability").get<double>();
    g.infidelity = j.at("infidelity").get<double>();
    g.delta_over_c = j.at("delta_over_c").get<double>();
    g.duration_ps = j.at("duration_ps").get<double>();
    g.bias_v = j.at("bias_v").get<double>();
    return g;
}

}  // namespace qdot::io
