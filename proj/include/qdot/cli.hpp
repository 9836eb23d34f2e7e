#pragma once

// Command implementations behind the command-line front end: scan,
// cnot, dynamics, budget, report.  Each command reads the parsed
// configuration, writes CSV/JSON into the output directory and logs a
// few status lines.  Calibrations are cached on disk keyed by a
// content hash of geometry + occupancy + solver settings.

#include <array>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qdot/calibration.hpp"
#include "qdot/config.hpp"
#include "qdot/dynamics.hpp"
#include "qdot/environment.hpp"
#include "qdot/io.hpp"
#include "qdot/measurement.hpp"

namespace qdot::cli {

using nlohmann::json;

namespace detail {

inline json calibration_cache_payload(const RunConfig& cfg, const NeighborOccupancy& occ) {
    return json{{"geometry", geometry_to_json(cfg.geometry)},
                {"occupancy", json{occ.rho_a, occ.rho_b}},
                {"bracket", json{cfg.scan.calibration_bracket.lo_v,
                                 cfg.scan.calibration_bracket.hi_v}},
                {"solver",
                 json{{"n_mesh", cfg.solver.n_mesh},
                      {"coarse_step_ev", cfg.solver.search.coarse_step_ev},
                      {"medium_step_ev", cfg.solver.search.medium_step_ev},
                      {"fine_step_ev", cfg.solver.search.fine_step_ev},
                      {"refine_tol_ev", cfg.solver.search.refine_tol_ev},
                      {"energy_floor_ev", cfg.solver.energy_floor_ev},
                      {"energy_rel_lo_ev", cfg.solver.energy_rel_lo_ev},
                      {"energy_rel_hi_ev", cfg.solver.energy_rel_hi_ev},
                      {"localization_threshold", cfg.solver.localization_threshold},
                      {"bias_tol_v", cfg.solver.bias_tol_v},
                      {"coarse_bias_step_v", cfg.solver.coarse_bias_step_v}}}};
}

inline CalibrationResult calibrate_cached(const RunConfig& cfg, const NeighborOccupancy& occ,
                                          std::ostream& log) {
    const json payload = calibration_cache_payload(cfg, occ);
    const std::string key = io::hex64(io::fnv1a64(payload.dump()));
    const auto path = cfg.cache_dir() / ("calib_" + key + ".json");
    if (std::filesystem::exists(path)) {
        const json j = io::read_json_file(path);
        if (j.value("key", "") == key) {
            log << "calibration (rho_a=" << occ.rho_a << ", rho_b=" << occ.rho_b
                << "): cached, v_res = " << io::format_g12(j.at("result").at("v_res_v").get<double>())
                << " V\n";
            return io::calibration_from_json(j.at("result"));
        }
    }
    auto opts = cfg.solver;
    opts.threads = cfg.effective_threads();
    const auto result = find_resonant_bias(cfg.geometry, occ, cfg.scan.calibration_bracket, opts);
    io::write_json_file(path, json{{"key", key}, {"payload", payload},
                                   {"result", io::to_json(result)}});
    log << "calibration (rho_a=" << occ.rho_a << ", rho_b=" << occ.rho_b
        << "): v_res = " << io::format_g12(result.v_res_v)
        << " V, dE = " << io::format_g12(result.delta_e_at_res_ev) << " eV\n";
    return result;
}

// coarse grid over the scan range plus fine grids across both
// delocalization windows
inline std::vector<double> scan_grid(const RunConfig& cfg,
                                     const std::vector<BiasInterval>& windows) {
    std::vector<double> pts;
    for (double v = cfg.scan.bias_lo_v; v <= cfg.scan.bias_hi_v + 1e-15;
         v += cfg.scan.bias_step_v)
        pts.push_back(v);
    for (const auto& w : windows) {
        const double pad = w.hi_v - w.lo_v;
        const double lo = std::max(cfg.scan.bias_lo_v, w.lo_v - pad);
        const double hi = std::min(cfg.scan.bias_hi_v, w.hi_v + pad);
        for (double v = lo; v <= hi + 1e-15; v += cfg.scan.fine_bias_step_v) pts.push_back(v);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](double a, double b) { return std::abs(b - a) < 1e-9; }),
              pts.end());
    return pts;
}

inline void write_scan_csv(const std::filesystem::path& path, const BiasScan& scan) {
    io::CsvWriter csv(path, {"bias_V", "E0_eV", "E1_eV", "f_a", "f_b"});
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < scan.bias_v.size(); ++i) {
        const auto& lv = scan.levels[i];
        csv.row({scan.bias_v[i], lv.empty() ? nan : lv[0].energy_ev,
                 lv.size() < 2 ? nan : lv[1].energy_ev, lv.empty() ? nan : lv[0].f_a,
                 lv.empty() ? nan : lv[0].f_b});
    }
}

inline void write_wavefunction_csv(const std::filesystem::path& path,
                                   const PotentialMesh& mesh, const ResonanceLevel& lvl) {
    io::CsvWriter csv(path, {"position_nm", "psi2", "potential_eV"});
    for (std::size_t j = 0; j < mesh.size(); ++j)
        csv.row({mesh.positions[j], lvl.density[j], mesh.potential[j]});
}

inline void write_spectrum_csv(const std::filesystem::path& path,
                               const TransmissionSpectrum& sp) {
    io::CsvWriter csv(path, {"energy_eV", "T"});
    for (std::size_t i = 0; i < sp.energies_ev.size(); ++i)
        csv.row({sp.energies_ev[i], sp.transmission[i]});
}

inline char bit_of(const QubitState& s) { return s.population_a() >= 0.5 ? '1' : '0'; }

inline QubitState state_of(char bit) {
    return bit == '1' ? QubitState::one() : QubitState::zero();
}

// ground level of the single averaged well used by the tunneling
// estimate; mesh: contact | V0 | well l_w | V0 | contact
inline double averaged_well_ground_level(const DynamicsSettings& d, int threads) {
    PotentialMesh m;
    const std::array<std::array<double, 2>, 5> segs{{{2.0, 0.0},
                                                     {3.0, d.barrier_height_ev},
                                                     {d.well_width_nm, 0.0},
                                                     {3.0, d.barrier_height_ev},
                                                     {2.0, 0.0}}};
    m.edges.push_back(0.0);
    double x = 0.0;
    for (const auto& s : segs) {
        x += s[0];
        m.edges.push_back(x);
        m.positions.push_back(x - 0.5 * s[0]);
        m.potential.push_back(s[1]);
        m.mass.push_back(d.effective_mass);
    }
    ResonanceSearchOptions opt;
    opt.threads = threads;
    const auto levels = find_resonances(m, 2e-3, 0.5 * d.barrier_height_ev, opt);
    if (levels.empty())
        throw SolverError("averaged well has no resonance below half the barrier height");
    return levels.front().energy_ev;
}

struct CnotContext {
    CalibrationResult control_one;
    CalibrationResult control_zero;
    CnotParameters params;
};

inline CnotContext cnot_context(const RunConfig& cfg, std::ostream& log) {
    CnotContext ctx;
    ctx.control_one = calibrate_cached(cfg, {1.0, 0.0}, log);
    ctx.control_zero = calibrate_cached(cfg, {0.0, 1.0}, log);
    auto opts = cfg.solver;
    opts.threads = cfg.effective_threads();
    ctx.params = extract_cnot_parameters(cfg.geometry, ctx.control_one, ctx.control_zero, opts);
    return ctx;
}

inline io::GateReport run_cnot_case(const RunConfig& cfg, const CnotParameters& params,
                                    const std::string& bits, bool write_trace,
                                    std::ostream& log) {
    const RegisterState reg{state_of(bits[0]), state_of(bits[1])};
    const auto out = cnot(reg, params);

    io::GateReport rep;
    rep.initial = bits;
    rep.final_state = {bit_of(out.state.control), bit_of(out.state.target)};
    rep.target_flip_probability = out.target_flip_probability;
    rep.infidelity = out.infidelity;
    rep.delta_over_c = params.delta_over_c;
    rep.duration_ps = params.duration_ps;
    rep.bias_v = params.bias_on_v;

    if (write_trace) {
        const double w_level = params.level_energy_ev / constants::hbar_ev_ps;
        const bool on_res = bits[0] == '1';
        const TwoStateHamiltonian h =
            on_res ? TwoStateHamiltonian{w_level, w_level, params.coupling_on, params.coupling_on}
                   : TwoStateHamiltonian{w_level + params.detuning_off,
                                         w_level - params.detuning_off, params.coupling_off,
                                         params.coupling_off};
        io::CsvWriter csv(cfg.out_dir() / ("trace_" + bits + ".csv"),
                          {"t_ps", "pop_a", "pop_b"});
        const int n = 400;
        for (int i = 0; i <= n; ++i) {
            const double t = params.duration_ps * i / n;
            const auto s = evolve(reg.target, h, t);
            csv.row({t, s.population_a(), s.population_b()});
        }
    }
    log << "cnot " << bits << " -> " << rep.final_state
        << " (flip probability " << io::format_g12(rep.target_flip_probability)
        << ", infidelity " << io::format_g12(rep.infidelity) << ")\n";
    return rep;
}

}  // namespace detail

// Bias maps for both control states, wavefunctions at the operating
// bias, and the calibration summary.
inline json cmd_scan(const RunConfig& cfg, std::ostream& log) {
    const auto ctx = detail::cnot_context(cfg, log);
    const auto& r1 = ctx.control_one;
    const auto& r0 = ctx.control_zero;

    auto opts = cfg.solver;
    opts.threads = cfg.effective_threads();
    const auto grid = detail::scan_grid(cfg, {r1.hatched, r0.hatched});
    log << "scanning " << grid.size() << " bias points per control state\n";
    const auto scan1 = scan_bias(cfg.geometry, {1.0, 0.0}, grid, opts);
    const auto scan0 = scan_bias(cfg.geometry, {0.0, 1.0}, grid, opts);
    detail::write_scan_csv(cfg.out_dir() / "scan_control1.csv", scan1);
    detail::write_scan_csv(cfg.out_dir() / "scan_control0.csv", scan0);

    // |psi|^2 of the two control states at the operating bias V_res(1)
    for (const auto& [occ, name] :
         {std::pair{NeighborOccupancy{1.0, 0.0}, "control1"},
          std::pair{NeighborOccupancy{0.0, 1.0}, "control0"}}) {
        const auto mesh = build_potential(cfg.geometry, r1.v_res_v, occ, cfg.solver.n_mesh);
        const auto lv = levels_at(cfg.geometry, r1.v_res_v, occ, opts, opts.threads);
        if (!lv.empty())
            detail::write_wavefunction_csv(
                cfg.out_dir() / (std::string("psi_vres1_") + name + ".csv"), mesh, lv[0]);
        const auto [elo, ehi] = level_window(mesh, cfg.solver);
        detail::write_spectrum_csv(
            cfg.out_dir() / (std::string("spectrum_vres1_") + name + ".csv"),
            transmission_spectrum(mesh, elo, ehi, cfg.solver.search.coarse_step_ev,
                                  opts.threads));
    }

    const double tau_c1 = constants::hbar_ev_ps / (2.0 * r1.delta_e_at_res_ev);
    const double tau_c0 = constants::hbar_ev_ps / (2.0 * r0.delta_e_at_res_ev);
    const bool disjoint = r1.hatched.hi_v < r0.hatched.lo_v || r0.hatched.hi_v < r1.hatched.lo_v;

    json summary{{"generated_at", io::iso8601_utc_now()},
                 {"control_one", io::to_json(r1)},
                 {"control_zero", io::to_json(r0)},
                 {"cnot_parameters", io::to_json(ctx.params)},
                 {"tau_coherent_transfer_ps", json{{"control_one", tau_c1},
                                                   {"control_zero", tau_c0}}},
                 {"v_res_ordering_ok", r1.v_res_v < r0.v_res_v},
                 {"windows_disjoint", disjoint}};
    io::write_json_file(cfg.out_dir() / "scan_summary.json", summary);
    log << "v_res: control|1> " << io::format_g12(r1.v_res_v) << " V, control|0> "
        << io::format_g12(r0.v_res_v) << " V, windows "
        << (disjoint ? "disjoint" : "OVERLAPPING") << "\n";
    return summary;
}

// One controlled-NOT on a two-bit basis register.
inline json cmd_cnot(const RunConfig& cfg, const std::string& bits, std::ostream& log) {
    if (bits.size() != 2 || (bits[0] != '0' && bits[0] != '1') ||
        (bits[1] != '0' && bits[1] != '1'))
        throw ConfigError("cnot: initial register must be two bits of 0/1, got \"" + bits +
                          "\"");
    const auto ctx = detail::cnot_context(cfg, log);
    const auto rep = detail::run_cnot_case(cfg, ctx.params, bits, true, log);
    json j{{"generated_at", io::iso8601_utc_now()},
           {"gate", io::to_json(rep)},
           {"parameters", io::to_json(ctx.params)}};
    io::write_json_file(cfg.out_dir() / ("cnot_" + bits + ".json"), j);
    return j;
}

// Pulse timing from the averaged-well estimate plus an on-resonance
// population trace.
inline json cmd_dynamics(const RunConfig& cfg, std::ostream& log) {
    const auto& d = cfg.dynamics;
    const double e = d.incident_energy_ev > 0.0
                         ? d.incident_energy_ev
                         : detail::averaged_well_ground_level(d, cfg.effective_threads());
    const double w0 = tunneling_frequency_estimate(d.barrier_height_ev, e, d.well_width_nm,
                                                   d.barrier_width_nm, d.effective_mass);
    const double tau_transfer = constants::pi / (2.0 * w0);

    const TwoStateHamiltonian h{e / constants::hbar_ev_ps, e / constants::hbar_ev_ps, w0, w0};
    io::CsvWriter csv(cfg.out_dir() / "trace_not.csv", {"t_ps", "pop_a", "pop_b"});
    const int n = 400;
    for (int i = 0; i <= n; ++i) {
        const double t = 2.0 * tau_transfer * i / n;
        const auto s = evolve(QubitState::one(), h, t);
        csv.row({t, s.population_a(), s.population_b()});
    }
    const auto flipped = not_pulse(QubitState::one(), h);
    const auto half = half_pulse(QubitState::one(), h);

    json j{{"generated_at", io::iso8601_utc_now()},
           {"incident_energy_ev", e},
           {"incident_energy_source", d.incident_energy_ev > 0.0 ? "config" : "solver"},
           {"tunneling_frequency_per_ps", w0},
           {"transfer_time_ps", tau_transfer},
           {"not_pulse", json{{"duration_ps", tau_transfer},
                              {"pop_a", flipped.population_a()},
                              {"pop_b", flipped.population_b()}}},
           {"half_pulse", json{{"duration_ps", tau_transfer / 2.0},
                               {"pop_a", half.population_a()},
                               {"pop_b", half.population_b()}}}};
    io::write_json_file(cfg.out_dir() / "dynamics.json", j);
    log << "tunneling estimate: E = " << io::format_g12(e) << " eV, w0 = " << io::format_g12(w0)
        << " /ps, transfer time " << io::format_g12(tau_transfer) << " ps\n";
    return j;
}

// Decoherence and readout budgets.
inline json cmd_budget(const RunConfig& cfg, std::ostream& log) {
    const double delta_s = cfg.budget.hbar_delta_ev / constants::hbar_ev_s;
    const auto dec = decoherence_report(delta_s, cfg.bath, cfg.budget.gate_time_s);
    const auto rd = readout_report(cfg.detector, delta_s);

    json j{{"generated_at", io::iso8601_utc_now()},
           {"decoherence", io::to_json(dec)},
           {"readout", io::to_json(rd)},
           {"checks",
            json{{"ops_per_coherence_at_least_1e3", dec.ops_per_coherence >= 1e3},
                 {"measurement_slower_than_oscillation",
                  rd.damping.regime == DampingRegime::weak_damping}}}};
    io::write_json_file(cfg.out_dir() / "budget.json", j);
    log << "decoherence: tau_so(bare) = " << io::format_g12(dec.tau_so_bare_s) << " s, "
        << io::format_g12(dec.ops_per_coherence) << " gate operations per coherence time\n";
    log << "readout: dI = " << io::format_g12(rd.delta_i_d_a)
        << " A, tau_ms = " << io::format_g12(rd.tau_ms_s) << " s, "
        << to_string(rd.damping.regime) << "\n";
    return j;
}

// Every stage, plus the aggregated report and the effective
// configuration echo.
inline json cmd_report(const RunConfig& cfg, const json& effective, std::ostream& log) {
    io::write_json_file(cfg.out_dir() / "effective_config.json", effective);
    const json scan = cmd_scan(cfg, log);
    json gates = json::array();
    for (const char* bits : {"00", "01", "10", "11"})
        gates.push_back(cmd_cnot(cfg, bits, log).at("gate"));
    const json dyn = cmd_dynamics(cfg, log);
    const json bud = cmd_budget(cfg, log);

    json truth{{"00", "00"}, {"01", "01"}, {"10", "11"}, {"11", "10"}};
    bool table_ok = true;
    for (const auto& g : gates)
        table_ok = table_ok && truth.at(g.at("initial").get<std::string>()) == g.at("final");

    json j{{"generated_at", io::iso8601_utc_now()},
           {"scan", scan},
           {"gates", gates},
           {"dynamics", dyn},
           {"budget", bud},
           {"cnot_truth_table_ok", table_ok}};
    io::write_json_file(cfg.out_dir() / "report.json", j);
    log << "cnot truth table " << (table_ok ? "reproduced" : "VIOLATED") << "\n";
    return j;
}

}  // namespace qdot::cli
