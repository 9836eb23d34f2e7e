#pragma once

// Bias-space mapping of the device: localization regions, resonant
// gate biases (avoided-crossing minima of the level splitting), region
// boundaries at the localization threshold, and extraction of the
// two-state gate parameters from the solved spectra.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdot/device.hpp"
#include "qdot/dynamics.hpp"
#include "qdot/parallel.hpp"
#include "qdot/resonance.hpp"

namespace qdot {

struct CalibrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BiasInterval {
    double lo_v = 0.0;
    double hi_v = 0.0;
};

struct BiasScan {
    std::vector<double> bias_v;                     // strictly increasing
    std::vector<std::vector<ResonanceLevel>> levels;  // per bias, sorted by energy
    NeighborOccupancy occupancy;
};

struct CalibrationResult {
    double v_res_v = 0.0;                   // splitting minimum
    double v_res_equal_population_v = 0.0;  // ground-level f_a == f_b crossing
    double delta_e_at_res_ev = 0.0;
    double ground_energy_at_res_ev = 0.0;
    BiasInterval region_a;  // ground level localized in dot_a
    BiasInterval hatched;   // delocalized window
    BiasInterval region_b;  // localized in dot_b
    NeighborOccupancy occupancy;
};

struct CalibrationOptions {
    std::size_t n_mesh = 1000;
    ResonanceSearchOptions search;        // per-bias energy search
    double energy_floor_ev = 2e-3;        // keep the channel contact propagating
    double energy_rel_lo_ev = 8e-3;       // window above the lower dot bottom
    double energy_rel_hi_ev = 0.16;
    double localization_threshold = 0.98;
    double bias_tol_v = 1e-5;
    double coarse_bias_step_v = 1e-3;
    int threads = 1;
};

// Energy window bracketing the two lowest dot levels at this bias,
// anchored to the lower dot bottom and clipped at the floor.
inline std::pair<double, double> level_window(const PotentialMesh& mesh,
                                              const CalibrationOptions& opt) {
    const LayerSpan* da = mesh.find_layer(LayerKind::dot_a);
    const LayerSpan* db = mesh.find_layer(LayerKind::dot_b);
    if (!da || !db)
        throw CalibrationError("level_window: mesh carries no dot layers");
    const double bottom = std::min(mesh.mean_potential(*da), mesh.mean_potential(*db));
    const double lo = std::max(opt.energy_floor_ev, bottom + opt.energy_rel_lo_ev);
    const double hi = bottom + opt.energy_rel_hi_ev;
    return {lo, hi};
}

// Levels of one (bias, occupancy) point, sorted by energy.
inline std::vector<ResonanceLevel> levels_at(const QubitGeometry& g, double bias_v,
                                             const NeighborOccupancy& occ,
                                             const CalibrationOptions& opt,
                                             int search_threads) {
    const auto mesh = build_potential(g, bias_v, occ, opt.n_mesh);
    const auto [lo, hi] = level_window(mesh, opt);
    if (!(lo < hi)) return {};
    ResonanceSearchOptions s = opt.search;
    s.threads = search_threads;
    auto lv = find_resonances(mesh, lo, hi, s);
    std::sort(lv.begin(), lv.end(), [](const ResonanceLevel& x, const ResonanceLevel& y) {
        return x.energy_ev < y.energy_ev;
    });
    return lv;
}

// Spectra over an explicit bias grid; bias points run in parallel.
inline BiasScan scan_bias(const QubitGeometry& g, const NeighborOccupancy& occ,
                          const std::vector<double>& bias_points,
                          const CalibrationOptions& opt) {
    for (std::size_t i = 1; i < bias_points.size(); ++i)
        if (!(bias_points[i] > bias_points[i - 1]))
            throw std::invalid_argument("scan_bias: bias points must be strictly increasing");
    BiasScan scan;
    scan.bias_v = bias_points;
    scan.occupancy = occ;
    scan.levels.resize(bias_points.size());
    std::vector<std::string> errors(bias_points.size());
    parallel_for(bias_points.size(), opt.threads, [&](std::size_t i) {
        try {
            scan.levels[i] = levels_at(g, bias_points[i], occ, opt, 1);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });
    for (std::size_t i = 0; i < errors.size(); ++i)
        if (!errors[i].empty())
            throw CalibrationError("scan_bias: at bias " + std::to_string(bias_points[i]) +
                                   " V: " + errors[i]);
    return scan;
}

// Uniform-grid scan.
inline BiasScan scan_bias(const QubitGeometry& g, const NeighborOccupancy& occ, double bias_lo_v,
                          double bias_hi_v, double bias_step_v, const CalibrationOptions& opt) {
    if (!(bias_step_v > 0.0)) throw std::invalid_argument("scan_bias: step must be positive");
    if (!(bias_lo_v < bias_hi_v)) throw std::invalid_argument("scan_bias: empty bias range");
    std::vector<double> pts;
    const std::size_t n =
        static_cast<std::size_t>(std::floor((bias_hi_v - bias_lo_v) / bias_step_v)) + 1;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        pts.push_back(bias_lo_v + bias_step_v * static_cast<double>(i));
    return scan_bias(g, occ, pts, opt);
}

namespace detail {

struct BiasProbe {
    double delta_e = std::numeric_limits<double>::infinity();
    double max_f = 1.0;       // max(f_a, f_b) of the ground level
    double f_diff = 0.0;      // f_a - f_b of the ground level
    double e_ground = 0.0;
};

inline BiasProbe probe_bias(const QubitGeometry& g, double bias_v, const NeighborOccupancy& occ,
                            const CalibrationOptions& opt, int threads) {
    BiasProbe p;
    const auto lv = levels_at(g, bias_v, occ, opt, threads);
    if (lv.empty()) return p;
    p.max_f = std::max(lv[0].f_a, lv[0].f_b);
    p.f_diff = lv[0].f_a - lv[0].f_b;
    p.e_ground = lv[0].energy_ev;
    if (lv.size() >= 2) p.delta_e = lv[1].energy_ev - lv[0].energy_ev;
    return p;
}

template <typename Fn>
double golden_min_scalar(Fn&& f, double lo, double hi, double tol) {
    static const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    int iter = 0;
    while (hi - lo > tol && ++iter < 200) {
        if (f1 > f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    return f1 < f2 ? x1 : x2;
}

}  // namespace detail

// Locates the single avoided crossing inside the bracket: v_res
// minimizes the splitting; region boundaries sit where the ground
// level's localization crosses the threshold.  Errors when the bracket
// holds no delocalization window, or more than one.
inline CalibrationResult find_resonant_bias(const QubitGeometry& g, const NeighborOccupancy& occ,
                                            BiasInterval bracket,
                                            const CalibrationOptions& opt) {
    if (!(bracket.lo_v < bracket.hi_v))
        throw std::invalid_argument("find_resonant_bias: empty bracket");
    if (!(opt.bias_tol_v > 0.0))
        throw std::invalid_argument("find_resonant_bias: tolerance must be positive");

    // coarse pass
    std::vector<double> grid;
    for (double v = bracket.lo_v; v <= bracket.hi_v + 1e-15; v += opt.coarse_bias_step_v)
        grid.push_back(std::min(v, bracket.hi_v));
    if (grid.size() < 3)
        throw std::invalid_argument("find_resonant_bias: bracket shorter than the coarse step");
    std::vector<detail::BiasProbe> probes(grid.size());
    parallel_for(grid.size(), opt.threads, [&](std::size_t i) {
        probes[i] = detail::probe_bias(g, grid[i], occ, opt, 1);
    });

    auto de_of = [&](double v) { return detail::probe_bias(g, v, occ, opt, opt.threads).delta_e; };

    // dips of the splitting -> refined candidates -> delocalization check
    std::vector<double> centers;
    std::vector<double> center_de;
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        if (!std::isfinite(probes[i].delta_e)) continue;
        const double left = probes[i - 1].delta_e;
        const double right = probes[i + 1].delta_e;
        if (probes[i].delta_e <= left && probes[i].delta_e < right) {
            const double v =
                detail::golden_min_scalar(de_of, grid[i - 1], grid[i + 1], opt.bias_tol_v);
            const auto p = detail::probe_bias(g, v, occ, opt, opt.threads);
            if (p.max_f < opt.localization_threshold) {
                centers.push_back(v);
                center_de.push_back(p.delta_e);
            }
        }
    }
    if (centers.empty())
        throw CalibrationError("find_resonant_bias: no delocalization window in [" +
                               std::to_string(bracket.lo_v) + ", " +
                               std::to_string(bracket.hi_v) + "] V");
    if (centers.size() > 1) {
        std::string msg = "find_resonant_bias: multiple delocalization windows at";
        for (double c : centers) msg += " " + std::to_string(c) + " V";
        throw CalibrationError(msg);
    }

    CalibrationResult res;
    res.occupancy = occ;
    res.v_res_v = centers[0];
    res.delta_e_at_res_ev = center_de[0];
    const auto at_res = detail::probe_bias(g, res.v_res_v, occ, opt, opt.threads);
    res.ground_energy_at_res_ev = at_res.e_ground;

    // localization boundary between a localized anchor and the window
    auto bisect_boundary = [&](double v_loc, double v_deloc) {
        for (int i = 0; i < 60 && std::abs(v_deloc - v_loc) > opt.bias_tol_v; ++i) {
            const double m = 0.5 * (v_loc + v_deloc);
            const auto p = detail::probe_bias(g, m, occ, opt, opt.threads);
            if (p.max_f >= opt.localization_threshold)
                v_loc = m;
            else
                v_deloc = m;
        }
        return 0.5 * (v_loc + v_deloc);
    };

    // nearest localized coarse points on each side of the window
    double left_anchor = bracket.lo_v, right_anchor = bracket.hi_v;
    bool left_found = false, right_found = false;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] < res.v_res_v && probes[i].max_f >= opt.localization_threshold) {
            left_anchor = grid[i];
            left_found = true;
        }
        if (!right_found && grid[i] > res.v_res_v &&
            probes[i].max_f >= opt.localization_threshold) {
            right_anchor = grid[i];
            right_found = true;
        }
    }
    const double lo_b = left_found ? bisect_boundary(left_anchor, res.v_res_v) : bracket.lo_v;
    const double hi_b = right_found ? bisect_boundary(right_anchor, res.v_res_v) : bracket.hi_v;
    res.hatched = {lo_b, hi_b};
    res.region_a = {bracket.lo_v, lo_b};
    res.region_b = {hi_b, bracket.hi_v};

    // equal-population crossing of the ground level inside the window
    double va = lo_b, vb = hi_b;
    double sa = detail::probe_bias(g, va, occ, opt, opt.threads).f_diff;
    double sb = detail::probe_bias(g, vb, occ, opt, opt.threads).f_diff;
    if (sa * sb < 0.0) {
        for (int i = 0; i < 60 && vb - va > opt.bias_tol_v; ++i) {
            const double m = 0.5 * (va + vb);
            const double sm = detail::probe_bias(g, m, occ, opt, opt.threads).f_diff;
            if ((sm > 0.0) == (sa > 0.0)) {
                va = m;
                sa = sm;
            } else {
                vb = m;
                sb = sm;
            }
        }
        res.v_res_equal_population_v = 0.5 * (va + vb);
    } else {
        res.v_res_equal_population_v = res.v_res_v;
    }
    return res;
}

// Gate parameters for the controlled-NOT: coupling from the splitting
// of the control-|1> calibration at its resonance, detuning from the
// control-|0> configuration solved at that same bias.  The observed
// off-resonance splitting is sqrt(det^2 + dE_0^2), so the single-dot
// detuning is recovered by deflating with the |0>-configuration
// coupling.
inline CnotParameters extract_cnot_parameters(const QubitGeometry& g,
                                              const CalibrationResult& control_one,
                                              const CalibrationResult& control_zero,
                                              const CalibrationOptions& opt) {
    CnotParameters p;
    p.bias_on_v = control_one.v_res_v;
    p.level_energy_ev = control_one.ground_energy_at_res_ev;
    p.coupling_on = control_one.delta_e_at_res_ev / (2.0 * constants::hbar_ev_ps);
    p.coupling_off = control_zero.delta_e_at_res_ev / (2.0 * constants::hbar_ev_ps);

    const auto lv = levels_at(g, control_one.v_res_v, control_zero.occupancy, opt, opt.threads);
    if (lv.size() < 2)
        throw CalibrationError(
            "extract_cnot_parameters: off-configuration levels not resolvable at the "
            "operating bias");
    const double de_obs = lv[1].energy_ev - lv[0].energy_ev;
    const double de_min = control_zero.delta_e_at_res_ev;
    const double det_sq = de_obs * de_obs - de_min * de_min;
    const double detuning_ev = det_sq > 0.0 ? std::sqrt(det_sq) : 0.0;
    p.detuning_off = 0.5 * detuning_ev / constants::hbar_ev_ps;

    p.duration_ps = constants::pi / (2.0 * p.coupling_on);
    const double c2 = p.coupling_off * p.coupling_off;
    p.infidelity_bound = c2 / (c2 + p.detuning_off * p.detuning_off);
    p.delta_over_c = p.detuning_off / p.coupling_on;
    return p;
}

}  // namespace qdot
