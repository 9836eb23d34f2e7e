#pragma once

// Resonance search on the transmission spectrum: grid scan, golden
// section peak refinement, wavefunction reconstruction, localization
// fractions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "qdot/parallel.hpp"
#include "qdot/transfer_matrix.hpp"

namespace qdot {

struct TransmissionSpectrum {
    std::vector<double> energies_ev;
    std::vector<double> transmission;
};

struct ResonanceLevel {
    double energy_ev = 0.0;
    double peak_width_ev = 0.0;       // FWHM of the T(E) peak
    double transmission_peak = 0.0;
    std::vector<double> density;      // normalized |psi|^2 at cell centers
    double f_a = 0.0;                 // |psi|^2 fraction in dot_a
    double f_b = 0.0;                 // |psi|^2 fraction in dot_b
};

struct ResonanceSearchOptions {
    double coarse_step_ev = 2e-4;
    double medium_step_ev = 2e-5;  // inside windows flagged by the coarse pass
    double fine_step_ev = 1e-6;    // final grid; >= the previous step disables a stage
    double refine_tol_ev = 1e-9;   // guaranteed bracket width; refinement runs to machine scale
    int threads = 1;
};

inline TransmissionSpectrum transmission_spectrum(const PotentialMesh& mesh, double e_min,
                                                  double e_max, double step, int threads = 1) {
    if (!(e_min < e_max)) throw std::invalid_argument("transmission_spectrum: empty window");
    if (!(step > 0.0)) throw std::invalid_argument("transmission_spectrum: step must be positive");
    const std::size_t n = static_cast<std::size_t>(std::floor((e_max - e_min) / step)) + 1;
    TransmissionSpectrum sp;
    sp.energies_ev.resize(n);
    sp.transmission.resize(n);
    for (std::size_t i = 0; i < n; ++i) sp.energies_ev[i] = e_min + step * static_cast<double>(i);
    parallel_for(n, threads, [&](std::size_t i) {
        sp.transmission[i] = transmission(mesh, sp.energies_ev[i]);
    });
    return sp;
}

namespace detail {

// Golden-section maximization on [lo, hi].  The bracket is tightened
// past tol toward machine scale; tol is only an upper bound on the
// returned uncertainty.
template <typename Fn>
double golden_max(Fn&& f, double lo, double hi, double tol) {
    static const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    const double floor_tol = std::max(
        4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi)),
        1e-16);
    const double target = std::min(tol, floor_tol);
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    int iter = 0;
    while (hi - lo > target && ++iter < 300) {
        if (f1 < f2) {
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
    if (hi - lo > tol)
        throw SolverError("resonance refinement did not converge in [" + std::to_string(lo) +
                          ", " + std::to_string(hi) + "] eV");
    return f1 > f2 ? x1 : x2;
}

inline std::vector<std::size_t> local_maxima(const std::vector<double>& y) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        if (y[i] > 0.0 && y[i] > y[i - 1] && y[i] >= y[i + 1]) idx.push_back(i);
    }
    return idx;
}

// Half-max crossing between x_in (T above half) and x_out (T below),
// by bisection on the monotone flank.
template <typename Fn>
double half_crossing(Fn&& f, double x_in, double x_out, double half) {
    for (int i = 0; i < 120 && std::abs(x_out - x_in) >
                                   8.0 * std::numeric_limits<double>::epsilon() *
                                       std::max(1.0, std::abs(x_in));
         ++i) {
        const double m = 0.5 * (x_in + x_out);
        if (f(m) >= half)
            x_in = m;
        else
            x_out = m;
    }
    return 0.5 * (x_in + x_out);
}

}  // namespace detail

// Reconstructs, normalizes and classifies the wavefunction at a peak.
// Normalization window: channel-side edge of dot_a to gate-side edge
// of dot_b when the mesh carries dot layers, else the whole mesh.
// A peak refined onto the exact pole of the resonant denominator can
// overflow the raw amplitudes; stepping one linewidth off the peak
// keeps the normalized shape and restores finite numbers.
inline ResonanceLevel make_level(const PotentialMesh& mesh, double e_peak, double t_peak,
                                 double width) {
    auto finite_amps = [](const std::vector<SegmentAmplitudes>& v) {
        for (const auto& s : v)
            if (!std::isfinite(s.A.real()) || !std::isfinite(s.A.imag()) ||
                !std::isfinite(s.B.real()) || !std::isfinite(s.B.imag()))
                return false;
        return true;
    };
    auto amps = interior_amplitudes(mesh, e_peak);
    if (!finite_amps(amps)) {
        const double off = std::max(
            width, 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(e_peak)));
        amps = interior_amplitudes(mesh, e_peak + off);
        if (!finite_amps(amps)) amps = interior_amplitudes(mesh, e_peak - off);
        if (!finite_amps(amps))
            throw SolverError("wavefunction reconstruction failed near " +
                              std::to_string(e_peak) + " eV");
    }
    const std::size_t n = mesh.size();

    const LayerSpan* da = mesh.find_layer(LayerKind::dot_a);
    const LayerSpan* db = mesh.find_layer(LayerKind::dot_b);
    std::size_t w_first = 0, w_last = n;  // [first, last)
    if (da && db) {
        w_first = da->first_cell;
        w_last = db->first_cell + db->cell_count;
    }

    double norm = 0.0, in_a = 0.0, in_b = 0.0;
    std::vector<double> cellp(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) cellp[j] = cell_probability(amps[j], mesh.width(j));
    for (std::size_t j = w_first; j < w_last; ++j) norm += cellp[j];
    if (da)
        for (std::size_t j = da->first_cell; j < da->first_cell + da->cell_count; ++j)
            in_a += cellp[j];
    if (db)
        for (std::size_t j = db->first_cell; j < db->first_cell + db->cell_count; ++j)
            in_b += cellp[j];

    ResonanceLevel lvl;
    lvl.energy_ev = e_peak;
    lvl.transmission_peak = t_peak;
    lvl.peak_width_ev = width;
    lvl.density.resize(n);
    const double inv_norm = norm > 0.0 ? 1.0 / norm : 0.0;
    for (std::size_t j = 0; j < n; ++j)
        lvl.density[j] = cell_density_at(amps[j], 0.5 * mesh.width(j)) * inv_norm;
    lvl.f_a = in_a * inv_norm;
    lvl.f_b = in_b * inv_norm;
    return lvl;
}

// Staged peak search: a coarse grid flags candidate windows, then
// each refinement stage rescans +-4 previous steps around surviving
// candidates with a finer grid, splitting near-degenerate peaks hiding
// in a broad neighbor's tail (unresolved avoided crossings).  Golden
// section refines every surviving maximum.
inline std::vector<ResonanceLevel> find_resonances(const PotentialMesh& mesh, double e_min,
                                                   double e_max,
                                                   const ResonanceSearchOptions& opt) {
    if (!(e_min < e_max)) throw std::invalid_argument("find_resonances: empty energy window");
    auto t_of = [&](double e) { return transmission(mesh, e); };

    std::vector<double> steps{opt.coarse_step_ev};
    for (double s : {opt.medium_step_ev, opt.fine_step_ev})
        if (s > 0.0 && s < steps.back()) steps.push_back(s);

    const auto coarse = transmission_spectrum(mesh, e_min, e_max, steps[0], opt.threads);
    std::vector<double> centers;
    for (std::size_t ci : detail::local_maxima(coarse.transmission))
        centers.push_back(coarse.energies_ev[ci]);

    double last_step = steps[0];
    for (std::size_t stage = 1; stage < steps.size(); ++stage) {
        // windows of +-4 previous steps around each candidate, merged
        std::vector<std::pair<double, double>> windows;
        for (double c : centers)
            windows.emplace_back(std::max(e_min, c - 4.0 * last_step),
                                 std::min(e_max, c + 4.0 * last_step));
        std::sort(windows.begin(), windows.end());
        std::vector<std::pair<double, double>> merged;
        for (const auto& w : windows) {
            if (!merged.empty() && w.first <= merged.back().second)
                merged.back().second = std::max(merged.back().second, w.second);
            else
                merged.push_back(w);
        }
        centers.clear();
        for (const auto& [lo, hi] : merged) {
            const auto sp = transmission_spectrum(mesh, lo, hi, steps[stage], opt.threads);
            for (std::size_t fi : detail::local_maxima(sp.transmission))
                centers.push_back(sp.energies_ev[fi]);
        }
        last_step = steps[stage];
    }

    std::vector<std::pair<double, double>> brackets;
    for (double c : centers) brackets.emplace_back(c, last_step);

    std::vector<double> peaks;
    for (auto [c, h] : brackets) {
        const double lo = std::max(e_min, c - h);
        const double hi = std::min(e_max, c + h);
        peaks.push_back(detail::golden_max(t_of, lo, hi, opt.refine_tol_ev));
    }
    std::sort(peaks.begin(), peaks.end());
    const double dedupe = std::max(opt.refine_tol_ev, 1e-12);
    peaks.erase(std::unique(peaks.begin(), peaks.end(),
                            [&](double a, double b) { return std::abs(b - a) <= dedupe; }),
                peaks.end());

    std::vector<ResonanceLevel> levels;
    for (double e : peaks) {
        const double t_peak = t_of(e);
        if (!(t_peak > 0.0)) continue;
        // FWHM by bisection on each flank; outer bound half-way to the
        // neighboring peak (or the window edge)
        const double half = 0.5 * t_peak;
        double left_bound = e_min, right_bound = e_max;
        for (double other : peaks) {
            if (other < e) left_bound = std::max(left_bound, 0.5 * (other + e));
            if (other > e) {
                right_bound = std::min(right_bound, 0.5 * (other + e));
                break;
            }
        }
        const double tl = t_of(left_bound), tr = t_of(right_bound);
        const double el = tl < half ? detail::half_crossing(t_of, e, left_bound, half) : left_bound;
        const double er =
            tr < half ? detail::half_crossing(t_of, e, right_bound, half) : right_bound;
        levels.push_back(make_level(mesh, e, t_peak, er - el));
    }
    return levels;
}

// Single-stage form: one scan grid, refine each grid maximum.
inline std::vector<ResonanceLevel> find_resonances(const PotentialMesh& mesh, double e_min,
                                                   double e_max, double scan_step_ev,
                                                   double refine_tol_ev) {
    ResonanceSearchOptions opt;
    opt.coarse_step_ev = scan_step_ev;
    opt.medium_step_ev = scan_step_ev;  // disables the staged rescans
    opt.fine_step_ev = scan_step_ev;
    opt.refine_tol_ev = refine_tol_ev;
    return find_resonances(mesh, e_min, e_max, opt);
}

// Energy difference of the two lowest levels.
inline double level_splitting(const std::vector<ResonanceLevel>& levels) {
    if (levels.size() < 2)
        throw std::invalid_argument("level_splitting: need at least two levels");
    std::vector<double> e;
    e.reserve(levels.size());
    for (const auto& l : levels) e.push_back(l.energy_ev);
    std::sort(e.begin(), e.end());
    return e[1] - e[0];
}

}  // namespace qdot
