#pragma once

// Plane-wave scattering through a piecewise-constant potential mesh.
//
// Each cell carries psi(x) = A e^{ikx} + B e^{-ikx} with k from the
// local potential and mass.  Interfaces match psi and (1/m) psi';
// segments are composed in scattering-matrix form (Redheffer star),
// which keeps every exponential bounded by one and stays stable
// through arbitrarily thick evanescent barriers, where the raw
// transfer-matrix product overflows.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdot/constants.hpp"
#include "qdot/device.hpp"

namespace qdot {

using complexd = std::complex<double>;

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Local wavevector, nm^-1.  Branch: real positive above the potential,
// positive imaginary below, zero at the turning point.
inline complexd local_wavevector(double e_ev, double v_ev, double mass) {
    if (!(mass > 0.0)) throw std::domain_error("local_wavevector: mass must be positive");
    const double u = mass * (e_ev - v_ev) / constants::hbar2_over_2m0_ev_nm2;
    if (u > 0.0) return {std::sqrt(u), 0.0};
    if (u < 0.0) return {0.0, std::sqrt(-u)};
    return {0.0, 0.0};
}

struct SegmentAmplitudes {
    complexd A{0.0, 0.0};  // right-mover coefficient
    complexd B{0.0, 0.0};  // left-mover coefficient
    complexd k{0.0, 0.0};  // nm^-1
};

namespace detail {

// Scalar two-port scattering matrix:
//   (b_out_left, a_out_right) = S (a_in_left, b_in_right)
struct ScalarS {
    complexd r_in{0.0, 0.0};   // reflection, left incidence
    complexd t_fwd{1.0, 0.0};  // transmission left -> right
    complexd r_out{0.0, 0.0};  // reflection, right incidence
    complexd t_bwd{1.0, 0.0};  // transmission right -> left
};

inline ScalarS star(const ScalarS& a, const ScalarS& b) {
    const complexd d = 1.0 - a.r_out * b.r_in;
    const complexd inv = 1.0 / d;
    ScalarS s;
    s.t_fwd = b.t_fwd * inv * a.t_fwd;
    s.r_in = a.r_in + a.t_bwd * b.r_in * inv * a.t_fwd;
    s.r_out = b.r_out + b.t_fwd * a.r_out * inv * b.t_bwd;
    s.t_bwd = a.t_bwd * inv * b.t_bwd;
    return s;
}

// e^{ikw}; |.| <= 1 for the chosen branch
inline complexd propagation_phase(const complexd& k, double w_nm) {
    if (k.imag() == 0.0) return std::polar(1.0, k.real() * w_nm);
    if (k.real() == 0.0) return {std::exp(-k.imag() * w_nm), 0.0};
    return std::exp(complexd(0.0, 1.0) * k * w_nm);
}

inline ScalarS propagation(const complexd& k, double w_nm) {
    ScalarS s;
    s.t_fwd = propagation_phase(k, w_nm);
    s.t_bwd = s.t_fwd;
    return s;
}

// star(a, propagation(p)) without the generic division
inline void append_propagation(ScalarS& a, const complexd& p) {
    a.t_fwd *= p;
    a.t_bwd *= p;
    a.r_out *= p * p;
}

// star(propagation(p), b) without the generic division
inline ScalarS prepend_propagation(const complexd& p, const ScalarS& b) {
    ScalarS s;
    s.r_in = p * p * b.r_in;
    s.t_fwd = p * b.t_fwd;
    s.r_out = b.r_out;
    s.t_bwd = p * b.t_bwd;
    return s;
}

inline ScalarS interface(const complexd& q1, const complexd& q2) {
    // q = k/m, flux velocity up to a constant
    const complexd den = q1 + q2;
    ScalarS s;
    if (den == complexd(0.0, 0.0)) return s;  // identical (or doubly degenerate) media
    s.r_in = (q1 - q2) / den;
    s.t_fwd = 2.0 * q1 / den;
    s.r_out = (q2 - q1) / den;
    s.t_bwd = 2.0 * q2 / den;
    return s;
}

inline bool finite(const ScalarS& s) {
    auto ok = [](const complexd& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
    return ok(s.r_in) && ok(s.t_fwd) && ok(s.r_out) && ok(s.t_bwd);
}

struct MeshWaves {
    std::vector<complexd> k;  // per cell
    std::vector<complexd> q;  // k/m per cell
};

inline MeshWaves wavevectors(const PotentialMesh& mesh, double e_ev) {
    const std::size_t n = mesh.size();
    MeshWaves w;
    w.k.resize(n);
    w.q.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        w.k[j] = local_wavevector(e_ev, mesh.potential[j], mesh.mass[j]);
        w.q[j] = w.k[j] / mesh.mass[j];
    }
    return w;
}

// Global S-matrix from the left edge of cell 0 to the left edge of the
// last cell: star over (propagate cell i, interface i->i+1).
inline ScalarS compose(const PotentialMesh& mesh, const MeshWaves& w) {
    const std::size_t n = mesh.size();
    if (n < 2) throw SolverError("propagate: mesh needs at least two cells");
    ScalarS acc;  // identity
    for (std::size_t i = 0; i + 1 < n; ++i) {
        append_propagation(acc, propagation_phase(w.k[i], mesh.width(i)));
        acc = star(acc, interface(w.q[i], w.q[i + 1]));
        if (!finite(acc))
            throw SolverError("propagate: non-finite amplitude composing segment " +
                              std::to_string(i));
    }
    return acc;
}

inline bool propagating(const complexd& k) { return k.real() > 0.0 && k.imag() == 0.0; }

}  // namespace detail

// Terminal amplitudes for unit incidence from the channel side
// (A_0 = 1) and no reflection returning from the gate side (B_N = 0).
inline SegmentAmplitudes propagate(const PotentialMesh& mesh, double e_ev) {
    const auto w = detail::wavevectors(mesh, e_ev);
    const auto s = detail::compose(mesh, w);
    return {s.t_fwd, {0.0, 0.0}, w.k.back()};
}

// Transmission probability, flux-ratio form (k/m)_out / (k/m)_in |t|^2.
// Zero whenever either contact is non-propagating.
inline double transmission(const PotentialMesh& mesh, double e_ev) {
    const auto w = detail::wavevectors(mesh, e_ev);
    if (!detail::propagating(w.k.front()) || !detail::propagating(w.k.back())) return 0.0;
    const auto s = detail::compose(mesh, w);
    const double flux = (w.k.back().real() / mesh.mass.back()) /
                        (w.k.front().real() / mesh.mass.front());
    return flux * std::norm(s.t_fwd);
}

// Reflection probability |B_0|^2 for unit incidence.
inline double reflection(const PotentialMesh& mesh, double e_ev) {
    const auto w = detail::wavevectors(mesh, e_ev);
    if (!detail::propagating(w.k.front())) return 1.0;
    const auto s = detail::compose(mesh, w);
    return std::norm(s.r_in);
}

// Amplitudes at the left edge of every cell, unit incidence.  Partial
// scattering matrices from both ends keep the back-substitution stable
// in deep evanescent regions.
inline std::vector<SegmentAmplitudes> interior_amplitudes(const PotentialMesh& mesh,
                                                          double e_ev) {
    const auto w = detail::wavevectors(mesh, e_ev);
    const std::size_t n = mesh.size();
    if (n < 2) throw SolverError("interior_amplitudes: mesh needs at least two cells");

    // left[i]: S from the incidence plane to the left edge of cell i
    std::vector<detail::ScalarS> left(n);
    detail::ScalarS acc;
    left[0] = acc;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        detail::append_propagation(acc, detail::propagation_phase(w.k[i], mesh.width(i)));
        acc = detail::star(acc, detail::interface(w.q[i], w.q[i + 1]));
        if (!detail::finite(acc))
            throw SolverError("interior_amplitudes: non-finite amplitude at segment " +
                              std::to_string(i));
        left[i + 1] = acc;
    }
    // right[i]: S from the left edge of cell i to the terminal plane
    std::vector<detail::ScalarS> right(n);
    detail::ScalarS tail;  // identity at the terminal plane
    right[n - 1] = tail;
    for (std::size_t i = n - 1; i-- > 0;) {
        tail = detail::star(detail::interface(w.q[i], w.q[i + 1]), tail);
        tail = detail::prepend_propagation(detail::propagation_phase(w.k[i], mesh.width(i)),
                                           tail);
        right[i] = tail;
    }

    std::vector<SegmentAmplitudes> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const complexd denom = 1.0 - left[i].r_out * right[i].r_in;
        const complexd a = left[i].t_fwd / denom;
        out[i] = {a, right[i].r_in * a, w.k[i]};
    }
    return out;
}

// Integral of |psi|^2 over one cell of width w, amplitudes referenced
// at the cell's left edge.  Closed forms per branch.
inline double cell_probability(const SegmentAmplitudes& s, double w_nm) {
    const double kr = s.k.real(), ki = s.k.imag();
    const double a2 = std::norm(s.A), b2 = std::norm(s.B);
    if (std::abs(s.k) * w_nm < 1e-12) {
        return std::norm(s.A + s.B) * w_nm;
    }
    if (ki == 0.0) {  // oscillatory
        const complexd cross = s.A * std::conj(s.B) *
                               (std::exp(complexd(0.0, 2.0 * kr * w_nm)) - 1.0) /
                               complexd(0.0, 2.0 * kr);
        return (a2 + b2) * w_nm + 2.0 * cross.real();
    }
    // evanescent: psi = A e^{-kappa x} + B e^{kappa x}
    const double kap = ki;
    double grow = 0.0;
    if (b2 > 0.0) grow = b2 * std::expm1(2.0 * kap * w_nm) / (2.0 * kap);
    const double decay = a2 > 0.0 ? a2 * -std::expm1(-2.0 * kap * w_nm) / (2.0 * kap) : 0.0;
    return decay + grow + 2.0 * (s.A * std::conj(s.B)).real() * w_nm;
}

// |psi|^2 at offset x from the cell's left edge.
inline double cell_density_at(const SegmentAmplitudes& s, double x_nm) {
    const complexd psi = s.A * std::exp(complexd(0.0, 1.0) * s.k * x_nm) +
                         s.B * std::exp(complexd(0.0, -1.0) * s.k * x_nm);
    return std::norm(psi);
}

}  // namespace qdot
