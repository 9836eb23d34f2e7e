#pragma once

// Two-state dynamics of the qubit amplitudes: exact 2x2 unitary for a
// constant Hamiltonian, gate pulse timing, the WKB-style tunneling
// frequency estimate, and the controlled-NOT step built from
// calibrated couplings.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>

#include "qdot/constants.hpp"

namespace qdot {

using complexd = std::complex<double>;

// (omega_a, omega_b) = level energies over hbar; (c_a, c_b) the two
// cross couplings.  The effective coupling is sqrt(c_a c_b), which
// must be real.
struct TwoStateHamiltonian {
    double omega_a = 0.0;  // ps^-1
    double omega_b = 0.0;  // ps^-1
    double c_a = 0.0;      // ps^-1
    double c_b = 0.0;      // ps^-1
};

inline double effective_coupling(const TwoStateHamiltonian& h) {
    const double p = h.c_a * h.c_b;
    if (p < 0.0)
        throw std::invalid_argument("two-state hamiltonian: c_a*c_b must be non-negative");
    return std::sqrt(p);
}

// omega_0 = sqrt(((omega_a - omega_b)/2)^2 + c_a c_b)
inline double rabi_frequency(const TwoStateHamiltonian& h) {
    const double d = 0.5 * (h.omega_a - h.omega_b);
    const double c = effective_coupling(h);
    return std::sqrt(d * d + c * c);
}

// omega_+- = (omega_a + omega_b)/2 +- omega_0
inline std::pair<double, double> eigenfrequencies(const TwoStateHamiltonian& h) {
    const double mean = 0.5 * (h.omega_a + h.omega_b);
    const double w0 = rabi_frequency(h);
    return {mean + w0, mean - w0};
}

// Amplitudes on dot_a (the |1> basis state, channel side) and dot_b
// (the |0> basis state, gate side).
struct QubitState {
    complexd a{0.0, 0.0};
    complexd b{0.0, 0.0};

    double population_a() const { return std::norm(a); }
    double population_b() const { return std::norm(b); }

    static QubitState one() { return {{1.0, 0.0}, {0.0, 0.0}}; }
    static QubitState zero() { return {{0.0, 0.0}, {1.0, 0.0}}; }
    static QubitState equal_superposition() {
        const double r = 1.0 / std::sqrt(2.0);
        return {{r, 0.0}, {r, 0.0}};
    }
};

inline void validate(const QubitState& s) {
    const double n = s.population_a() + s.population_b();
    if (std::abs(n - 1.0) > 1e-9)
        throw std::invalid_argument("qubit state is not normalized");
}

// Exact propagator for constant (delta, c): with mean frequency w,
// detuning d and w0 = sqrt(d^2 + c^2),
//   U = e^{-i w t} [ cos w0 t - i (d/w0) sin w0 t,  -i (c/w0) sin w0 t
//                    -i (c/w0) sin w0 t,            cos w0 t + i (d/w0) sin w0 t ].
// Reduces to the symmetric-case matrix (global phase retained) at
// d = 0.
inline QubitState evolve(const QubitState& s, const TwoStateHamiltonian& h, double t_ps) {
    validate(s);
    const double mean = 0.5 * (h.omega_a + h.omega_b);
    const double d = 0.5 * (h.omega_a - h.omega_b);
    const double c = effective_coupling(h);
    const double w0 = std::sqrt(d * d + c * c);
    const double cosw = std::cos(w0 * t_ps);
    // sin(w0 t)/w0, regular at w0 -> 0
    const double x = w0 * t_ps;
    const double sfac = std::abs(x) < 1e-8 ? t_ps * (1.0 - x * x / 6.0) : std::sin(x) / w0;
    const complexd phase = std::exp(complexd(0.0, -mean * t_ps));
    const complexd i(0.0, 1.0);
    QubitState out;
    out.a = phase * ((cosw - i * d * sfac) * s.a - i * c * sfac * s.b);
    out.b = phase * (-i * c * sfac * s.a + (cosw + i * d * sfac) * s.b);
    return out;
}

// WKB-style estimate of the inter-dot tunneling frequency,
//   w0 = (4/hbar) ((V0-E)/V0) (E/(1+K l_w)) e^{-K l_d},
// K = sqrt(2m(V0-E))/hbar, for dot width l_w and barrier width l_d.
inline double tunneling_frequency_estimate(double v0_ev, double e_ev, double l_w_nm,
                                           double l_d_nm, double mass) {
    if (!(e_ev > 0.0) || !(e_ev < v0_ev))
        throw std::domain_error("tunneling_frequency_estimate: need 0 < E < V0");
    if (!(mass > 0.0) || !(l_w_nm > 0.0) || !(l_d_nm > 0.0))
        throw std::domain_error("tunneling_frequency_estimate: mass and widths must be positive");
    const double kappa =
        std::sqrt(mass * (v0_ev - e_ev) / constants::hbar2_over_2m0_ev_nm2);  // nm^-1
    return 4.0 / constants::hbar_ev_ps * ((v0_ev - e_ev) / v0_ev) * e_ev /
           (1.0 + kappa * l_w_nm) * std::exp(-kappa * l_d_nm);
}

namespace detail {

inline void require_on_resonance(const TwoStateHamiltonian& h) {
    const double w0 = rabi_frequency(h);
    if (!(std::abs(h.omega_a - h.omega_b) < 1e-3 * w0))
        throw std::invalid_argument("pulse requires an on-resonance hamiltonian");
}

}  // namespace detail

// Half Rabi oscillation, t = pi/(2 w0): populations swap.
inline QubitState not_pulse(const QubitState& s, const TwoStateHamiltonian& h) {
    detail::require_on_resonance(h);
    return evolve(s, h, constants::pi / (2.0 * rabi_frequency(h)));
}

// Quarter oscillation, t = pi/(4 w0): basis states go to equal-weight
// superpositions.
inline QubitState half_pulse(const QubitState& s, const TwoStateHamiltonian& h) {
    detail::require_on_resonance(h);
    return evolve(s, h, constants::pi / (4.0 * rabi_frequency(h)));
}

struct RegisterState {
    QubitState control;
    QubitState target;
};

// Couplings and detunings extracted from the two device calibrations.
struct CnotParameters {
    double level_energy_ev = 0.0;   // aligned level at the operating bias
    double coupling_on = 0.0;       // ps^-1, control |1> configuration at its v_res
    double coupling_off = 0.0;      // ps^-1, control |0> configuration
    double detuning_off = 0.0;      // ps^-1, half level detuning of the |0> config at that bias
    double bias_on_v = 0.0;
    double duration_ps = 0.0;       // pi/(2 coupling_on)
    double infidelity_bound = 0.0;  // c^2/(c^2 + delta^2), detuned transfer envelope
    double delta_over_c = 0.0;
};

struct CnotOutcome {
    RegisterState state;
    double target_flip_probability = 0.0;
    double infidelity = 0.0;  // reported gate infidelity
};

// One controlled-NOT step: the on-resonance bias of the control-|1>
// configuration is applied for a half oscillation.  A |1> control puts
// the target on resonance and flips it; a |0> control leaves the
// target detuned and the residual transfer envelope is reported as the
// infidelity.  The control is held frozen (no inter-qubit tunneling).
inline CnotOutcome cnot(const RegisterState& reg, const CnotParameters& p) {
    validate(reg.control);
    validate(reg.target);
    if (!(p.coupling_on > 0.0) || !(p.duration_ps > 0.0))
        throw std::invalid_argument("cnot: missing or invalid calibration parameters");
    const double pc = reg.control.population_a();
    const bool control_one = pc >= 1.0 - 1e-6;
    const bool control_zero = pc <= 1e-6;
    if (!control_one && !control_zero)
        throw std::invalid_argument(
            "cnot: control must be a computational basis state; superposed control is not "
            "representable in the product-state model");

    const double w_level = p.level_energy_ev / constants::hbar_ev_ps;
    TwoStateHamiltonian h;
    if (control_one) {
        h = {w_level, w_level, p.coupling_on, p.coupling_on};
    } else {
        h = {w_level + p.detuning_off, w_level - p.detuning_off, p.coupling_off,
             p.coupling_off};
    }

    CnotOutcome out;
    out.state.control = reg.control;
    out.state.target = evolve(reg.target, h, p.duration_ps);

    // population moved off the initial configuration
    const double pa0 = reg.target.population_a();
    const double pa1 = out.state.target.population_a();
    out.target_flip_probability = pa0 > 0.5 ? pa0 - pa1 : pa1 - pa0;
    out.infidelity = control_one ? 1.0 - out.target_flip_probability : p.infidelity_bound;
    return out;
}

}  // namespace qdot
