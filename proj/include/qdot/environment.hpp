#pragma once

// Spin-boson decoherence estimates for the charge qubit coupled to the
// acoustic-phonon bath of the host oxide, in the Debye approximation
// at T = 0.  Spectral function
//   (1/2 pi hbar) J(w) = g^2/(2 pi^2 hbar rho c^5) w^3
//                      + g^2 nu^2/(2 pi^2 hbar rho c^3 d^2) w
// (superohmic + ohmic), underdamped decay rate
//   Gamma_so = g^2 D^3 / (4 pi hbar rho c^5),
// bath renormalization D~ = D exp(-g^2 w_c^2/(2 pi^2 hbar rho c^5)).
// All formulas evaluated in SI; g (deformation potential) enters in
// joules.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "qdot/constants.hpp"

namespace qdot {

struct BathParameters {
    double deformation_potential_ev = 0.0;  // gamma, eV
    double sound_velocity_m_s = 0.0;        // c
    double mass_density_kg_m3 = 0.0;        // rho
    double lattice_constant_m = 0.0;        // d
    double coupling_ratio = 0.0;            // nu, dimensionless
    double debye_temperature_k = 0.0;       // Theta_D
};

inline void validate(const BathParameters& b) {
    if (!(b.deformation_potential_ev > 0.0) || !(b.sound_velocity_m_s > 0.0) ||
        !(b.mass_density_kg_m3 > 0.0) || !(b.lattice_constant_m > 0.0) ||
        !(b.coupling_ratio > 0.0) || !(b.debye_temperature_k > 0.0))
        throw std::invalid_argument("bath: all parameters must be positive");
}

inline bool bath_coupling_suspicious(const BathParameters& b) {
    return b.coupling_ratio > 0.1;  // nu << 1 expected
}

namespace detail {

inline double gamma_sq_j2(const BathParameters& b) {
    const double g = b.deformation_potential_ev * constants::e_si;
    return g * g;
}

}  // namespace detail

// Superohmic part of (1/2 pi hbar) J(w), s^-1.
inline double spectral_function_superohmic(double omega_s, const BathParameters& b) {
    if (omega_s < 0.0) throw std::domain_error("spectral_function: omega must be >= 0");
    const double c5 = std::pow(b.sound_velocity_m_s, 5);
    return detail::gamma_sq_j2(b) /
           (2.0 * constants::pi * constants::pi * constants::hbar_si * b.mass_density_kg_m3 * c5) *
           omega_s * omega_s * omega_s;
}

// Ohmic part of (1/2 pi hbar) J(w), s^-1.
inline double spectral_function_ohmic(double omega_s, const BathParameters& b) {
    if (omega_s < 0.0) throw std::domain_error("spectral_function: omega must be >= 0");
    const double c3 = std::pow(b.sound_velocity_m_s, 3);
    const double d2 = b.lattice_constant_m * b.lattice_constant_m;
    return detail::gamma_sq_j2(b) * b.coupling_ratio * b.coupling_ratio /
           (2.0 * constants::pi * constants::pi * constants::hbar_si * b.mass_density_kg_m3 * c3 *
            d2) *
           omega_s;
}

inline double spectral_function(double omega_s, const BathParameters& b) {
    return spectral_function_superohmic(omega_s, b) + spectral_function_ohmic(omega_s, b);
}

// Frequency where the two spectral terms are equal: w_x = nu c / d.
inline double ohmic_crossover_frequency(const BathParameters& b) {
    return b.coupling_ratio * b.sound_velocity_m_s / b.lattice_constant_m;
}

// Exponent of the bath overlap factor, dimensionless and positive.
inline double renormalization_exponent(const BathParameters& b, double omega_c_s) {
    const double c5 = std::pow(b.sound_velocity_m_s, 5);
    return detail::gamma_sq_j2(b) * omega_c_s * omega_c_s /
           (2.0 * constants::pi * constants::pi * constants::hbar_si * b.mass_density_kg_m3 * c5);
}

// Renormalized tunneling frequency (superohmic exponent only; the
// closed form excludes the ohmic contribution).  Underflows to zero
// for deep suppression.
inline double renormalized_tunneling(double delta_s, const BathParameters& b, double omega_c_s) {
    if (!(delta_s > 0.0)) throw std::domain_error("renormalized_tunneling: delta must be > 0");
    if (!(omega_c_s > 0.0)) throw std::domain_error("renormalized_tunneling: omega_c must be > 0");
    return delta_s * std::exp(-renormalization_exponent(b, omega_c_s));
}

// T = 0 underdamped decay rate at effective tunneling frequency
// delta_eff (caller picks bare or renormalized), s^-1.
inline double superohmic_damping_rate(double delta_eff_s, const BathParameters& b) {
    if (delta_eff_s < 0.0) throw std::domain_error("superohmic_damping_rate: delta must be >= 0");
    const double c5 = std::pow(b.sound_velocity_m_s, 5);
    return detail::gamma_sq_j2(b) * delta_eff_s * delta_eff_s * delta_eff_s /
           (4.0 * constants::pi * constants::hbar_si * b.mass_density_kg_m3 * c5);
}

// Dimensionless ohmic dissipation coefficient alpha.
inline double ohmic_alpha(const BathParameters& b) {
    const double c3 = std::pow(b.sound_velocity_m_s, 3);
    const double d2 = b.lattice_constant_m * b.lattice_constant_m;
    return detail::gamma_sq_j2(b) * b.coupling_ratio * b.coupling_ratio /
           (2.0 * constants::pi * constants::pi * constants::hbar_si * b.mass_density_kg_m3 * c3 *
            d2);
}

enum class CoherenceRegime { coherent_underdamped, incoherent };

inline const char* to_string(CoherenceRegime r) {
    return r == CoherenceRegime::coherent_underdamped ? "coherent_underdamped" : "incoherent";
}

struct DecoherenceReport {
    double delta_bare_per_ps = 0.0;
    double delta_tilde_per_ps = 0.0;
    double renormalization_exponent = 0.0;
    double omega_c_s = 0.0;
    double gamma_so_bare_s = 0.0;    // rate at bare delta
    double gamma_so_renorm_s = 0.0;  // rate at renormalized delta
    double tau_so_bare_s = 0.0;      // +inf when the rate underflows
    double tau_so_renorm_s = 0.0;
    double alpha_ohmic = 0.0;
    double ohmic_crossover_s = 0.0;
    CoherenceRegime regime = CoherenceRegime::coherent_underdamped;
    double gate_time_s = 0.0;
    double ops_per_coherence = 0.0;  // tau_so_bare / gate_time
    // evaluation is T = 0 only; finite temperature is out of scope
};

inline DecoherenceReport decoherence_report(double delta_s, const BathParameters& b,
                                            double gate_time_s) {
    validate(b);
    if (!(delta_s > 0.0)) throw std::domain_error("decoherence_report: delta must be > 0");
    if (!(gate_time_s > 0.0)) throw std::domain_error("decoherence_report: gate time must be > 0");

    DecoherenceReport r;
    r.omega_c_s = constants::kb_si * b.debye_temperature_k / constants::hbar_si;
    r.renormalization_exponent = renormalization_exponent(b, r.omega_c_s);
    const double delta_tilde = delta_s * std::exp(-r.renormalization_exponent);
    r.delta_bare_per_ps = delta_s * 1e-12;
    r.delta_tilde_per_ps = delta_tilde * 1e-12;
    r.gamma_so_bare_s = superohmic_damping_rate(delta_s, b);
    r.gamma_so_renorm_s = superohmic_damping_rate(delta_tilde, b);
    auto inv = [](double g) {
        return g > 0.0 ? 1.0 / g : std::numeric_limits<double>::infinity();
    };
    r.tau_so_bare_s = inv(r.gamma_so_bare_s);
    r.tau_so_renorm_s = inv(r.gamma_so_renorm_s);
    r.alpha_ohmic = ohmic_alpha(b);
    r.ohmic_crossover_s = ohmic_crossover_frequency(b);
    r.regime = r.alpha_ohmic < 0.5 ? CoherenceRegime::coherent_underdamped
                                   : CoherenceRegime::incoherent;
    r.gate_time_s = gate_time_s;
    r.ops_per_coherence = r.tau_so_bare_s / gate_time_s;
    return r;
}

}  // namespace qdot
