#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qdot/constants.hpp"
#include "qdot/environment.hpp"
#include "qdot/presets.hpp"

using namespace qdot;
using doctest::Approx;

namespace {

// second computation route: eV/nm/ps unit system, converted at the
// boundary, for the dimensional audit
namespace evps {
constexpr double hbar = constants::hbar_ev_ps;                    // eV ps
constexpr double kg = 1.0 / constants::e_si * 1e24 / 1e18;        // eV ps^2 / nm^2 per kg
constexpr double m_per_s = 1e9 / 1e12;                            // nm/ps per m/s

inline double damping_rate_per_ps(double delta_per_ps, const BathParameters& b) {
    const double g = b.deformation_potential_ev;                  // eV
    const double rho = b.mass_density_kg_m3 * kg / 1e27;          // eV ps^2 / nm^5
    const double c = b.sound_velocity_m_s * m_per_s;              // nm/ps
    return g * g * delta_per_ps * delta_per_ps * delta_per_ps /
           (4.0 * constants::pi * hbar * rho * std::pow(c, 5));
}

inline double alpha(const BathParameters& b) {
    const double g = b.deformation_potential_ev;
    const double rho = b.mass_density_kg_m3 * kg / 1e27;
    const double c = b.sound_velocity_m_s * m_per_s;
    const double d = b.lattice_constant_m * 1e9;                  // nm
    return g * g * b.coupling_ratio * b.coupling_ratio /
           (2.0 * constants::pi * constants::pi * hbar * rho * std::pow(c, 3) * d * d);
}
}  // namespace evps

double delta_from_hbar_delta(double hbar_delta_ev) {
    return hbar_delta_ev / constants::hbar_ev_s;  // s^-1
}

}  // namespace

TEST_CASE("spectral function: limits and scaling") {
    const auto b = presets::a_sio2_bath();
    CHECK(spectral_function(0.0, b) == 0.0);
    CHECK_THROWS_AS(spectral_function(-1.0, b), std::domain_error);

    // cubic scaling once the ohmic term is negligible
    const double w = 1e12;
    const double j1 = spectral_function_superohmic(w, b);
    const double j2 = spectral_function_superohmic(2.0 * w, b);
    CHECK(j2 / j1 == Approx(8.0).epsilon(1e-12));

    // the two terms cross at w_x = nu c / d
    const double wx = ohmic_crossover_frequency(b);
    CHECK(wx == Approx(1e-4 * 4300.0 / 0.5e-9).epsilon(1e-12));
    CHECK(spectral_function_superohmic(wx, b) ==
          Approx(spectral_function_ohmic(wx, b)).epsilon(1e-10));
    CHECK(spectral_function_superohmic(10.0 * wx, b) > spectral_function_ohmic(10.0 * wx, b));
    CHECK(spectral_function_superohmic(0.1 * wx, b) < spectral_function_ohmic(0.1 * wx, b));
}

TEST_CASE("superohmic damping: reference decoherence time at the bare tunneling frequency") {
    const auto b = presets::a_sio2_bath();
    const double delta = delta_from_hbar_delta(1e-5);
    const double gamma = superohmic_damping_rate(delta, b);
    const double tau = 1.0 / gamma;
    CHECK(tau == Approx(4.8e-7).epsilon(0.10));
    CHECK(superohmic_damping_rate(0.0, b) == 0.0);
    CHECK(superohmic_damping_rate(2.0 * delta, b) / gamma == Approx(8.0).epsilon(1e-12));
}

TEST_CASE("renormalization: overlap exponent wipes out the tunneling frequency") {
    const auto b = presets::a_sio2_bath();
    const double wc = constants::kb_si * 450.0 / constants::hbar_si;
    const double expo = renormalization_exponent(b, wc);
    CHECK(expo > 1e3);
    CHECK(expo < 2e3);
    // quadratic in the cutoff
    CHECK(renormalization_exponent(b, 2.0 * wc) == Approx(4.0 * expo).epsilon(1e-12));

    const double delta = delta_from_hbar_delta(1e-5);
    CHECK(renormalized_tunneling(delta, b, wc) < delta * std::exp(-700.0));

    auto weak = b;
    weak.deformation_potential_ev = 0.0;  // uncoupled bath leaves delta untouched
    CHECK(renormalized_tunneling(delta, weak, wc) == delta);
}

TEST_CASE("ohmic coefficient") {
    const auto b = presets::a_sio2_bath();
    const double a = ohmic_alpha(b);
    CHECK(a > 1e-7);
    CHECK(a < 4e-7);  // within a factor two of the reference 2e-7
    auto b2 = b;
    b2.coupling_ratio = 2e-4;
    CHECK(ohmic_alpha(b2) == Approx(4.0 * a).epsilon(1e-12));
    b2.coupling_ratio = 0.0;  // formula limit, bypasses report validation
    CHECK(ohmic_alpha(b2) == 0.0);
}

TEST_CASE("decoherence report") {
    const auto b = presets::a_sio2_bath();
    const double delta = delta_from_hbar_delta(1e-5);
    const auto r = decoherence_report(delta, b, 5.2e-12);

    CHECK(r.regime == CoherenceRegime::coherent_underdamped);
    CHECK(r.delta_tilde_per_ps <= r.delta_bare_per_ps);
    CHECK(r.gamma_so_renorm_s <= r.gamma_so_bare_s);
    CHECK(r.tau_so_bare_s * r.gamma_so_bare_s == Approx(1.0).epsilon(1e-15));
    CHECK(r.ops_per_coherence == r.tau_so_bare_s / r.gate_time_s);
    CHECK(r.ops_per_coherence == Approx(9.2e4).epsilon(0.05));
    CHECK(r.ops_per_coherence >= 1e3);

    const auto unity = decoherence_report(delta, b, r.tau_so_bare_s);
    CHECK(unity.ops_per_coherence == Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(decoherence_report(0.0, b, 1e-12), std::domain_error);
    CHECK_THROWS_AS(decoherence_report(delta, b, 0.0), std::domain_error);
    auto bad = b;
    bad.mass_density_kg_m3 = 0.0;
    CHECK_THROWS_AS(decoherence_report(delta, bad, 1e-12), std::invalid_argument);
}

TEST_CASE("large coupling ratio flags the incoherent regime") {
    auto b = presets::a_sio2_bath();
    CHECK_FALSE(bath_coupling_suspicious(b));
    b.coupling_ratio = 0.9;  // alpha ~ 2e-7 / (1e-4)^2 * 0.81 >> 0.5
    CHECK(bath_coupling_suspicious(b));
    const auto r = decoherence_report(1e10, b, 1e-12);
    CHECK(r.regime == CoherenceRegime::incoherent);
}

TEST_CASE("dimensional audit: SI route equals the eV/nm/ps route") {
    const auto b = presets::a_sio2_bath();
    const double delta = delta_from_hbar_delta(1e-5);

    const double gamma_si = superohmic_damping_rate(delta, b);          // s^-1
    const double gamma_evps = evps::damping_rate_per_ps(delta * 1e-12, b) * 1e12;
    CHECK(gamma_si == Approx(gamma_evps).epsilon(1e-10));

    CHECK(ohmic_alpha(b) == Approx(evps::alpha(b)).epsilon(1e-10));
}
