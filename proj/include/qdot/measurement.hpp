#pragma once

// FET-channel readout model: threshold-voltage shift from the charge
// configuration, shot-noise-limited measurement time
//   1/tau_ms = (sqrt((I_d + |dI|)/e) - sqrt(I_d/e))^2,
// and the weak/strong damping classification against the qubit
// tunneling frequency.

#include <cmath>
#include <limits>
#include <stdexcept>

#include "qdot/constants.hpp"

namespace qdot {

struct DetectorParameters {
    double transconductance_s = 0.0;     // g_m, Ohm^-1
    double operating_current_a = 0.0;    // I_d
    double inter_dot_distance_nm = 0.0;  // d_ab
    double dielectric_constant = 0.0;
    double area_per_dot_nm2 = 0.0;
};

inline void validate(const DetectorParameters& d) {
    if (!(d.transconductance_s > 0.0) || !(d.inter_dot_distance_nm > 0.0) ||
        !(d.dielectric_constant > 0.0) || !(d.area_per_dot_nm2 > 0.0))
        throw std::invalid_argument("detector: g_m, d_ab, eps, area must be positive");
    if (d.operating_current_a < 0.0)
        throw std::invalid_argument("detector: operating current must be >= 0");
}

// Threshold shift of a single qubit, parallel-plate reading
// e d_ab / (eps0 eps A), volts.
inline double threshold_shift(const DetectorParameters& d) {
    validate(d);
    return constants::e_si * d.inter_dot_distance_nm * 1e-9 /
           (constants::eps0_si * d.dielectric_constant * d.area_per_dot_nm2 * 1e-18);
}

// Signed channel-current change, dI = -g_m dV_th.
inline double current_shift(const DetectorParameters& d, double delta_v_th) {
    validate(d);
    return -d.transconductance_s * delta_v_th;
}

// Shot-noise discrimination time; +inf when the current shift vanishes.
inline double measurement_time(double i_d_a, double delta_i_a) {
    const double di = std::abs(delta_i_a);
    if (i_d_a < 0.0) throw std::domain_error("measurement_time: current must be >= 0");
    if (di == 0.0) return std::numeric_limits<double>::infinity();
    const double e = constants::e_si;
    const double s = std::sqrt((i_d_a + di) / e) - std::sqrt(i_d_a / e);
    return 1.0 / (s * s);
}

enum class DampingRegime { weak_damping, strong_damping };

inline const char* to_string(DampingRegime r) {
    return r == DampingRegime::weak_damping ? "weak_damping" : "strong_damping";
}

struct DampingClassification {
    DampingRegime regime = DampingRegime::weak_damping;
    bool boundary = false;       // 1/tau_ms within rounding of delta
    double tau_zeno_s = 0.0;     // strong damping only
};

// Weak damping: the charge oscillation outruns the detector
// (1/tau_ms < delta).  Strong damping additionally carries the Zeno
// time (1/tau_ms)/(8 delta^2), kept exactly in this printed form.
// Ties classify as weak with the boundary flag set.
inline DampingClassification damping_regime(double tau_ms_s, double delta_s) {
    if (!(tau_ms_s > 0.0) || !(delta_s > 0.0))
        throw std::domain_error("damping_regime: tau_ms and delta must be > 0");
    DampingClassification c;
    const double rate = 1.0 / tau_ms_s;
    const bool tie = std::abs(rate - delta_s) <= 1e-12 * delta_s;
    if (rate > delta_s && !tie) {
        c.regime = DampingRegime::strong_damping;
        c.tau_zeno_s = rate / (8.0 * delta_s * delta_s);
    } else {
        c.regime = DampingRegime::weak_damping;
        c.boundary = tie;
    }
    return c;
}

struct ReadoutReport {
    double delta_v_th_v = 0.0;
    double delta_i_d_a = 0.0;  // signed
    double tau_ms_s = 0.0;
    double delta_s = 0.0;      // qubit tunneling frequency used
    DampingClassification damping;
};

inline ReadoutReport readout_report(const DetectorParameters& det, double delta_s) {
    ReadoutReport r;
    r.delta_v_th_v = threshold_shift(det);
    r.delta_i_d_a = current_shift(det, r.delta_v_th_v);
    r.tau_ms_s = measurement_time(det.operating_current_a, r.delta_i_d_a);
    r.delta_s = delta_s;
    r.damping = damping_regime(r.tau_ms_s, delta_s);
    return r;
}

}  // namespace qdot
