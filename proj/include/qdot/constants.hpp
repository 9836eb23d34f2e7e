#pragma once

// Physical constants (CODATA 2018) and the internal unit system.
//
// Internal units for the solver stack: eV, nm, ps.  All device-scale
// quantities stay O(1)..O(1e-5) in these units.  The environment and
// measurement formulas are evaluated in SI with conversion at the
// boundary.

namespace qdot::constants {

// SI base values
inline constexpr double e_si      = 1.602176634e-19;   // C (exact)
inline constexpr double hbar_si   = 1.054571817e-34;   // J s
inline constexpr double m0_si     = 9.1093837015e-31;  // kg, free electron mass
inline constexpr double eps0_si   = 8.8541878128e-12;  // F/m
inline constexpr double kb_si     = 1.380649e-23;      // J/K (exact)

// derived, eV-based
inline constexpr double hbar_ev_s  = hbar_si / e_si;               // 6.582119569e-16 eV s
inline constexpr double hbar_ev_ps = hbar_ev_s * 1e12;             // 6.582119569e-4  eV ps
inline constexpr double kb_ev_per_k = kb_si / e_si;                // 8.617333262e-5 eV/K

// hbar^2/(2 m0) = 0.0380998 eV nm^2; divide by the relative mass for
// a given segment.
inline constexpr double hbar2_over_2m0_ev_nm2 =
    hbar_si * hbar_si / (2.0 * m0_si * e_si) * 1e18;

// Coulomb coupling e^2/(4 pi eps0) = 1.439965 eV nm
inline constexpr double coulomb_ev_nm =
    e_si / (4.0 * 3.14159265358979323846 * eps0_si) * 1e9;

inline constexpr double pi = 3.14159265358979323846;

}  // namespace qdot::constants
