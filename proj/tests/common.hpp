#pragma once

#include "reluct/params.hpp"

/// Parameter set used throughout the tests (small commercial device).
inline reluct::ActuatorParams table1(double z_min = 0.0, double z_max = 5e-3) {
    reluct::ActuatorParams p;
    p.R = 50.0;
    p.N = 1200.0;
    p.R0 = 1.5e7;
    p.kR = 2e10;
    p.phi_sat = 20e-6;
    p.m = 1e-3;
    p.ks = 55.0;
    p.zs = 15e-3;
    p.c = 0.1;
    p.z_min = z_min;
    p.z_max = z_max;
    return p;
}

/// Expected values frozen from the independent oracles (bisection /
/// high-precision evaluation); see oracles.hpp for the recomputation paths.
namespace frozen {
constexpr double phi0 = 9.082951062292475e-6;        // [Wb]
constexpr double u0 = 5.6768444139327969;            // [V]
constexpr double zb = 0.00975;                       // [m]
constexpr double phib = 5.3735463150511693e-6;       // [Wb]
constexpr double ub = 47.018530256697731;            // [V]
constexpr double phi_max_5mm = 7.4161984870956629e-6;  // [Wb], z_max = 5 mm
constexpr double u_max_5mm = 35.535951084000052;     // [V]
constexpr double u0_sat = 10.399961466372028;        // [V], phi_sat = 20 uWb
constexpr double u_max_sat_5mm = 38.26763752746067;  // [V]
constexpr double zb_sat = 0.0095252022907911833;     // [m]
constexpr double phib_sat = 5.4873843860849125e-6;   // [Wb]
constexpr double ub_sat = 48.283430224277289;        // [V]
constexpr double flux_eig_zs = -10937.5;             // [1/s]
constexpr double mech_eig_re = -50.0;                // [1/s]
constexpr double mech_eig_im = 229.12878474779195;   // [1/s]
}  // namespace frozen
