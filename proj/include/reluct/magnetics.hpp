#pragma once

// Reluctance laws, magnetic force and the flux <-> current map for a
// single-coil reluctance actuator. All functions are pure.

#include <cmath>
#include <stdexcept>

#include "reluct/params.hpp"

namespace reluct {

namespace detail {

inline void check_flux_domain(const ReluctanceModel& model, double phi) {
    if (model.saturating() && !(std::abs(phi) < model.flux_limit()))
        throw std::domain_error("magnetics: |phi| at or beyond the saturation flux");
}

inline void check_gap(double z) {
    if (!(z >= 0.0))
        throw std::domain_error("magnetics: air gap z must be non-negative");
}

}  // namespace detail

/// Reluctance of the magnetic circuit at gap z and flux phi [H⁻¹].
/// Basic law: R0 + kR·z. Saturation law: R0/(1 − |phi|/phi_sat) + kR·z.
inline double reluctance(const ReluctanceModel& model, const ActuatorParams& p,
                         double z, double phi) {
    detail::check_gap(z);
    detail::check_flux_domain(model, phi);
    double core = p.R0;
    if (model.saturating())
        core /= 1.0 - std::abs(phi) / model.phi_sat;
    return core + p.kR * z;
}

/// dR/dz: the gap term is the same affine slope for both laws [H⁻¹/m].
inline double reluctance_dz(const ReluctanceModel& model, const ActuatorParams& p,
                            double z, double phi) {
    detail::check_gap(z);
    detail::check_flux_domain(model, phi);
    return p.kR;
}

/// Magnetic (reluctance) force −½·kR·phi² [N]. Always attractive: it acts to
/// shrink the gap regardless of the sign of the flux.
inline double force(const ActuatorParams& p, double phi) {
    return -0.5 * p.kR * phi * phi;
}

/// Magnetomotive force phi·R(z,phi) [A-turns].
inline double mmf(const ReluctanceModel& model, const ActuatorParams& p,
                  double z, double phi) {
    return phi * reluctance(model, p, z, phi);
}

/// d(phi·R)/dphi. For the saturation law this is R0/(1 − |phi|/phi_sat)² + kR·z
/// for either flux sign, with the continuous limit at phi = 0.
inline double mmf_dphi(const ReluctanceModel& model, const ActuatorParams& p,
                       double z, double phi) {
    detail::check_gap(z);
    detail::check_flux_domain(model, phi);
    double core = p.R0;
    if (model.saturating()) {
        const double d = 1.0 - std::abs(phi) / model.phi_sat;
        core /= d * d;
    }
    return core + p.kR * z;
}

/// Coil current from Hopkinson's law, i = phi·R(z,phi)/N [A].
inline double current_from_flux(const ReluctanceModel& model, const ActuatorParams& p,
                                double z, double phi) {
    return mmf(model, p, z, phi) / p.N;
}

}  // namespace reluct
