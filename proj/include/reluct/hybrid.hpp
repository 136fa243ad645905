#pragma once

// The three-mode hybrid automaton of a switching actuator: per-mode flows,
// flow sets, jump sets and jump maps. The armature either rests at one of
// the mechanical stops (modes MaxGap / MinGap, where only the flux evolves)
// or moves freely between them (mode Motion).

#include <optional>

#include "reluct/magnetics.hpp"
#include "reluct/params.hpp"

namespace reluct {

enum class Mode : int {
    MaxGap = 1,  ///< at rest against the z_max stop
    Motion = 2,  ///< free motion, full dynamics
    MinGap = 3,  ///< at rest against the z_min stop
};

/// Continuous state x = (z, v, phi).
struct State {
    double z = 0.0;    ///< air gap [m]
    double v = 0.0;    ///< velocity [m/s]
    double phi = 0.0;  ///< magnetic flux [Wb]
};

/// f_v: net acceleration of the armature [m/s²]. Independent of the supply
/// voltage and identical for both reluctance laws (same force expression).
inline double accel(const ActuatorParams& p, const State& x) {
    return force(p, x.phi) / p.m - (p.ks / p.m) * (x.z - p.zs) - (p.c / p.m) * x.v;
}

/// f_phi: flux rate u/N − (R/N²)·phi·R(z,phi) [Wb/s].
inline double flux_rate(const ActuatorParams& p, const ReluctanceModel& model,
                        const State& x, double u) {
    return u / p.N - (p.R / (p.N * p.N)) * mmf(model, p, x.z, x.phi);
}

/// Flow set membership. The stop modes pin (z, v) exactly; comparisons are
/// exact because jump maps produce those values bit-for-bit.
inline bool in_flow_set(Mode q, const State& x, const ActuatorParams& p,
                        const ReluctanceModel& model) {
    if (!(std::abs(x.phi) < (model.saturating() ? model.phi_sat
                                                : std::numeric_limits<double>::infinity())))
        return false;
    switch (q) {
        case Mode::MaxGap: return x.z == p.z_max && x.v == 0.0;
        case Mode::Motion: return x.z >= p.z_min && x.z <= p.z_max;
        case Mode::MinGap: return x.z == p.z_min && x.v == 0.0;
    }
    return false;
}

/// Mode flow f_q(x, u), returned as (dz/dt, dv/dt, dphi/dt) packed in a State.
/// Stop modes freeze position and velocity; the flux always evolves.
inline State flow(Mode q, const State& x, double u, const ActuatorParams& p,
                  const ReluctanceModel& model) {
    if (!in_flow_set(q, x, p, model))
        throw std::domain_error("flow: state outside the flow set of the requested mode");
    State dx;
    dx.phi = flux_rate(p, model, x, u);
    if (q == Mode::Motion) {
        dx.z = x.v;
        dx.v = accel(p, x);
    }
    return dx;
}

struct JumpResult {
    State x;
    Mode q;
};

/// Jump map. Returns the destination iff x lies in the jump set D_q:
///   MaxGap:  f_v(x) < 0                      -> Motion (state unchanged)
///   Motion:  z = z_max, v >= 0               -> MaxGap, v+ = 0
///            z = z_min, v <= 0               -> MinGap, v+ = 0
///   MinGap:  f_v(x) > 0                      -> Motion (state unchanged)
/// The supply voltage u is accepted for interface uniformity; none of the
/// jump conditions depend on it (f_v does not involve u).
inline std::optional<JumpResult> jump(Mode q, const State& x, [[maybe_unused]] double u,
                                      const ActuatorParams& p,
                                      [[maybe_unused]] const ReluctanceModel& model) {
    switch (q) {
        case Mode::MaxGap:
            if (accel(p, x) < 0.0) return JumpResult{x, Mode::Motion};
            return std::nullopt;
        case Mode::Motion:
            if (x.z == p.z_max && x.v >= 0.0)
                return JumpResult{State{x.z, 0.0, x.phi}, Mode::MaxGap};
            if (x.z == p.z_min && x.v <= 0.0)
                return JumpResult{State{x.z, 0.0, x.phi}, Mode::MinGap};
            return std::nullopt;
        case Mode::MinGap:
            if (accel(p, x) > 0.0) return JumpResult{x, Mode::Motion};
            return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace reluct
