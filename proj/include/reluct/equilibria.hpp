#pragma once

// Equilibrium location and classification, for the continuous (motion-mode)
// dynamics and for the full hybrid automaton, plus the closed-form critical
// points: domain-entry voltage u0, tangential bifurcation (fold) at
// (zb, phib, ub), the stop lift-off voltages u_min / u_max, and their
// counterparts under magnetic saturation.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "reluct/errors.hpp"
#include "reluct/hybrid.hpp"
#include "reluct/magnetics.hpp"

namespace reluct {

enum class Stability { Stable, Unstable, Marginal };

inline const char* to_string(Stability s) {
    switch (s) {
        case Stability::Stable: return "stable";
        case Stability::Unstable: return "unstable";
        case Stability::Marginal: return "marginal";
    }
    return "?";
}

/// A located fixed point of the automaton. The velocity is identically zero
/// at every equilibrium, so only (z, phi) are stored.
struct Equilibrium {
    Mode mode = Mode::Motion;
    double z = 0.0;
    double phi = 0.0;
    double u = 0.0;
    Stability stability = Stability::Marginal;
    int branch = -1;
};

/// Position window for continuous-mode equilibrium searches. z_hi may be
/// +inf, meaning "no upper mechanical stop".
struct ZDomain {
    double z_lo = 0.0;
    double z_hi = std::numeric_limits<double>::infinity();
};

// --- steady flux -------------------------------------------------------------

/// The unique flux solving f_phi = 0 at a pinned gap: phi·R(z,phi) = N·u/R.
/// sign(phi) = sign(u). For the saturation law the map is onto, so a solution
/// exists for every finite u and satisfies |phi| < phi_sat.
inline double steady_flux(const ActuatorParams& p, const ReluctanceModel& model,
                          double z, double u) {
    detail::check_gap(z);
    if (u == 0.0) return 0.0;
    const double target = p.N * std::abs(u) / p.R;  // magnetomotive force [A-turns]
    const double sign = u > 0.0 ? 1.0 : -1.0;
    if (!model.saturating()) return sign * target / (p.R0 + p.kR * z);

    // safeguarded Newton on the strictly increasing mmf, bracketed in
    // (0, phi_sat); the asymptote at phi_sat guarantees the bracket.
    double lo = 0.0, hi = model.flux_limit();
    double phi = std::min(target / (p.R0 + p.kR * z), 0.5 * (lo + hi));
    for (int iter = 0; iter < 200; ++iter) {
        const double f = mmf(model, p, z, phi) - target;
        if (f > 0.0)
            hi = phi;
        else
            lo = phi;
        const double step = f / mmf_dphi(model, p, z, phi);
        double next = phi - step;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - phi) <= 1e-16 * model.phi_sat) return sign * next;
        phi = next;
    }
    throw NumericError("steady_flux: Newton iteration did not converge");
}

// --- linearization ------------------------------------------------------------

/// Analytic Jacobian of the motion-mode flow (f_z, f_v, f_phi) w.r.t.
/// (z, v, phi). The saturated flux column uses the sign-consistent derivative
/// of phi·R(z,phi), which is continuous through phi = 0.
inline Eigen::Matrix3d jacobian(const ActuatorParams& p, const ReluctanceModel& model,
                                const State& x, [[maybe_unused]] double u) {
    const double k = p.R / (p.N * p.N);
    Eigen::Matrix3d J;
    J << 0.0, 1.0, 0.0,
        -p.ks / p.m, -p.c / p.m, -(p.kR / p.m) * x.phi,
        -k * p.kR * x.phi, 0.0, -k * mmf_dphi(model, p, x.z, x.phi);
    return J;
}

/// Lyapunov's indirect method with a spectral-scale dead band:
/// eps = 1e-9 · max(1, max|lambda|).
inline Stability classify_stability(const Eigen::Matrix3d& J) {
    if (!J.allFinite()) throw NumericError("classify_stability: non-finite Jacobian");
    Eigen::EigenSolver<Eigen::Matrix3d> solver(J, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw NumericError("classify_stability: eigenvalue computation failed");
    const auto lambda = solver.eigenvalues();
    double mag = 0.0;
    for (int i = 0; i < 3; ++i) mag = std::max(mag, std::abs(lambda[i]));
    const double eps = 1e-9 * std::max(1.0, mag);
    bool all_negative = true, any_positive = false;
    for (int i = 0; i < 3; ++i) {
        if (!(lambda[i].real() < -eps)) all_negative = false;
        if (lambda[i].real() > eps) any_positive = true;
    }
    if (any_positive) return Stability::Unstable;
    return all_negative ? Stability::Stable : Stability::Marginal;
}

// --- continuous-mode equilibria -----------------------------------------------

namespace detail {

/// Gap on the f_v = 0 parabola at a given flux.
inline double gap_on_force_balance(const ActuatorParams& p, double phi) {
    return p.zs - p.kR * phi * phi / (2.0 * p.ks);
}

inline Equilibrium make_motion_equilibrium(const ActuatorParams& p,
                                           const ReluctanceModel& model, double phi,
                                           double u, const ZDomain& dom) {
    double z = gap_on_force_balance(p, phi);
    const double ztol = 1e-9 * p.zs;
    if (std::abs(z - dom.z_lo) <= ztol) z = dom.z_lo;
    if (std::isfinite(dom.z_hi) && std::abs(z - dom.z_hi) <= ztol) z = dom.z_hi;
    Equilibrium eq;
    eq.mode = Mode::Motion;
    eq.z = z;
    eq.phi = phi;
    eq.u = u;
    eq.stability = classify_stability(jacobian(p, model, State{z, 0.0, phi}, u));
    return eq;
}

/// Real roots of the basic-model equilibrium cubic
///   (kR²/2ks)·phi³ − (R0 + kR·zs)·phi + N·u/R = 0
/// via companion-matrix eigenvalues (robust to the near-double root at the
/// fold, where polynomial iterations go ill-conditioned). The variable is
/// rescaled so the companion entries are O(1), and accepted roots get a
/// Newton polish on the original cubic.
inline std::vector<double> basic_equilibrium_fluxes(const ActuatorParams& p, double u) {
    const double a = p.kR * p.kR / (2.0 * p.ks);
    const double b = -(p.R0 + p.kR * p.zs);
    const double cc = p.N * u / p.R;
    const double s = std::sqrt(-b / a);  // flux scale: the outer-root magnitude
    const double pc = b / (a * s * s);   // -1 up to rounding
    const double qc = cc / (a * s * s * s);
    Eigen::Matrix3d C;
    C << 0.0, 0.0, -qc,
         1.0, 0.0, -pc,
         0.0, 1.0, 0.0;
    Eigen::EigenSolver<Eigen::Matrix3d> solver(C, false);
    if (solver.info() != Eigen::Success)
        throw NumericError("continuous_equilibria: companion eigensolve failed");
    const auto roots = solver.eigenvalues();
    double scale = 0.0;
    for (int i = 0; i < 3; ++i) scale = std::max(scale, std::abs(roots[i]));
    std::vector<double> out;
    for (int i = 0; i < 3; ++i) {
        if (!(std::abs(roots[i].imag()) < 1e-9 * scale)) continue;
        double phi = s * roots[i].real();
        for (int it = 0; it < 3; ++it) {
            const double f = (a * phi * phi + b) * phi + cc;
            const double df = 3.0 * a * phi * phi + b;
            if (std::abs(df) < 1e-3 * std::abs(b)) break;  // near the fold: keep the estimate
            phi -= f / df;
        }
        out.push_back(phi);
    }
    return out;
}

/// Roots of phi·R(z(phi),phi) = N·u/R on the admissible flux set, found by a
/// bracketing scan plus safeguarded Newton. Used for the saturation law,
/// where the equilibrium condition is no longer polynomial.
inline std::vector<double> saturated_equilibrium_fluxes(const ActuatorParams& p,
                                                        const ReluctanceModel& model,
                                                        double u, const ZDomain& dom) {
    std::vector<double> out;
    if (p.zs < dom.z_lo) return out;
    const double phi_outer =
        std::min(model.flux_limit(), std::sqrt(2.0 * p.ks * (p.zs - dom.z_lo) / p.kR));
    const double phi_inner =
        std::isfinite(dom.z_hi) && dom.z_hi < p.zs
            ? std::sqrt(2.0 * p.ks * (p.zs - dom.z_hi) / p.kR)
            : 0.0;
    if (!(phi_inner < phi_outer)) return out;

    const double target = p.N * u / p.R;
    auto g = [&](double phi) {
        return phi * (p.R0 / (1.0 - std::abs(phi) / model.phi_sat) + p.kR * gap_on_force_balance(p, phi)) -
               target;
    };
    auto dg = [&](double phi) {
        const double d = 1.0 - std::abs(phi) / model.phi_sat;
        return p.R0 / (d * d) + p.kR * gap_on_force_balance(p, phi) -
               p.kR * p.kR * phi * phi / p.ks;
    };
    auto refine = [&](double lo, double hi) {
        double glo = g(lo);
        double phi = 0.5 * (lo + hi);
        for (int iter = 0; iter < 200; ++iter) {
            const double f = g(phi);
            if ((f > 0.0) == (glo > 0.0)) {
                lo = phi;
                glo = f;
            } else {
                hi = phi;
            }
            double next = phi - f / dg(phi);
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            if (std::abs(next - phi) <= 1e-16 * model.phi_sat) return next;
            phi = next;
        }
        return phi;
    };

    constexpr int kScan = 2001;
    const double segs[2][2] = {{-phi_outer, -phi_inner}, {phi_inner, phi_outer}};
    const int first = phi_inner == 0.0 ? 1 : 0;  // intervals merge through zero
    for (int s = first; s < 2; ++s) {
        double lo = first == 1 && s == 1 ? -phi_outer : segs[s][0];
        const double hi = segs[s][1];
        double prev = lo, gprev = g(lo);
        for (int j = 1; j <= kScan; ++j) {
            const double phi = lo + (hi - lo) * j / kScan;
            const double gj = g(phi);
            if (gj == 0.0) {
                out.push_back(phi);
            } else if ((gprev > 0.0) != (gj > 0.0)) {
                out.push_back(refine(prev, phi));
            }
            prev = phi;
            gprev = gj;
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(),
                          [&](double a, double b) { return std::abs(a - b) < 1e-12 * model.phi_sat; }),
              out.end());
    return out;
}

}  // namespace detail

/// All motion-mode equilibria at supply voltage u with gap in the given
/// window. An empty result is valid: beyond the fold voltage no equilibrium
/// exists.
inline std::vector<Equilibrium> continuous_equilibria(const ActuatorParams& p,
                                                      const ReluctanceModel& model, double u,
                                                      const ZDomain& dom = {}) {
    if (!(dom.z_lo >= 0.0))
        throw std::invalid_argument("continuous_equilibria: z_lo must be non-negative");
    std::vector<Equilibrium> out;
    if (!model.saturating()) {
        const double ztol = 1e-9 * p.zs;
        for (double phi : detail::basic_equilibrium_fluxes(p, u)) {
            const double z = detail::gap_on_force_balance(p, phi);
            if (z >= dom.z_lo - ztol && z <= dom.z_hi + ztol)
                out.push_back(detail::make_motion_equilibrium(p, model, phi, u, dom));
        }
    } else {
        for (double phi : detail::saturated_equilibrium_fluxes(p, model, u, dom))
            out.push_back(detail::make_motion_equilibrium(p, model, phi, u, dom));
    }
    std::sort(out.begin(), out.end(), [](const Equilibrium& a, const Equilibrium& b) {
        return a.z < b.z || (a.z == b.z && a.phi < b.phi);
    });
    for (std::size_t i = 0; i < out.size(); ++i) out[i].branch = static_cast<int>(i);
    return out;
}

// --- hybrid equilibria ---------------------------------------------------------

/// Equilibria of the full automaton at voltage u: interior motion-mode points
/// (strictly between the stops; a boundary point with v = 0 lies in the jump
/// set and is covered by the stop modes), plus stop-mode points wherever the
/// steady flux keeps the armature pressed against the stop. A stop point at
/// exactly the lift-off condition f_v = 0 is reported Marginal.
inline std::vector<Equilibrium> hybrid_equilibria(const ActuatorParams& p,
                                                  const ReluctanceModel& model, double u) {
    const double ztol = 1e-9 * p.zs;
    std::vector<Equilibrium> out;
    for (const Equilibrium& eq :
         continuous_equilibria(p, model, u, ZDomain{p.z_min, p.z_max})) {
        if (eq.z > p.z_min + ztol && eq.z < p.z_max - ztol) out.push_back(eq);
    }

    auto stop_point = [&](double z_stop, Mode mode, double toward) {
        const double phi = steady_flux(p, model, z_stop, u);
        const double fv = accel(p, State{z_stop, 0.0, phi});
        const double scale =
            (p.ks * std::max(p.zs, z_stop) + 0.5 * p.kR * phi * phi) / p.m;
        const double eps = 1e-9 * std::max(1.0, scale);
        // toward = +1 requires f_v >= 0 (pressed against the upper stop),
        // toward = -1 requires f_v <= 0.
        const double s = toward * fv;
        if (s < -eps) return;
        Equilibrium eq;
        eq.mode = mode;
        eq.z = z_stop;
        eq.phi = phi;
        eq.u = u;
        eq.stability = s > eps ? Stability::Stable : Stability::Marginal;
        out.push_back(eq);
    };

    stop_point(p.z_min, Mode::MinGap, -1.0);
    if (std::isfinite(p.z_max)) stop_point(p.z_max, Mode::MaxGap, +1.0);

    std::sort(out.begin(), out.end(), [](const Equilibrium& a, const Equilibrium& b) {
        return a.z < b.z || (a.z == b.z && a.phi < b.phi);
    });
    for (std::size_t i = 0; i < out.size(); ++i) out[i].branch = static_cast<int>(i);
    return out;
}

// --- critical points -------------------------------------------------------------

/// Closed-form (basic) and numerically continued (saturated) critical points.
/// Optional fields are absent when the geometry does not define them: the
/// lift-off voltages need the stop below the spring equilibrium position, and
/// the *_sat family needs the saturation model.
struct CriticalPoints {
    double u0 = 0.0;    ///< domain-entry voltage of the second equilibrium [V]
    double phi0 = 0.0;  ///< flux at (z = 0, u = u0) [Wb]
    double ub = 0.0;    ///< fold (tangential bifurcation) voltage [V]
    double zb = 0.0;    ///< fold position [m]
    double phib = 0.0;  ///< fold flux [Wb]
    std::optional<double> u_min, phi_min;  ///< lift-off from z_min
    std::optional<double> u_max, phi_max;  ///< lift-off from z_max
    std::optional<double> u0_sat, ub_sat, zb_sat, phib_sat, u_min_sat, u_max_sat;
};

namespace detail {

/// Fold of the saturated model: Newton (with step halving) on
/// { f_v = 0, f_phi = 0, det(∂f/∂x) = 0 } in (z, phi, u), started from the
/// basic-model closed forms. The determinant condition reduces to
/// kR²·phi² = ks·d(phi·R)/dphi.
inline void saturated_fold(const ActuatorParams& p, const ReluctanceModel& model,
                           double z0, double phi0, double u0, double& z_out,
                           double& phi_out, double& u_out) {
    const double s1 = p.ks * p.zs;
    const double s2 = std::max(1.0, u0);
    const double s3 = p.kR * p.kR * phi0 * phi0;

    auto residual = [&](const Eigen::Vector3d& w, Eigen::Vector3d& F) {
        const double z = w[0], phi = w[1], u = w[2];
        const double d = 1.0 - phi / model.phi_sat;
        F[0] = (p.ks * (p.zs - z) - 0.5 * p.kR * phi * phi) / s1;
        F[1] = (u - (p.R / p.N) * phi * (p.R0 / d + p.kR * z)) / s2;
        F[2] = (p.kR * p.kR * phi * phi - p.ks * (p.R0 / (d * d) + p.kR * z)) / s3;
    };
    auto jacobian3 = [&](const Eigen::Vector3d& w, Eigen::Matrix3d& J) {
        const double z = w[0], phi = w[1];
        const double d = 1.0 - phi / model.phi_sat;
        J(0, 0) = -p.ks / s1;
        J(0, 1) = -p.kR * phi / s1;
        J(0, 2) = 0.0;
        J(1, 0) = -(p.R / p.N) * p.kR * phi / s2;
        J(1, 1) = -(p.R / p.N) * (p.R0 / (d * d) + p.kR * z) / s2;
        J(1, 2) = 1.0 / s2;
        J(2, 0) = -p.ks * p.kR / s3;
        J(2, 1) = (2.0 * p.kR * p.kR * phi -
                   2.0 * p.ks * p.R0 / (model.phi_sat * d * d * d)) / s3;
        J(2, 2) = 0.0;
    };

    Eigen::Vector3d w(z0, phi0, u0);
    Eigen::Vector3d F;
    residual(w, F);
    double fnorm = F.norm();
    for (int iter = 0; iter < 100; ++iter) {
        if (fnorm < 1e-13) {
            z_out = w[0];
            phi_out = w[1];
            u_out = w[2];
            return;
        }
        Eigen::Matrix3d J;
        jacobian3(w, J);
        const Eigen::Vector3d dw = J.partialPivLu().solve(-F);
        double alpha = 1.0;
        for (int halve = 0; halve < 60; ++halve) {
            Eigen::Vector3d trial = w + alpha * dw;
            if (trial[1] > 0.0 && trial[1] < model.flux_limit()) {
                Eigen::Vector3d Ft;
                residual(trial, Ft);
                if (Ft.norm() < fnorm || alpha < 1e-12) {
                    w = trial;
                    F = Ft;
                    fnorm = Ft.norm();
                    break;
                }
            }
            alpha *= 0.5;
        }
    }
    if (fnorm < 1e-10) {  // accept a slightly looser stall near round-off
        z_out = w[0];
        phi_out = w[1];
        u_out = w[2];
        return;
    }
    throw NumericError("critical_points: saturated fold Newton did not converge");
}

}  // namespace detail

inline CriticalPoints critical_points(const ActuatorParams& p, const ReluctanceModel& model) {
    p.validate();
    CriticalPoints cp;
    cp.phi0 = std::sqrt(2.0 * p.ks * p.zs / p.kR);
    cp.u0 = p.R * p.R0 / p.N * cp.phi0;
    cp.zb = (2.0 / 3.0) * p.zs - p.R0 / (3.0 * p.kR);
    cp.phib = std::sqrt(6.0 * p.ks * (p.R0 + p.kR * p.zs)) / (3.0 * p.kR);
    cp.ub = 2.0 * p.R * std::sqrt(6.0 * p.ks * std::pow(p.R0 + p.kR * p.zs, 3)) /
            (9.0 * p.N * p.kR);

    if (p.z_min <= p.zs) {
        cp.phi_min = std::sqrt(2.0 * p.ks * (p.zs - p.z_min) / p.kR);
        cp.u_min = p.R * (p.R0 + p.kR * p.z_min) / p.N * *cp.phi_min;
    }
    if (std::isfinite(p.z_max) && p.z_max <= p.zs) {
        cp.phi_max = std::sqrt(2.0 * p.ks * (p.zs - p.z_max) / p.kR);
        cp.u_max = p.R * (p.R0 + p.kR * p.z_max) / p.N * *cp.phi_max;
    }

    if (model.saturating()) {
        if (!(model.phi_sat > cp.phi0))
            throw NumericError(
                "critical_points: model inconsistency: phi_sat <= phi0, the saturated "
                "analysis requires phi_sat > phi0");
        cp.u0_sat = cp.u0 / (1.0 - cp.phi0 / model.phi_sat);
        double zb_s, phib_s, ub_s;
        detail::saturated_fold(p, model, cp.zb, cp.phib, cp.ub, zb_s, phib_s, ub_s);
        cp.zb_sat = zb_s;
        cp.phib_sat = phib_s;
        cp.ub_sat = ub_s;
        if (cp.phi_min && *cp.phi_min < model.phi_sat)
            cp.u_min_sat = p.R * *cp.phi_min / p.N *
                           (p.R0 / (1.0 - *cp.phi_min / model.phi_sat) + p.kR * p.z_min);
        if (cp.phi_max && *cp.phi_max < model.phi_sat)
            cp.u_max_sat = p.R * *cp.phi_max / p.N *
                           (p.R0 / (1.0 - *cp.phi_max / model.phi_sat) + p.kR * p.z_max);
    }
    return cp;
}

}  // namespace reluct
