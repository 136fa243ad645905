#pragma once

// Voltage sweeps producing bifurcation-diagram branch data, stroke-case
// classification, and the hysteretic switching loop computed two ways:
// quasi-statically from the equilibrium structure and dynamically from a
// slow-ramp simulation of the hybrid automaton.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "reluct/equilibria.hpp"
#include "reluct/simulate.hpp"

namespace reluct {

// --- stroke-case classification -----------------------------------------------

enum class StrokeCase {
    Case1,  ///< z_max > zs: upper stop above the spring equilibrium
    Case2,  ///< zb < z_max < zs: stable free branch partially reachable
    Case3,  ///< z_min < z_max < zb: stable equilibria only at the stops
};

inline const char* to_string(StrokeCase c) {
    switch (c) {
        case StrokeCase::Case1: return "Case1";
        case StrokeCase::Case2: return "Case2";
        case StrokeCase::Case3: return "Case3";
    }
    return "?";
}

/// Classifies the stroke geometry against zs and the fold position (the
/// saturated fold when the saturation model is active).
inline StrokeCase classify_case(const ActuatorParams& p, const ReluctanceModel& model) {
    const CriticalPoints cp = critical_points(p, model);
    const double zb = model.saturating() ? *cp.zb_sat : cp.zb;
    if (!(p.z_min < zb))
        throw std::invalid_argument("classify_case: requires z_min < zb (standing assumption)");
    if (p.z_max > p.zs) return StrokeCase::Case1;
    if (p.z_max > zb) return StrokeCase::Case2;
    return StrokeCase::Case3;
}

// --- sweep ------------------------------------------------------------------

enum class AnnotationKind { TangentialBifurcation, DomainExit, LiftOff };

inline const char* to_string(AnnotationKind k) {
    switch (k) {
        case AnnotationKind::TangentialBifurcation: return "TangentialBifurcation";
        case AnnotationKind::DomainExit: return "DomainExit";
        case AnnotationKind::LiftOff: return "LiftOff";
    }
    return "?";
}

struct BranchPoint {
    double u = 0.0;
    int branch = -1;
    Mode mode = Mode::Motion;
    double z = 0.0;
    double phi = 0.0;
    Stability stability = Stability::Marginal;
};

/// A refined branch endpoint: the voltage at which the branch is born or
/// dies, and why.
struct BranchAnnotation {
    double u = 0.0;
    int branch = -1;
    AnnotationKind kind = AnnotationKind::DomainExit;
};

struct BranchData {
    std::vector<BranchPoint> points;
    std::vector<BranchAnnotation> annotations;
};

struct SweepOptions {
    int n_steps = 1001;
    bool hybrid = false;
    ZDomain domain{};          ///< search window for continuous sweeps
    double refine_tol = 1e-6;  ///< endpoint bisection tolerance [V]
};

namespace detail {

class SweepEngine {
public:
    SweepEngine(const ActuatorParams& p, const ReluctanceModel& model,
                const SweepOptions& opts)
        : p_(p), model_(model), opts_(opts),
          phi_scale_(std::sqrt(2.0 * p.ks * p.zs / p.kR)) {}

    BranchData run(double u_lo, double u_hi) {
        BranchData data;
        std::vector<double> grid;
        if (u_lo == u_hi) {
            grid.push_back(u_lo);
        } else {
            if (opts_.n_steps < 2)
                throw std::invalid_argument("sweep: n_steps must be at least 2");
            grid.reserve(opts_.n_steps);
            for (int i = 0; i < opts_.n_steps; ++i)
                grid.push_back(u_lo + (u_hi - u_lo) * i / (opts_.n_steps - 1));
        }

        for (std::size_t gi = 0; gi < grid.size(); ++gi)
            advance(grid, gi, data);

        for (Track& tr : tracks_) {
            if (tr.born_idx > 0)
                annotate(tr, grid[tr.born_idx - 1], grid[tr.born_idx], tr.first, data);
            if (tr.alive) continue;
            if (tr.death_idx < grid.size())
                annotate(tr, grid[tr.death_idx - 1], grid[tr.death_idx], tr.last, data);
        }
        std::sort(data.annotations.begin(), data.annotations.end(),
                  [](const BranchAnnotation& a, const BranchAnnotation& b) {
                      return a.u < b.u || (a.u == b.u && a.branch < b.branch);
                  });
        return data;
    }

private:
    struct Track {
        int id = -1;
        Mode mode = Mode::Motion;
        Equilibrium first, last;
        double last_step = 0.0;  ///< normalized movement over the last grid step
        bool alive = true;
        std::size_t born_idx = 0;
        std::size_t death_idx = 0;  ///< first grid index where it was absent
    };

    static constexpr double kFloor = 0.05;  ///< association radius floor (normalized)

    const ActuatorParams& p_;
    const ReluctanceModel& model_;
    SweepOptions opts_;
    double phi_scale_;
    std::vector<Track> tracks_;

    std::vector<Equilibrium> solve(double u) const {
        return opts_.hybrid ? hybrid_equilibria(p_, model_, u)
                            : continuous_equilibria(p_, model_, u, opts_.domain);
    }

    double distance(const Equilibrium& a, const Equilibrium& b) const {
        const double dz = (a.z - b.z) / p_.zs;
        const double dphi = (a.phi - b.phi) / phi_scale_;
        return std::hypot(dz, dphi);
    }

    double radius(const Track& tr) const { return std::max(5.0 * tr.last_step, kFloor); }

    void advance(const std::vector<double>& grid, std::size_t gi, BranchData& data) {
        const double u = grid[gi];
        std::vector<Equilibrium> eqs = solve(u);
        std::vector<bool> taken(eqs.size(), false);

        struct Cand {
            double d;
            std::size_t track;
            std::size_t eq;
        };
        std::vector<Cand> cands;
        for (std::size_t ti = 0; ti < tracks_.size(); ++ti) {
            if (!tracks_[ti].alive) continue;
            for (std::size_t ei = 0; ei < eqs.size(); ++ei) {
                if (eqs[ei].mode != tracks_[ti].mode) continue;
                const double d = distance(eqs[ei], tracks_[ti].last);
                if (d <= radius(tracks_[ti])) cands.push_back({d, ti, ei});
            }
        }
        std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
            return a.d < b.d || (a.d == b.d && a.track < b.track);
        });

        std::vector<bool> matched(tracks_.size(), false);
        for (const Cand& c : cands) {
            if (matched[c.track] || taken[c.eq]) continue;
            matched[c.track] = true;
            taken[c.eq] = true;
            Track& tr = tracks_[c.track];
            tr.last_step = c.d;
            tr.last = eqs[c.eq];
            emit(data, u, tr.id, eqs[c.eq]);
        }
        for (std::size_t ti = 0; ti < tracks_.size(); ++ti) {
            if (tracks_[ti].alive && !matched[ti]) {
                tracks_[ti].alive = false;
                tracks_[ti].death_idx = gi;
            }
        }
        for (std::size_t ei = 0; ei < eqs.size(); ++ei) {
            if (taken[ei]) continue;
            Track tr;
            tr.id = static_cast<int>(tracks_.size());
            tr.mode = eqs[ei].mode;
            tr.first = tr.last = eqs[ei];
            tr.last_step = 0.0;
            tr.born_idx = gi;
            emit(data, u, tr.id, eqs[ei]);
            tracks_.push_back(tr);
        }
    }

    static void emit(BranchData& data, double u, int id, const Equilibrium& eq) {
        data.points.push_back({u, id, eq.mode, eq.z, eq.phi, eq.stability});
    }

    /// Nearest same-mode equilibrium within the association radius of the
    /// anchor, if any.
    std::optional<Equilibrium> nearest_match(double u, const Track& tr,
                                             const Equilibrium& anchor) const {
        std::optional<Equilibrium> best;
        double dbest = radius(tr);
        for (const Equilibrium& eq : solve(u)) {
            if (eq.mode != tr.mode) continue;
            const double d = distance(eq, anchor);
            if (d <= dbest) {
                dbest = d;
                best = eq;
            }
        }
        return best;
    }

    /// Bisects the branch endpoint between a voltage where the branch exists
    /// and one where it does not. The anchor point walks along the branch as
    /// the interval shrinks, so a fold is followed all the way to the
    /// bifurcation voltage.
    void annotate(const Track& tr, double u_a, double u_b, const Equilibrium& ref,
                  BranchData& data) {
        Equilibrium anchor = ref;
        double lo = u_a, hi = u_b;
        if (auto m = nearest_match(u_a, tr, anchor)) {
            anchor = *m;
        } else {
            std::swap(lo, hi);  // branch births: the branch lives on the u_b side
            if (auto mb = nearest_match(lo, tr, anchor)) anchor = *mb;
        }
        for (int iter = 0; iter < 100 && std::abs(hi - lo) > opts_.refine_tol; ++iter) {
            const double mid = 0.5 * (lo + hi);
            if (auto m = nearest_match(mid, tr, anchor)) {
                anchor = *m;
                lo = mid;
            } else {
                hi = mid;
            }
        }
        data.annotations.push_back({0.5 * (lo + hi), tr.id, classify_endpoint(tr, anchor)});
    }

    /// An interior branch ending on the position boundary of the search
    /// window exits the domain; one ending in the interior merged with its
    /// fold partner.
    AnnotationKind classify_endpoint(const Track& tr, const Equilibrium& last) const {
        if (tr.mode != Mode::Motion) return AnnotationKind::LiftOff;
        const double z_lo = opts_.hybrid ? p_.z_min : opts_.domain.z_lo;
        const double z_hi = opts_.hybrid ? p_.z_max : opts_.domain.z_hi;
        const double btol = 1e-4 * p_.zs;
        if (std::abs(last.z - z_lo) <= btol) return AnnotationKind::DomainExit;
        if (std::isfinite(z_hi) && std::abs(last.z - z_hi) <= btol)
            return AnnotationKind::DomainExit;
        return AnnotationKind::TangentialBifurcation;
    }
};

}  // namespace detail

/// Sweeps the supply voltage over [u_lo, u_hi], collecting equilibria on the
/// grid, associating them to branches by nearest-neighbor continuation in
/// normalized (z/zs, phi/phi0) coordinates, and refining every interior
/// branch endpoint by bisection.
inline BranchData sweep(const ActuatorParams& p, const ReluctanceModel& model, double u_lo,
                        double u_hi, const SweepOptions& opts = {}) {
    return detail::SweepEngine(p, model, opts).run(u_lo, u_hi);
}

// --- hysteresis ---------------------------------------------------------------

struct LoopPoint {
    double u = 0.0;
    double z = 0.0;
};

struct HysteresisLoop {
    std::vector<LoopPoint> up;    ///< increasing-voltage leg
    std::vector<LoopPoint> down;  ///< decreasing-voltage leg
    std::optional<double> closing_voltage;  ///< switch z_max -> z_min
    std::optional<double> opening_voltage;  ///< switch z_min -> z_max
    bool rate_convergence_warning = false;  ///< dynamic loop only
};

/// Quasi-static loop from the equilibrium structure (Case 3 geometry only):
/// the armature tracks the z_max-pinned branch until it disappears at the
/// upper lift-off voltage, drops to z_min, and returns when the lower branch
/// disappears on the way down.
inline HysteresisLoop hysteresis_quasistatic(const ActuatorParams& p,
                                             const ReluctanceModel& model,
                                             int points_per_leg = 200) {
    if (classify_case(p, model) != StrokeCase::Case3)
        throw std::invalid_argument(
            "hysteresis_quasistatic: requires Case 3 geometry (z_min < z_max < zb)");
    const CriticalPoints cp = critical_points(p, model);
    const double closing = model.saturating() ? *cp.u_max_sat : *cp.u_max;
    const double opening = model.saturating() ? *cp.u_min_sat : *cp.u_min;
    const double u_top = 1.1 * closing;

    HysteresisLoop loop;
    loop.closing_voltage = closing;
    loop.opening_voltage = opening;
    const int n = std::max(points_per_leg, 2);
    for (int i = 0; i < n; ++i) {
        const double u = u_top * i / (n - 1);
        if (u < closing) loop.up.push_back({u, p.z_max});
    }
    loop.up.push_back({closing, p.z_max});
    loop.up.push_back({closing, p.z_min});
    for (int i = 0; i < n; ++i) {
        const double u = u_top * i / (n - 1);
        if (u > closing) loop.up.push_back({u, p.z_min});
    }
    for (int i = n - 1; i >= 0; --i) {
        const double u = u_top * i / (n - 1);
        if (u > opening) loop.down.push_back({u, p.z_min});
    }
    loop.down.push_back({opening, p.z_min});
    loop.down.push_back({opening, p.z_max});
    for (int i = n - 1; i >= 0; --i) {
        const double u = u_top * i / (n - 1);
        if (u < opening) loop.down.push_back({u, p.z_max});
    }
    return loop;
}

struct DynamicHysteresisOptions {
    std::optional<double> u_peak;     ///< default: 1.05 x quasi-static closing voltage
    double settle_time = 0.0;         ///< hold at the peak / at zero; 0 = auto
    bool verify_quasistatic = false;  ///< rerun at half rate, warn on >1% shift
    SimulateOptions sim{};
};

namespace detail {

inline std::optional<double> event_voltage(const Trajectory& traj, EventKind kind,
                                           const VoltageProfile& u) {
    for (const TrajectoryEvent& ev : traj.events)
        if (ev.kind == kind) return u(ev.t);
    return std::nullopt;
}

inline HysteresisLoop dynamic_loop_once(const ActuatorParams& p, const ReluctanceModel& model,
                                        double ramp_rate, const DynamicHysteresisOptions& opts) {
    const CriticalPoints cp = critical_points(p, model);
    std::optional<double> closing_qs;
    if (cp.u_max) closing_qs = model.saturating() ? cp.u_max_sat : cp.u_max;
    if (!opts.u_peak && !closing_qs)
        throw std::invalid_argument(
            "hysteresis_dynamic: u_peak must be given when no upper lift-off voltage exists");
    const double u_peak = opts.u_peak ? *opts.u_peak : 1.05 * *closing_qs;
    const double settle = opts.settle_time > 0.0
                              ? opts.settle_time
                              : 25.0 * 2.0 * M_PI * std::sqrt(p.m / p.ks);
    const double t_leg = u_peak / ramp_rate + settle;

    SimulateOptions sim = opts.sim;
    if (sim.output_dt <= 0.0) sim.output_dt = t_leg / 2000.0;

    HysteresisLoop loop;

    const VoltageProfile up_profile = VoltageProfile::ramp(0.0, ramp_rate, u_peak);
    const State x0{p.z_max, 0.0, 0.0};
    const Trajectory up = simulate(p, model, Mode::MaxGap, x0, up_profile, t_leg, sim);
    loop.closing_voltage = event_voltage(up, EventKind::ImpactMin, up_profile);
    for (const TrajectorySample& s : up.samples) loop.up.push_back({up_profile(s.t), s.x.z});

    const VoltageProfile down_profile = VoltageProfile::ramp(u_peak, -ramp_rate, 0.0);
    const Trajectory down =
        simulate(p, model, up.final_mode(), up.final_state(), down_profile, t_leg, sim);
    loop.opening_voltage = event_voltage(down, EventKind::LiftOffMin, down_profile);
    for (const TrajectorySample& s : down.samples)
        loop.down.push_back({down_profile(s.t), s.x.z});
    return loop;
}

}  // namespace detail

/// Dynamic cross-check of the quasi-static loop: ramps the supply up and back
/// down at the given rate and extracts the switching voltages from the
/// ImpactMin / LiftOffMin events. The rate should be slow against the system
/// time constants (guideline: below 0.01 x closing voltage x the inverse of
/// the slowest time constant) for the loop to approach the quasi-static one.
inline HysteresisLoop hysteresis_dynamic(const ActuatorParams& p, const ReluctanceModel& model,
                                         double ramp_rate,
                                         const DynamicHysteresisOptions& opts = {}) {
    if (!(ramp_rate > 0.0))
        throw std::invalid_argument("hysteresis_dynamic: ramp_rate must be positive");
    HysteresisLoop loop = detail::dynamic_loop_once(p, model, ramp_rate, opts);
    if (opts.verify_quasistatic) {
        DynamicHysteresisOptions half = opts;
        half.verify_quasistatic = false;
        const HysteresisLoop ref = detail::dynamic_loop_once(p, model, 0.5 * ramp_rate, half);
        auto shifted = [](const std::optional<double>& a, const std::optional<double>& b) {
            if (!a || !b) return a.has_value() != b.has_value();
            return std::abs(*a - *b) > 0.01 * std::abs(*b);
        };
        loop.rate_convergence_warning = shifted(loop.closing_voltage, ref.closing_voltage) ||
                                        shifted(loop.opening_voltage, ref.opening_voltage);
    }
    return loop;
}

}  // namespace reluct
