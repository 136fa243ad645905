#pragma once

// Event-detecting executor for the hybrid automaton. Integrates the active
// mode's flow with an adaptive RK 5(4) pair, localizes guard crossings on the
// dense interpolant by bisection, applies jump maps (impacts zero the
// velocity), and records a sampled trajectory plus an ordered event log.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "reluct/detail/dopri5.hpp"
#include "reluct/errors.hpp"
#include "reluct/hybrid.hpp"
#include "reluct/voltage.hpp"

namespace reluct {

enum class EventKind { ImpactMin, ImpactMax, LiftOffMin, LiftOffMax };

inline const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::ImpactMin: return "ImpactMin";
        case EventKind::ImpactMax: return "ImpactMax";
        case EventKind::LiftOffMin: return "LiftOffMin";
        case EventKind::LiftOffMax: return "LiftOffMax";
    }
    return "?";
}

struct TrajectorySample {
    double t = 0.0;
    Mode q = Mode::Motion;
    State x;
    double i = 0.0;      ///< coil current [A]
    double force = 0.0;  ///< magnetic force [N]
};

struct TrajectoryEvent {
    double t = 0.0;
    EventKind kind = EventKind::ImpactMin;
    State before;
    State after;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    std::vector<TrajectoryEvent> events;

    double final_time() const { return samples.back().t; }
    Mode final_mode() const { return samples.back().q; }
    const State& final_state() const { return samples.back().x; }
};

struct SimulateOptions {
    double rel_tol = 1e-8;
    double abs_tol = 1e-12;
    double event_tol = 1e-10;  ///< guard localization window [s]
    double output_dt = 0.0;    ///< 0 = sample every accepted step
    double max_step = 0.0;     ///< 0 = no cap
    int max_chatter_jumps = 10;
};

namespace detail {

// Smooth extension of the reluctance for integrator stages: a trial step may
// probe slightly past a mechanical stop before the event is localized, so the
// gap is not range-checked here. The flux-domain guard stays hard.
inline double reluctance_extended(const ReluctanceModel& model, const ActuatorParams& p,
                                  double z, double phi) {
    check_flux_domain(model, phi);
    double core = p.R0;
    if (model.saturating()) core /= 1.0 - std::abs(phi) / model.phi_sat;
    return core + p.kR * z;
}

inline Vec<3> hybrid_rhs(Mode q, double t, const Vec<3>& y, const ActuatorParams& p,
                         const ReluctanceModel& model, const VoltageProfile& u) {
    const double rel = reluctance_extended(model, p, y[0], y[2]);
    const double dphi = u(t) / p.N - (p.R / (p.N * p.N)) * y[2] * rel;
    if (q != Mode::Motion) return {0.0, 0.0, dphi};
    const double dv =
        force(p, y[2]) / p.m - (p.ks / p.m) * (y[0] - p.zs) - (p.c / p.m) * y[1];
    return {y[1], dv, dphi};
}

}  // namespace detail

class HybridSimulator {
public:
    HybridSimulator(const ActuatorParams& p, const ReluctanceModel& model,
                    const VoltageProfile& u, const SimulateOptions& opts)
        : p_(p), model_(model), u_(u), opts_(opts) {}

    Trajectory run(Mode q0, const State& x0, double t_end) {
        p_.validate();
        if (!(t_end > 0.0)) throw std::invalid_argument("simulate: t_end must be positive");
        if (!in_flow_set(q0, x0, p_, model_))
            throw std::invalid_argument("simulate: initial state outside the flow set of the initial mode");

        q_ = q0;
        x_ = x0;
        t_ = 0.0;
        traj_ = {};
        next_output_ = opts_.output_dt > 0.0 ? opts_.output_dt : 0.0;

        apply_jumps();  // the initial state may already lie in a jump set
        push_sample(0.0);

        std::vector<double> breaks = u_.breakpoints();
        breaks.push_back(t_end);
        std::sort(breaks.begin(), breaks.end());

        using Stepper = detail::Dopri5<3, std::function<detail::Vec<3>(double, const detail::Vec<3>&)>>;
        typename Stepper::Options sopts;
        sopts.rel_tol = opts_.rel_tol;
        sopts.abs_tol = opts_.abs_tol;
        if (opts_.max_step > 0.0) sopts.max_step = opts_.max_step;

        auto rhs = [this](double t, const detail::Vec<3>& y) {
            return detail::hybrid_rhs(q_, t, y, p_, model_, u_);
        };
        Stepper stepper(rhs, t_, to_vec(x_), sopts);

        std::size_t bp = 0;
        while (t_ < t_end - slack(t_end)) {
            while (bp < breaks.size() && breaks[bp] <= t_ + slack(t_end)) ++bp;
            const double t_limit = bp < breaks.size() ? breaks[bp] : t_end;
            if (!(t_limit > t_)) break;

            double t_new;
            try {
                t_new = stepper.step(t_limit);
            } catch (const NumericError&) {
                if (model_.saturating() && std::abs(x_.phi) > 0.99 * model_.flux_limit())
                    throw NumericError("simulate: flux reached the saturation-domain margin");
                throw;
            }

            const auto crossing = find_event(stepper);
            if (crossing) {
                const double te = crossing->t;
                emit_grid_samples(stepper, te, /*exclusive_end=*/true);
                if (opts_.output_dt > 0.0 && next_output_ == te)
                    next_output_ += opts_.output_dt;  // the event sample covers it
                t_ = te;
                x_ = crossing->state;
                apply_jumps(apply_first_jump(crossing->kind));
                push_sample(t_);
                stepper.reset(t_, to_vec(x_));
                continue;
            }

            emit_grid_samples(stepper, t_new, /*exclusive_end=*/false);
            t_ = t_new;
            x_ = from_vec(stepper.y());
            if (opts_.output_dt <= 0.0 || t_ >= t_end - slack(t_end)) push_sample(t_);
            if (t_ >= t_limit - slack(t_end) && t_limit < t_end)
                stepper.reset(t_, to_vec(x_));  // input kink: drop FSAL cache
        }
        return std::move(traj_);
    }

private:
    struct Crossing {
        double t;
        State state;  ///< pre-jump state, gap snapped onto the stop
        EventKind kind;
    };

    const ActuatorParams& p_;
    const ReluctanceModel& model_;
    const VoltageProfile& u_;
    SimulateOptions opts_;
    Mode q_ = Mode::Motion;
    State x_;
    double t_ = 0.0;
    double next_output_ = 0.0;
    Trajectory traj_;

    static detail::Vec<3> to_vec(const State& x) { return {x.z, x.v, x.phi}; }
    static State from_vec(const detail::Vec<3>& y) { return {y[0], y[1], y[2]}; }
    static double slack(double t_end) { return 1e-14 * t_end; }

    void push_sample(double t) {
        TrajectorySample s;
        s.t = t;
        s.q = q_;
        s.x = x_;
        s.i = detail::reluctance_extended(model_, p_, x_.z, x_.phi) * x_.phi / p_.N;
        s.force = force(p_, x_.phi);
        if (!traj_.samples.empty() && traj_.samples.back().t == t)
            traj_.samples.back() = s;  // post-jump state supersedes the pre-jump one
        else
            traj_.samples.push_back(s);
    }

    template <class Stepper>
    void emit_grid_samples(const Stepper& stepper, double upto, bool exclusive_end) {
        if (opts_.output_dt <= 0.0) return;
        while (next_output_ < upto || (!exclusive_end && next_output_ == upto)) {
            if (next_output_ >= stepper.t_prev()) {
                const State save = x_;
                x_ = from_vec(stepper.interpolate(next_output_));
                push_sample(next_output_);
                x_ = save;
            }
            next_output_ += opts_.output_dt;
        }
    }

    // --- jump handling ------------------------------------------------------

    void record_event(EventKind kind, const State& before, const State& after) {
        traj_.events.push_back({t_, kind, before, after});
    }

    /// Applies the jump the localized guard dictates. Impacts are applied
    /// directly (the crossing direction already encodes the velocity-sign
    /// condition; localization may leave a grazing velocity of either tiny
    /// sign). Returns whether the jump was a lift-off.
    bool apply_first_jump(EventKind kind) {
        const State before = x_;
        bool lifted = false;
        switch (kind) {
            case EventKind::ImpactMin:
                x_ = State{p_.z_min, 0.0, before.phi};
                q_ = Mode::MinGap;
                break;
            case EventKind::ImpactMax:
                x_ = State{p_.z_max, 0.0, before.phi};
                q_ = Mode::MaxGap;
                break;
            case EventKind::LiftOffMin:
            case EventKind::LiftOffMax:
                q_ = Mode::Motion;
                lifted = true;
                break;
        }
        record_event(kind, before, x_);
        return lifted;
    }

    /// Drains the jump chain at the current instant. After a lift-off the
    /// automaton resumes flowing: without this, a lift-off landing on the
    /// stop boundary of the motion mode would re-arm the impact jump forever.
    void apply_jumps(bool lifted = false) {
        for (int n = 0; n <= opts_.max_chatter_jumps; ++n) {
            if (q_ == Mode::Motion && lifted) return;
            const auto jr = jump(q_, x_, u_(t_), p_, model_);
            if (!jr) return;
            EventKind kind;
            if (q_ == Mode::Motion)
                kind = jr->q == Mode::MinGap ? EventKind::ImpactMin : EventKind::ImpactMax;
            else {
                kind = q_ == Mode::MinGap ? EventKind::LiftOffMin : EventKind::LiftOffMax;
                lifted = true;
            }
            record_event(kind, x_, jr->x);
            x_ = jr->x;
            q_ = jr->q;
        }
        throw NumericError("simulate: more than " + std::to_string(opts_.max_chatter_jumps) +
                           " jumps without time progress (chattering)");
    }

    // --- guard detection ----------------------------------------------------

    struct Guard {
        EventKind kind;
        int direction;  ///< -1: fires when the value falls through 0; +1: rises
    };

    template <class Stepper>
    double guard_value(const Stepper& stepper, const Guard& g, double s) const {
        const State x = from_vec(stepper.interpolate(s));
        switch (g.kind) {
            case EventKind::ImpactMin: return x.z - p_.z_min;
            case EventKind::ImpactMax: return x.z - p_.z_max;
            default: return accel(p_, x);
        }
    }

    static bool triggers(double prev, double cur, int direction) {
        if (direction < 0) return (prev > 0.0 && cur <= 0.0) || (prev == 0.0 && cur < 0.0);
        return (prev < 0.0 && cur >= 0.0) || (prev == 0.0 && cur > 0.0);
    }

    template <class Stepper>
    std::optional<Crossing> find_event(const Stepper& stepper) const {
        std::vector<Guard> guards;
        if (q_ == Mode::Motion) {
            guards.push_back({EventKind::ImpactMin, -1});
            if (std::isfinite(p_.z_max)) guards.push_back({EventKind::ImpactMax, +1});
        } else if (q_ == Mode::MaxGap) {
            guards.push_back({EventKind::LiftOffMax, -1});
        } else {
            guards.push_back({EventKind::LiftOffMin, +1});
        }

        const double ta = stepper.t_prev();
        const double tb = stepper.t();
        constexpr int kCheckpoints = 8;

        std::optional<Crossing> best;
        for (const Guard& g : guards) {
            double sprev = ta;
            double gprev = guard_value(stepper, g, ta);
            for (int j = 1; j <= kCheckpoints; ++j) {
                const double s = ta + (tb - ta) * j / kCheckpoints;
                const double gs = guard_value(stepper, g, s);
                if (triggers(gprev, gs, g.direction)) {
                    const double te = bisect(stepper, g, sprev, s);
                    if (!best || te < best->t) best = make_crossing(stepper, g, te);
                    break;
                }
                sprev = s;
                gprev = gs;
            }
        }
        return best;
    }

    template <class Stepper>
    double bisect(const Stepper& stepper, const Guard& g, double lo, double hi) const {
        double glo = guard_value(stepper, g, lo);
        if (glo == 0.0) return lo;  // guard already on its surface, moving off
        for (int iter = 0; iter < 200 && hi - lo > opts_.event_tol; ++iter) {
            const double mid = 0.5 * (lo + hi);
            const double gm = guard_value(stepper, g, mid);
            if (triggers(glo, gm, g.direction)) {
                hi = mid;
            } else {
                lo = mid;
                glo = gm;
            }
        }
        if (hi - lo > opts_.event_tol)
            throw NumericError("simulate: event localization did not converge");
        return hi;
    }

    template <class Stepper>
    Crossing make_crossing(const Stepper& stepper, const Guard& g, double te) const {
        State x = from_vec(stepper.interpolate(te));
        if (g.kind == EventKind::ImpactMin) x.z = p_.z_min;
        if (g.kind == EventKind::ImpactMax) x.z = p_.z_max;
        return {te, x, g.kind};
    }
};

/// Simulates the hybrid automaton from (q0, x0) for t in [0, t_end].
inline Trajectory simulate(const ActuatorParams& p, const ReluctanceModel& model, Mode q0,
                           const State& x0, const VoltageProfile& u, double t_end,
                           const SimulateOptions& opts = {}) {
    return HybridSimulator(p, model, u, opts).run(q0, x0, t_end);
}

}  // namespace reluct
