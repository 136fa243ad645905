#pragma once

// Deterministic CSV emission. Doubles are printed with the shortest decimal
// representation that round-trips to the same binary value, so repeated runs
// produce byte-identical files.

#include <charconv>
#include <optional>
#include <ostream>
#include <string>
#include <system_error>
#include <vector>

#include "reluct/bifurcation.hpp"
#include "reluct/equilibria.hpp"
#include "reluct/simulate.hpp"

namespace reluct::csv {

inline std::string format(double v) {
    if (v == 0.0) v = 0.0;  // fold negative zero
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string format(int v) { return std::to_string(v); }

inline std::string format(const std::optional<double>& v) {
    return v ? format(*v) : std::string();
}

inline void write_trajectory(std::ostream& os, const Trajectory& traj) {
    os << "t,q,z,v,phi,i,force\n";
    for (const TrajectorySample& s : traj.samples) {
        os << format(s.t) << ',' << static_cast<int>(s.q) << ',' << format(s.x.z) << ','
           << format(s.x.v) << ',' << format(s.x.phi) << ',' << format(s.i) << ','
           << format(s.force) << '\n';
    }
}

/// Event log companion; the state columns are the pre-jump state (for impacts
/// that is the state carrying the impact velocity).
inline void write_events(std::ostream& os, const Trajectory& traj) {
    os << "t,kind,z,v,phi\n";
    for (const TrajectoryEvent& ev : traj.events) {
        os << format(ev.t) << ',' << to_string(ev.kind) << ',' << format(ev.before.z) << ','
           << format(ev.before.v) << ',' << format(ev.before.phi) << '\n';
    }
}

inline void write_equilibria(std::ostream& os, const std::vector<Equilibrium>& eqs) {
    os << "u,mode,branch,z,phi,stability\n";
    for (const Equilibrium& eq : eqs) {
        os << format(eq.u) << ',' << static_cast<int>(eq.mode) << ',' << eq.branch << ','
           << format(eq.z) << ',' << format(eq.phi) << ',' << to_string(eq.stability) << '\n';
    }
}

inline void write_critical(std::ostream& os, const CriticalPoints& cp) {
    os << "u0,phi0,ub,zb,phib,u_min,phi_min,u_max,phi_max,"
          "u0_sat,ub_sat,zb_sat,phib_sat,u_min_sat,u_max_sat\n";
    os << format(cp.u0) << ',' << format(cp.phi0) << ',' << format(cp.ub) << ','
       << format(cp.zb) << ',' << format(cp.phib) << ',' << format(cp.u_min) << ','
       << format(cp.phi_min) << ',' << format(cp.u_max) << ',' << format(cp.phi_max) << ','
       << format(cp.u0_sat) << ',' << format(cp.ub_sat) << ',' << format(cp.zb_sat) << ','
       << format(cp.phib_sat) << ',' << format(cp.u_min_sat) << ',' << format(cp.u_max_sat)
       << '\n';
}

inline void write_sweep_points(std::ostream& os, const BranchData& data) {
    os << "u,branch,mode,z,phi,stability\n";
    for (const BranchPoint& pt : data.points) {
        os << format(pt.u) << ',' << pt.branch << ',' << static_cast<int>(pt.mode) << ','
           << format(pt.z) << ',' << format(pt.phi) << ',' << to_string(pt.stability) << '\n';
    }
}

inline void write_sweep_annotations(std::ostream& os, const BranchData& data) {
    os << "u,branch,kind\n";
    for (const BranchAnnotation& a : data.annotations)
        os << format(a.u) << ',' << a.branch << ',' << to_string(a.kind) << '\n';
}

inline void write_hysteresis(std::ostream& os, const HysteresisLoop& loop) {
    os << "direction,u,z\n";
    for (const LoopPoint& pt : loop.up) os << "up," << format(pt.u) << ',' << format(pt.z) << '\n';
    for (const LoopPoint& pt : loop.down)
        os << "down," << format(pt.u) << ',' << format(pt.z) << '\n';
}

inline void write_hysteresis_summary(std::ostream& os, const HysteresisLoop& loop) {
    os << "closing_voltage,opening_voltage\n";
    os << format(loop.closing_voltage) << ',' << format(loop.opening_voltage) << '\n';
}

}  // namespace reluct::csv
