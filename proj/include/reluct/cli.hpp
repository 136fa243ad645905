#pragma once

// Subcommand implementations shared by the command-line tool and the tests.
// Each command reads a validated Config, runs the corresponding analysis and
// writes CSV files. Errors surface as exceptions; exit_code_for maps them to
// the documented process exit codes (1 config, 2 numeric, 3 I/O).

#include <exception>
#include <fstream>
#include <string>

#include "reluct/bifurcation.hpp"
#include "reluct/config.hpp"
#include "reluct/csv.hpp"
#include "reluct/simulate.hpp"

namespace reluct::cli {

/// "out.csv" + "_events" -> "out_events.csv"
inline std::string companion_path(const std::string& out, const std::string& suffix) {
    const auto slash = out.find_last_of('/');
    const auto dot = out.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return out + suffix;
    return out.substr(0, dot) + suffix + out.substr(dot);
}

namespace detail {

template <class Writer>
void write_file(const std::string& path, Writer&& writer) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open output file for writing: " + path);
    writer(os);
    os.flush();
    if (!os) throw IoError("failed while writing output file: " + path);
}

}  // namespace detail

inline void cmd_simulate(const Config& cfg, const std::string& out_path) {
    if (!cfg.simulation)
        throw ConfigError("simulate: the config has no [simulation] section");
    const SimulationConfig& sim = *cfg.simulation;
    const Trajectory traj = simulate(cfg.params, cfg.model, sim.q0, sim.x0, sim.profile,
                                     sim.t_end, sim.opts);
    detail::write_file(out_path, [&](std::ostream& os) { csv::write_trajectory(os, traj); });
    detail::write_file(companion_path(out_path, "_events"),
                       [&](std::ostream& os) { csv::write_events(os, traj); });
}

inline void cmd_equilibria(const Config& cfg, double u, const std::string& out_path) {
    const auto eqs = hybrid_equilibria(cfg.params, cfg.model, u);
    detail::write_file(out_path, [&](std::ostream& os) { csv::write_equilibria(os, eqs); });
}

inline void cmd_critical(const Config& cfg, const std::string& out_path) {
    const CriticalPoints cp = critical_points(cfg.params, cfg.model);
    detail::write_file(out_path, [&](std::ostream& os) { csv::write_critical(os, cp); });
}

inline void cmd_sweep(const Config& cfg, const std::string& out_path) {
    if (!cfg.sweep) throw ConfigError("sweep: the config has no [sweep] section");
    SweepOptions opts;
    opts.n_steps = cfg.sweep->steps;
    opts.hybrid = cfg.sweep->hybrid;
    const BranchData data = sweep(cfg.params, cfg.model, cfg.sweep->u_lo, cfg.sweep->u_hi, opts);
    detail::write_file(out_path, [&](std::ostream& os) { csv::write_sweep_points(os, data); });
    detail::write_file(companion_path(out_path, "_annotations"),
                       [&](std::ostream& os) { csv::write_sweep_annotations(os, data); });
}

inline void cmd_hysteresis(const Config& cfg, const std::string& out_path) {
    if (!cfg.hysteresis)
        throw ConfigError("hysteresis: the config has no [hysteresis] section");
    const HysteresisConfig& hy = *cfg.hysteresis;
    HysteresisLoop loop;
    if (hy.mode == HysteresisRun::Quasistatic) {
        loop = hysteresis_quasistatic(cfg.params, cfg.model);
    } else {
        DynamicHysteresisOptions opts;
        opts.u_peak = hy.u_peak;
        opts.verify_quasistatic = hy.verify_quasistatic;
        loop = hysteresis_dynamic(cfg.params, cfg.model, hy.ramp_rate, opts);
    }
    detail::write_file(out_path, [&](std::ostream& os) { csv::write_hysteresis(os, loop); });
    detail::write_file(companion_path(out_path, "_summary"),
                       [&](std::ostream& os) { csv::write_hysteresis_summary(os, loop); });
}

inline int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return 1;
    if (dynamic_cast<const IoError*>(&e)) return 3;
    return 2;  // numeric / domain / precondition failures
}

}  // namespace reluct::cli
