#pragma once

// Config ingestion: a flat, human-readable key = value format with optional
// [simulation] / [sweep] / [hysteresis] sections. Values are SI base units
// only; '#' starts a comment. Unknown keys and sections are rejected so a
// typo never silently falls back to a default.

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include "reluct/errors.hpp"
#include "reluct/simulate.hpp"

namespace reluct {

struct SimulationConfig {
    double t_end = 0.0;
    Mode q0 = Mode::MaxGap;
    State x0;
    VoltageProfile profile;
    SimulateOptions opts;
};

struct SweepConfig {
    double u_lo = 0.0;
    double u_hi = 0.0;
    int steps = 1001;
    bool hybrid = true;
};

enum class HysteresisRun { Quasistatic, Dynamic };

struct HysteresisConfig {
    HysteresisRun mode = HysteresisRun::Quasistatic;
    double ramp_rate = 1.0;
    std::optional<double> u_peak;
    bool verify_quasistatic = false;
};

struct Config {
    ActuatorParams params;
    ReluctanceModel model;
    std::optional<SimulationConfig> simulation;
    std::optional<SweepConfig> sweep;
    std::optional<HysteresisConfig> hysteresis;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

class RawConfig {
public:
    explicit RawConfig(std::string_view text) {
        std::string section;
        std::size_t lineno = 0;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            const std::size_t eol = text.find('\n', pos);
            std::string_view line =
                text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
            pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
            ++lineno;
            if (const auto hash = line.find('#'); hash != std::string_view::npos)
                line = line.substr(0, hash);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw ConfigError("config line " + std::to_string(lineno) +
                                      ": malformed section header");
                section = std::string(trim(line.substr(1, line.size() - 2)));
                sections_[section];
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string_view::npos)
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": expected key = value");
            const std::string key(trim(line.substr(0, eq)));
            const std::string value(trim(line.substr(eq + 1)));
            if (key.empty())
                throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
            auto [it, inserted] = sections_[section].emplace(key, value);
            if (!inserted)
                throw ConfigError("config: duplicate key '" + qualify(section, key) + "'");
        }
    }

    bool has_section(const std::string& name) const { return sections_.count(name) > 0; }

    std::optional<std::string> take(const std::string& section, const std::string& key) {
        auto sit = sections_.find(section);
        if (sit == sections_.end()) return std::nullopt;
        auto kit = sit->second.find(key);
        if (kit == sit->second.end()) return std::nullopt;
        std::string value = kit->second;
        sit->second.erase(kit);
        return value;
    }

    double take_double(const std::string& section, const std::string& key, double fallback) {
        const auto raw = take(section, key);
        return raw ? parse_double(section, key, *raw) : fallback;
    }

    double require_double(const std::string& section, const std::string& key) {
        const auto raw = take(section, key);
        if (!raw) throw ConfigError("config: missing required key '" + qualify(section, key) + "'");
        return parse_double(section, key, *raw);
    }

    std::optional<double> take_optional_double(const std::string& section,
                                               const std::string& key) {
        const auto raw = take(section, key);
        if (!raw) return std::nullopt;
        return parse_double(section, key, *raw);
    }

    int take_int(const std::string& section, const std::string& key, int fallback) {
        const auto raw = take(section, key);
        if (!raw) return fallback;
        int v = 0;
        const char* b = raw->data();
        const char* e = b + raw->size();
        const auto res = std::from_chars(b, e, v);
        if (res.ec != std::errc() || res.ptr != e)
            throw ConfigError("config: key '" + qualify(section, key) +
                              "': expected an integer, got '" + *raw + "'");
        return v;
    }

    bool take_bool(const std::string& section, const std::string& key, bool fallback) {
        const auto raw = take(section, key);
        if (!raw) return fallback;
        if (*raw == "true") return true;
        if (*raw == "false") return false;
        throw ConfigError("config: key '" + qualify(section, key) +
                          "': expected true or false, got '" + *raw + "'");
    }

    /// After all known keys were consumed, anything left is a typo.
    void reject_leftovers() const {
        static const char* known[] = {"", "simulation", "sweep", "hysteresis"};
        for (const auto& [section, kv] : sections_) {
            bool ok = false;
            for (const char* k : known) ok = ok || section == k;
            if (!ok) throw ConfigError("config: unknown section '[" + section + "]'");
            if (!kv.empty())
                throw ConfigError("config: unknown key '" + qualify(section, kv.begin()->first) +
                                  "'");
        }
    }

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;

    static std::string qualify(const std::string& section, const std::string& key) {
        return section.empty() ? key : section + "." + key;
    }

    static double parse_double(const std::string& section, const std::string& key,
                               const std::string& raw) {
        double v = 0.0;
        const char* b = raw.data();
        const char* e = b + raw.size();
        const auto res = std::from_chars(b, e, v);
        if (res.ec != std::errc() || res.ptr != e)
            throw ConfigError("config: key '" + qualify(section, key) +
                              "': expected a number, got '" + raw + "'");
        return v;
    }
};

inline VoltageProfile parse_profile(RawConfig& raw) {
    const std::string kind = raw.take("simulation", "profile").value_or("constant");
    if (kind == "constant") {
        return VoltageProfile::constant(raw.require_double("simulation", "u"));
    }
    if (kind == "step") {
        const double t0 = raw.require_double("simulation", "t_step");
        const double before = raw.take_double("simulation", "u_before", 0.0);
        const double after = raw.require_double("simulation", "u_after");
        return VoltageProfile::step(t0, before, after);
    }
    if (kind == "ramp") {
        const double u_start = raw.take_double("simulation", "u_start", 0.0);
        const double rate = raw.require_double("simulation", "rate");
        return VoltageProfile::ramp(u_start, rate,
                                    raw.take_optional_double("simulation", "u_end"));
    }
    throw ConfigError("config: key 'simulation.profile': expected constant, step or ramp, got '" +
                      kind + "'");
}

}  // namespace detail

inline Config parse_config(std::string_view text) {
    detail::RawConfig raw(text);
    Config cfg;

    const auto model_name = raw.take("", "model").value_or("basic");
    cfg.params.R = raw.require_double("", "R");
    cfg.params.N = raw.require_double("", "N");
    cfg.params.R0 = raw.require_double("", "R0");
    cfg.params.kR = raw.require_double("", "kR");
    cfg.params.m = raw.require_double("", "m");
    cfg.params.ks = raw.require_double("", "ks");
    cfg.params.zs = raw.require_double("", "zs");
    cfg.params.c = raw.require_double("", "c");
    cfg.params.z_min = raw.require_double("", "z_min");
    cfg.params.z_max = raw.require_double("", "z_max");
    cfg.params.phi_sat = raw.take_optional_double("", "phi_sat");

    if (model_name == "basic") {
        cfg.model = ReluctanceModel::basic();
    } else if (model_name == "saturation") {
        if (!cfg.params.phi_sat)
            throw ConfigError("config: model = saturation requires the key 'phi_sat'");
        cfg.model = ReluctanceModel::saturation(*cfg.params.phi_sat);
    } else {
        throw ConfigError("config: key 'model': expected basic or saturation, got '" +
                          model_name + "'");
    }

    try {
        cfg.params.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    if (raw.has_section("simulation")) {
        SimulationConfig sim;
        sim.t_end = raw.require_double("simulation", "t_end");
        sim.profile = detail::parse_profile(raw);
        sim.opts.output_dt = raw.take_double("simulation", "output_dt", sim.t_end / 1000.0);
        sim.opts.rel_tol = raw.take_double("simulation", "rel_tol", sim.opts.rel_tol);
        sim.opts.abs_tol = raw.take_double("simulation", "abs_tol", sim.opts.abs_tol);
        sim.opts.event_tol = raw.take_double("simulation", "event_tol", sim.opts.event_tol);
        const int q0 = raw.take_int("simulation", "q0", 1);
        if (q0 < 1 || q0 > 3)
            throw ConfigError("config: key 'simulation.q0': expected 1, 2 or 3");
        sim.q0 = static_cast<Mode>(q0);
        const double z_default = sim.q0 == Mode::MinGap ? cfg.params.z_min : cfg.params.z_max;
        sim.x0.z = raw.take_double("simulation", "z0", z_default);
        sim.x0.v = raw.take_double("simulation", "v0", 0.0);
        sim.x0.phi = raw.take_double("simulation", "phi0", 0.0);
        if (!in_flow_set(sim.q0, sim.x0, cfg.params, cfg.model))
            throw ConfigError(
                "config: [simulation] initial state (z0, v0, phi0) is outside the flow set "
                "of mode q0");
        cfg.simulation = sim;
    }

    if (raw.has_section("sweep")) {
        SweepConfig sw;
        sw.u_lo = raw.require_double("sweep", "u_lo");
        sw.u_hi = raw.require_double("sweep", "u_hi");
        sw.steps = raw.take_int("sweep", "steps", sw.steps);
        sw.hybrid = raw.take_bool("sweep", "hybrid", sw.hybrid);
        if (sw.u_lo != sw.u_hi && sw.steps < 2)
            throw ConfigError("config: key 'sweep.steps': must be at least 2");
        cfg.sweep = sw;
    }

    if (raw.has_section("hysteresis")) {
        HysteresisConfig hy;
        const std::string mode = raw.take("hysteresis", "mode").value_or("quasistatic");
        if (mode == "quasistatic")
            hy.mode = HysteresisRun::Quasistatic;
        else if (mode == "dynamic")
            hy.mode = HysteresisRun::Dynamic;
        else
            throw ConfigError(
                "config: key 'hysteresis.mode': expected quasistatic or dynamic, got '" + mode +
                "'");
        hy.ramp_rate = raw.take_double("hysteresis", "ramp_rate", hy.ramp_rate);
        hy.u_peak = raw.take_optional_double("hysteresis", "u_peak");
        hy.verify_quasistatic =
            raw.take_bool("hysteresis", "verify_quasistatic", hy.verify_quasistatic);
        cfg.hysteresis = hy;
    }

    raw.reject_leftovers();
    return cfg;
}

inline Config load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace reluct
