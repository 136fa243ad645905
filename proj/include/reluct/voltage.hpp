#pragma once

#include <algorithm>
#include <optional>
#include <variant>
#include <vector>

namespace reluct {

/// Supply-voltage profiles, evaluable at any t >= 0 [V].
struct ConstantVoltage {
    double u = 0.0;
};

/// Right-continuous step at t0.
struct StepVoltage {
    double t0 = 0.0;
    double u_before = 0.0;
    double u_after = 0.0;
};

/// u_start + rate·t, clamped at u_end when given. rate may be negative,
/// in which case the clamp acts from below.
struct RampVoltage {
    double u_start = 0.0;
    double rate = 0.0;  ///< [V/s]
    std::optional<double> u_end;
};

class VoltageProfile {
public:
    VoltageProfile() : spec_(ConstantVoltage{0.0}) {}
    VoltageProfile(ConstantVoltage v) : spec_(v) {}
    VoltageProfile(StepVoltage v) : spec_(v) {}
    VoltageProfile(RampVoltage v) : spec_(v) {}

    static VoltageProfile constant(double u) { return ConstantVoltage{u}; }
    static VoltageProfile step(double t0, double u_before, double u_after) {
        return StepVoltage{t0, u_before, u_after};
    }
    static VoltageProfile ramp(double u_start, double rate,
                               std::optional<double> u_end = std::nullopt) {
        return RampVoltage{u_start, rate, u_end};
    }

    double operator()(double t) const {
        return std::visit(
            [t](const auto& v) -> double {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, ConstantVoltage>) {
                    return v.u;
                } else if constexpr (std::is_same_v<T, StepVoltage>) {
                    return t < v.t0 ? v.u_before : v.u_after;
                } else {
                    double u = v.u_start + v.rate * t;
                    if (v.u_end) {
                        if (v.rate >= 0.0)
                            u = std::min(u, *v.u_end);
                        else
                            u = std::max(u, *v.u_end);
                    }
                    return u;
                }
            },
            spec_);
    }

    /// Times in (0, inf) where the profile is non-smooth. The simulator ends
    /// integration steps exactly there so no step straddles a kink.
    std::vector<double> breakpoints() const {
        return std::visit(
            [](const auto& v) -> std::vector<double> {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, StepVoltage>) {
                    if (v.t0 > 0.0) return {v.t0};
                } else if constexpr (std::is_same_v<T, RampVoltage>) {
                    if (v.u_end && v.rate != 0.0) {
                        const double tc = (*v.u_end - v.u_start) / v.rate;
                        if (tc > 0.0) return {tc};
                    }
                }
                return {};
            },
            spec_);
    }

private:
    std::variant<ConstantVoltage, StepVoltage, RampVoltage> spec_;
};

}  // namespace reluct
