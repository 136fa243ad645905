#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace reluct {

/// Physical constants of a single-coil switching actuator. Strict SI units
/// throughout (m, kg, s, V, A, Wb, H⁻¹); any unit conversion happens at
/// config ingestion, never inside the math.
struct ActuatorParams {
    double R = 0.0;      ///< coil resistance [Ω]
    double N = 0.0;      ///< number of turns
    double R0 = 0.0;     ///< core reluctance constant [H⁻¹]
    double kR = 0.0;     ///< gap reluctance slope [H⁻¹/m]
    std::optional<double> phi_sat;  ///< saturation flux [Wb]; absent = basic model only
    double m = 0.0;      ///< armature mass [kg]
    double ks = 0.0;     ///< spring stiffness [N/m]
    double zs = 0.0;     ///< spring equilibrium position [m]
    double c = 0.0;      ///< damping coefficient [N·s/m]
    double z_min = 0.0;  ///< minimum air gap [m]
    double z_max = 0.0;  ///< maximum air gap [m]; +inf = no upper stop

    /// Throws std::invalid_argument naming the offending field if any
    /// invariant is violated.
    void validate() const;
};

inline void ActuatorParams::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(std::string("ActuatorParams: ") + what);
    };
    require(std::isfinite(R) && R > 0.0, "R must be strictly positive");
    require(std::isfinite(N) && N > 0.0 && N == std::floor(N),
            "N must be a positive integer");
    require(std::isfinite(R0) && R0 > 0.0, "R0 must be strictly positive");
    require(std::isfinite(kR) && kR > 0.0, "kR must be strictly positive");
    require(std::isfinite(m) && m > 0.0, "m must be strictly positive");
    require(std::isfinite(ks) && ks > 0.0, "ks must be strictly positive");
    require(std::isfinite(zs) && zs > 0.0, "zs must be strictly positive");
    require(std::isfinite(c) && c > 0.0, "c must be strictly positive");
    require(std::isfinite(z_min) && z_min >= 0.0, "z_min must satisfy z_min >= 0");
    require(!std::isnan(z_max) && z_min < z_max, "z_min must satisfy z_min < z_max");
    if (phi_sat) {
        require(std::isfinite(*phi_sat) && *phi_sat > 0.0,
                "phi_sat must be strictly positive when present");
    }
}

enum class ModelKind { Basic, Saturation };

/// Selects the reluctance law: Basic is affine in the gap, Saturation adds
/// the Fröhlich–Kennelly core term and carries the saturation flux.
struct ReluctanceModel {
    ModelKind kind = ModelKind::Basic;
    double phi_sat = 0.0;  ///< [Wb]; meaningful only for Saturation

    static ReluctanceModel basic() { return {ModelKind::Basic, 0.0}; }

    static ReluctanceModel saturation(double phi_sat) {
        if (!(phi_sat > 0.0))
            throw std::invalid_argument("ReluctanceModel: phi_sat must be strictly positive");
        return {ModelKind::Saturation, phi_sat};
    }

    bool saturating() const { return kind == ModelKind::Saturation; }

    /// Largest admissible |phi|. The flux domain is open; operations reject
    /// values at or beyond phi_sat·(1 − 1e-12) to keep the core term finite.
    double flux_limit() const {
        return saturating() ? phi_sat * (1.0 - 1e-12)
                            : std::numeric_limits<double>::infinity();
    }
};

}  // namespace reluct
