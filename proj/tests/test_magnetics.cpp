#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "common.hpp"
#include "reluct/magnetics.hpp"

using namespace reluct;
using Catch::Approx;

TEST_CASE("reluctance, basic law", "[magnetics]") {
    const auto p = table1();
    const auto basic = ReluctanceModel::basic();
    CHECK(reluctance(basic, p, 0.0, 0.0) == Approx(1.5e7));
    CHECK(reluctance(basic, p, 0.015, 0.0) == Approx(3.15e8));
    CHECK(reluctance(basic, p, 0.0, 5e-6) == reluctance(basic, p, 0.0, -5e-6));
}

TEST_CASE("reluctance, saturation law", "[magnetics]") {
    const auto p = table1();
    const auto sat = ReluctanceModel::saturation(*p.phi_sat);
    CHECK(reluctance(sat, p, 0.0, 0.0) == Approx(1.5e7));  // equals basic at zero flux

    const auto basic = ReluctanceModel::basic();
    for (double z : {0.0, 1e-3, 5e-3, 15e-3}) {
        for (double phi : {-1.8e-5, -9e-6, -1e-7, 0.0, 1e-7, 9e-6, 1.8e-5}) {
            const double rs = reluctance(sat, p, z, phi);
            const double rb = reluctance(basic, p, z, phi);
            CHECK(rs > 0.0);
            CHECK(rs >= rb);
            if (phi == 0.0)
                CHECK(rs == rb);
            else
                CHECK(rs > rb);
        }
    }
}

TEST_CASE("saturation with a huge phi_sat degenerates to the basic law", "[magnetics]") {
    const auto p = table1();
    const auto basic = ReluctanceModel::basic();
    const auto nearly_basic = ReluctanceModel::saturation(1e6);
    for (double z : {0.0, 2e-3, 15e-3}) {
        for (double phi : {-2e-5, -8e-6, 0.0, 8e-6, 2e-5}) {
            const double rs = reluctance(nearly_basic, p, z, phi);
            const double rb = reluctance(basic, p, z, phi);
            CHECK(std::abs(rs - rb) / rb < 1e-4);
        }
    }
}

TEST_CASE("reluctance domain errors", "[magnetics]") {
    const auto p = table1();
    const auto sat = ReluctanceModel::saturation(*p.phi_sat);
    CHECK_THROWS_AS(reluctance(sat, p, -1e-6, 0.0), std::domain_error);
    CHECK_THROWS_AS(reluctance(sat, p, 0.0, 20e-6), std::domain_error);
    CHECK_THROWS_AS(reluctance(sat, p, 0.0, -20e-6), std::domain_error);
    CHECK_THROWS_AS(reluctance(ReluctanceModel::basic(), p, -1e-9, 0.0), std::domain_error);
    // just inside the guard margin is fine
    CHECK_NOTHROW(reluctance(sat, p, 0.0, 20e-6 * (1.0 - 1e-9)));
}

TEST_CASE("reluctance_dz equals the gap slope for both laws", "[magnetics]") {
    const auto p = table1();
    const auto basic = ReluctanceModel::basic();
    const auto sat = ReluctanceModel::saturation(*p.phi_sat);
    CHECK(reluctance_dz(basic, p, 3e-3, 0.0) == Approx(2e10));
    CHECK(reluctance_dz(sat, p, 3e-3, 1.2e-5) == Approx(2e10));

    // central-difference cross-check
    const double h = 1e-9;
    for (const auto& model : {basic, sat}) {
        for (double z : {1e-3, 5e-3, 12e-3}) {
            for (double phi : {0.0, 6e-6, -1.3e-5}) {
                const double fd =
                    (reluctance(model, p, z + h, phi) - reluctance(model, p, z - h, phi)) /
                    (2.0 * h);
                CHECK(std::abs(fd - reluctance_dz(model, p, z, phi)) / 2e10 < 1e-6);
            }
        }
    }
}

TEST_CASE("magnetic force", "[magnetics]") {
    const auto p = table1();
    CHECK(force(p, 0.0) == 0.0);
    // at phi0 the force balances the spring preload ks*zs = 0.825 N
    const double f = force(p, frozen::phi0);
    CHECK(f == Approx(-0.825).epsilon(1e-12));
    CHECK(std::abs(f) == Approx(p.ks * p.zs).epsilon(1e-12));

    std::mt19937 rng(42);
    std::uniform_real_distribution<double> flux(-2e-5, 2e-5);
    for (int i = 0; i < 200; ++i) {
        const double phi = flux(rng);
        CHECK(force(p, phi) <= 0.0);
        CHECK(force(p, phi) == force(p, -phi));
    }
}

TEST_CASE("current from flux", "[magnetics]") {
    const auto p = table1();
    const auto basic = ReluctanceModel::basic();
    const auto sat = ReluctanceModel::saturation(*p.phi_sat);
    CHECK(current_from_flux(basic, p, 0.0, 0.0) == 0.0);
    CHECK(current_from_flux(basic, p, 0.0, 8e-6) == Approx(0.1).epsilon(1e-12));

    for (double z : {0.0, 2e-3, 8e-3}) {
        double prev = 0.0;
        for (double phi : {1e-6, 4e-6, 8e-6, 1.4e-5, 1.9e-5}) {
            const double ib = current_from_flux(basic, p, z, phi);
            const double is = current_from_flux(sat, p, z, phi);
            CHECK(is >= ib);  // saturation demands more current for the same flux
            CHECK(is > prev);  // strictly increasing in phi at fixed gap
            prev = is;
            CHECK(current_from_flux(sat, p, z, -phi) == Approx(-is));
        }
    }
}

TEST_CASE("mmf derivative matches finite differences and is continuous at zero flux",
          "[magnetics]") {
    const auto p = table1();
    const auto sat = ReluctanceModel::saturation(*p.phi_sat);
    for (double z : {0.0, 4e-3, 10e-3}) {
        for (double phi : {-1.6e-5, -7e-6, 4e-6, 1.2e-5}) {
            const double h = 1e-11;
            const double fd = (mmf(sat, p, z, phi + h) - mmf(sat, p, z, phi - h)) / (2.0 * h);
            CHECK(fd == Approx(mmf_dphi(sat, p, z, phi)).epsilon(1e-6));
        }
        // limit value at phi = 0 equals the basic-law slope
        CHECK(mmf_dphi(sat, p, z, 0.0) == Approx(p.R0 + p.kR * z));
        const double one_sided =
            (mmf(sat, p, z, 1e-12) - mmf(sat, p, z, 0.0)) / 1e-12;
        CHECK(one_sided == Approx(mmf_dphi(sat, p, z, 0.0)).epsilon(1e-5));
    }
}
