#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "common.hpp"
#include "reluct/hybrid.hpp"

using namespace reluct;
using Catch::Approx;

TEST_CASE("flow in the motion mode", "[hybrid]") {
    const auto p = table1(0.0, 20e-3);  // upper stop above zs so (zs, ...) is admissible
    const auto basic = ReluctanceModel::basic();

    const State rest{p.zs, 0.0, 0.0};
    const State dx0 = flow(Mode::Motion, rest, 0.0, p, basic);
    CHECK(dx0.z == 0.0);
    CHECK(dx0.v == 0.0);
    CHECK(dx0.phi == 0.0);

    const State dx1 = flow(Mode::Motion, State{0.015, 0.0, 0.0}, 5.0, p, basic);
    CHECK(dx1.phi == Approx(5.0 / 1200.0).epsilon(1e-12));
}

TEST_CASE("stop-mode flows freeze position and velocity", "[hybrid]") {
    const auto p = table1();
    const auto sat = ReluctanceModel::saturation(*p.phi_sat);
    const State at_min{p.z_min, 0.0, 3e-6};
    const State d3 = flow(Mode::MinGap, at_min, 12.0, p, sat);
    CHECK(d3.z == 0.0);
    CHECK(d3.v == 0.0);
    CHECK(d3.phi != 0.0);

    const State at_max{p.z_max, 0.0, -8e-6};
    const State d1 = flow(Mode::MaxGap, at_max, 0.0, p, sat);
    CHECK(d1.z == 0.0);
    CHECK(d1.v == 0.0);
}

TEST_CASE("flow rejects states outside the flow set", "[hybrid]") {
    const auto p = table1();
    const auto basic = ReluctanceModel::basic();
    CHECK_THROWS_AS(flow(Mode::MaxGap, State{p.z_max, 0.1, 0.0}, 0.0, p, basic),
                    std::domain_error);
    CHECK_THROWS_AS(flow(Mode::Motion, State{p.z_max + 1e-3, 0.0, 0.0}, 0.0, p, basic),
                    std::domain_error);
}

TEST_CASE("flow set membership", "[hybrid]") {
    const auto p = table1();
    const auto sat = ReluctanceModel::saturation(*p.phi_sat);
    CHECK(in_flow_set(Mode::MaxGap, State{p.z_max, 0.0, 0.0}, p, sat));
    CHECK_FALSE(in_flow_set(Mode::MaxGap, State{p.z_max, 0.1, 0.0}, p, sat));
    CHECK(in_flow_set(Mode::Motion, State{p.z_min, -1.0, 0.0}, p, sat));  // boundary is in C2
    CHECK(in_flow_set(Mode::Motion, State{p.z_max, 2.0, 0.0}, p, sat));
    CHECK_FALSE(in_flow_set(Mode::Motion, State{p.z_max + 1e-9, 0.0, 0.0}, p, sat));
    CHECK_FALSE(in_flow_set(Mode::MinGap, State{p.z_min, 0.0, 21e-6}, p, sat));  // flux domain
    CHECK(in_flow_set(Mode::MinGap, State{p.z_min, 0.0, 0.0}, p, sat));
}

TEST_CASE("jump maps", "[hybrid]") {
    const auto p = table1();
    const auto basic = ReluctanceModel::basic();

    SECTION("impact at the minimum stop zeroes the velocity") {
        const auto jr = jump(Mode::Motion, State{p.z_min, -0.3, 4e-6}, 0.0, p, basic);
        REQUIRE(jr);
        CHECK(jr->q == Mode::MinGap);
        CHECK(jr->x.z == p.z_min);
        CHECK(jr->x.v == 0.0);
        CHECK(jr->x.phi == 4e-6);
    }

    SECTION("lift-off from the minimum stop when the spring wins") {
        // zero flux, z_min < zs: the spring pulls the armature away
        const auto jr = jump(Mode::MinGap, State{p.z_min, 0.0, 0.0}, 0.0, p, basic);
        REQUIRE(jr);
        CHECK(jr->q == Mode::Motion);
        CHECK(jr->x.z == p.z_min);
        CHECK(jr->x.v == 0.0);
    }

    SECTION("armature held against the upper stop: no jump") {
        // z_max < zs and zero flux: f_v > 0 keeps it pressed
        CHECK_FALSE(jump(Mode::MaxGap, State{p.z_max, 0.0, 0.0}, 0.0, p, basic));
    }

    SECTION("interior states are not in any jump set") {
        CHECK_FALSE(jump(Mode::Motion, State{2e-3, -5.0, 1e-5}, 0.0, p, basic));
    }

    SECTION("jump conditions do not depend on the supply voltage") {
        for (double u : {0.0, -30.0, 100.0}) {
            const auto jr = jump(Mode::MinGap, State{p.z_min, 0.0, 0.0}, u, p, basic);
            REQUIRE(jr);
            CHECK(jr->q == Mode::Motion);
        }
    }
}

TEST_CASE("impact jumps preserve gap and flux for random boundary states", "[hybrid]") {
    const auto p = table1();
    const auto sat = ReluctanceModel::saturation(*p.phi_sat);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> vel(0.0, 3.0);
    std::uniform_real_distribution<double> flux(-1.9e-5, 1.9e-5);
    for (int i = 0; i < 100; ++i) {
        const double phi = flux(rng);
        const State down{p.z_min, -vel(rng), phi};
        const auto j3 = jump(Mode::Motion, down, 0.0, p, sat);
        REQUIRE(j3);
        CHECK(j3->x.v == 0.0);
        CHECK(j3->x.z == p.z_min);
        CHECK(j3->x.phi == phi);

        const State up{p.z_max, vel(rng), phi};
        const auto j1 = jump(Mode::Motion, up, 0.0, p, sat);
        REQUIRE(j1);
        CHECK(j1->q == Mode::MaxGap);
        CHECK(j1->x.v == 0.0);
        CHECK(j1->x.phi == phi);
    }
}

TEST_CASE("accel is the net specific force", "[hybrid]") {
    const auto p = table1();
    // at (zs, 0, 0) the spring is relaxed and there is no magnetic pull
    CHECK(accel(p, State{p.zs, 0.0, 0.0}) == 0.0);
    // damping opposes motion
    CHECK(accel(p, State{p.zs, 1.0, 0.0}) == Approx(-p.c / p.m));
    // magnetic force always pulls toward smaller gaps
    CHECK(accel(p, State{p.zs, 0.0, 5e-6}) < 0.0);
}
