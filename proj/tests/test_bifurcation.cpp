#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <map>

#include "common.hpp"
#include "reluct/bifurcation.hpp"

using namespace reluct;
using Catch::Approx;

namespace {

std::map<double, int> counts_by_voltage(const BranchData& data) {
    std::map<double, int> counts;
    for (const auto& pt : data.points) counts[pt.u]++;
    return counts;
}

const BranchAnnotation* find_annotation(const BranchData& data, int branch) {
    for (const auto& a : data.annotations)
        if (a.branch == branch) return &a;
    return nullptr;
}

}  // namespace

TEST_CASE("stroke-case classification", "[bifurcation]") {
    const auto basic = ReluctanceModel::basic();
    CHECK(classify_case(table1(0.0, 20e-3), basic) == StrokeCase::Case1);
    CHECK(classify_case(table1(0.0, 12e-3), basic) == StrokeCase::Case2);
    CHECK(classify_case(table1(0.0, 5e-3), basic) == StrokeCase::Case3);

    // saturation shrinks the fold position: 9.6 mm sits between zb_sat and zb
    const auto p = table1(0.0, 9.6e-3);
    const auto sat = ReluctanceModel::saturation(*p.phi_sat);
    CHECK(classify_case(p, basic) == StrokeCase::Case3);
    CHECK(classify_case(p, sat) == StrokeCase::Case2);
    CHECK(classify_case(table1(0.0, 9.4e-3), sat) == StrokeCase::Case3);

    CHECK_THROWS_AS(classify_case(table1(10e-3, 12e-3), basic), std::invalid_argument);
}

TEST_CASE("continuous sweep of the basic model", "[bifurcation]") {
    const auto p = table1();
    const auto basic = ReluctanceModel::basic();
    SweepOptions opts;
    const BranchData data = sweep(p, basic, 0.0, 50.0, opts);

    SECTION("equilibrium counts follow the 1 / 2 / 0 pattern") {
        for (const auto& [u, n] : counts_by_voltage(data)) {
            const int expected = u < frozen::u0 ? 1 : (u < frozen::ub ? 2 : 0);
            INFO("u = " << u);
            CHECK(n == expected);
        }
    }

    SECTION("branch endpoints land on u0 and ub with the right causes") {
        // branch 0 starts at (0, zs): the stable branch, dies at the fold
        REQUIRE(!data.points.empty());
        CHECK(data.points.front().u == 0.0);
        CHECK(data.points.front().z == Approx(p.zs));
        CHECK(data.points.front().stability == Stability::Stable);

        const auto* fold = find_annotation(data, 0);
        REQUIRE(fold);
        CHECK(fold->kind == AnnotationKind::TangentialBifurcation);
        CHECK(fold->u == Approx(frozen::ub).margin(1e-5));

        // branch 1 is the unstable branch entering the domain at u0
        const auto* entry = find_annotation(data, 1);
        REQUIRE(entry);
        CHECK(entry->kind == AnnotationKind::DomainExit);
        CHECK(entry->u == Approx(frozen::u0).margin(1e-5));

        // the unstable branch also dies at the fold
        bool unstable_fold = false;
        for (const auto& a : data.annotations)
            if (a.branch == 1 && a.kind == AnnotationKind::TangentialBifurcation)
                unstable_fold = std::abs(a.u - frozen::ub) < 1e-5;
        CHECK(unstable_fold);
    }

    SECTION("within-branch continuity") {
        std::map<int, const BranchPoint*> last;
        for (const auto& pt : data.points) {
            const auto it = last.find(pt.branch);
            if (it != last.end()) {
                CHECK(std::abs(pt.z - it->second->z) < 1e-3);
                CHECK(std::abs(pt.phi - it->second->phi) < 1e-6);
            }
            last[pt.branch] = &pt;
        }
    }
}

TEST_CASE("hybrid sweep in a Case 3 geometry", "[bifurcation]") {
    const auto p = table1();  // z_min = 0, z_max = 5 mm
    const auto basic = ReluctanceModel::basic();
    SweepOptions opts;
    opts.hybrid = true;
    const BranchData data = sweep(p, basic, 0.0, 50.0, opts);

    SECTION("counts: one stop point, then bistability, then one stop point") {
        for (const auto& [u, n] : counts_by_voltage(data)) {
            const int expected =
                u < frozen::u0 ? 1 : (u < frozen::u_max_5mm ? 3 : 1);
            INFO("u = " << u);
            CHECK(n == expected);
        }
    }

    SECTION("branch modes and annotations") {
        std::map<int, Mode> modes;
        std::map<int, int> npoints;
        for (const auto& pt : data.points) {
            modes[pt.branch] = pt.mode;
            npoints[pt.branch]++;
        }
        REQUIRE(modes.size() == 3);

        int max_branch = -1, min_branch = -1, motion_branch = -1;
        for (const auto& [id, mode] : modes) {
            if (mode == Mode::MaxGap) max_branch = id;
            if (mode == Mode::MinGap) min_branch = id;
            if (mode == Mode::Motion) motion_branch = id;
        }
        REQUIRE(max_branch >= 0);
        REQUIRE(min_branch >= 0);
        REQUIRE(motion_branch >= 0);

        // pinned positions
        for (const auto& pt : data.points) {
            if (pt.branch == max_branch) {
                CHECK(pt.z == p.z_max);
                CHECK(pt.stability != Stability::Unstable);
            }
            if (pt.branch == min_branch) {
                CHECK(pt.z == p.z_min);
                CHECK(pt.stability == Stability::Stable);
            }
            if (pt.branch == motion_branch) CHECK(pt.stability == Stability::Unstable);
        }

        // the max-gap branch dies at u_max (lift-off)
        const auto* a_max = find_annotation(data, max_branch);
        REQUIRE(a_max);
        CHECK(a_max->kind == AnnotationKind::LiftOff);
        CHECK(a_max->u == Approx(frozen::u_max_5mm).margin(1e-5));

        // the min-gap branch is born at u_min = u0 (lift-off threshold)
        const auto* a_min = find_annotation(data, min_branch);
        REQUIRE(a_min);
        CHECK(a_min->kind == AnnotationKind::LiftOff);
        CHECK(a_min->u == Approx(frozen::u0).margin(1e-5));

        // the unstable interior branch enters at u0 and exits at u_max,
        // both through the domain boundary
        int n_domain_exits = 0;
        for (const auto& a : data.annotations) {
            if (a.branch != motion_branch) continue;
            CHECK(a.kind == AnnotationKind::DomainExit);
            ++n_domain_exits;
            const bool at_entry = std::abs(a.u - frozen::u0) < 1e-5;
            const bool at_exit = std::abs(a.u - frozen::u_max_5mm) < 1e-5;
            CHECK((at_entry || at_exit));
        }
        CHECK(n_domain_exits == 2);
    }
}

TEST_CASE("sweep endpoints land on the saturated critical voltages", "[bifurcation]") {
    const auto p = table1();
    const auto sat = ReluctanceModel::saturation(*p.phi_sat);

    SECTION("continuous sweep: domain entry at u0_sat, fold at ub_sat") {
        SweepOptions opts;
        opts.n_steps = 501;
        const BranchData data = sweep(p, sat, 0.0, 50.0, opts);
        bool entry = false, fold = false;
        for (const auto& a : data.annotations) {
            if (a.kind == AnnotationKind::DomainExit &&
                std::abs(a.u - frozen::u0_sat) / frozen::u0_sat < 1e-4)
                entry = true;
            if (a.kind == AnnotationKind::TangentialBifurcation &&
                std::abs(a.u - frozen::ub_sat) / frozen::ub_sat < 1e-4)
                fold = true;
        }
        CHECK(entry);
        CHECK(fold);
    }

    SECTION("hybrid sweep: lift-off annotations at u_min_sat and u_max_sat") {
        SweepOptions opts;
        opts.n_steps = 501;
        opts.hybrid = true;
        const BranchData data = sweep(p, sat, 0.0, 50.0, opts);
        bool opening = false, closing = false;
        for (const auto& a : data.annotations) {
            if (a.kind != AnnotationKind::LiftOff) continue;
            if (std::abs(a.u - frozen::u0_sat) / frozen::u0_sat < 1e-4) opening = true;
            if (std::abs(a.u - frozen::u_max_sat_5mm) / frozen::u_max_sat_5mm < 1e-4)
                closing = true;
        }
        CHECK(opening);
        CHECK(closing);
    }
}

TEST_CASE("hybrid sweep with no upper stop reproduces the continuous topology",
          "[bifurcation]") {
    auto p = table1(0.0, std::numeric_limits<double>::infinity());
    const auto basic = ReluctanceModel::basic();

    SweepOptions copts;
    copts.n_steps = 201;
    const BranchData cont = sweep(p, basic, 0.0, 50.0, copts);

    SweepOptions hopts;
    hopts.n_steps = 201;
    hopts.hybrid = true;
    const BranchData hyb = sweep(p, basic, 0.0, 50.0, hopts);

    // per-voltage motion-mode counts agree with the continuous diagram
    std::map<double, int> cont_counts = counts_by_voltage(cont);
    std::map<double, int> hyb_motion;
    for (const auto& pt : hyb.points) {
        CHECK(pt.mode != Mode::MaxGap);  // no upper stop, no max-gap branch
        if (pt.mode == Mode::Motion) hyb_motion[pt.u]++;
    }
    for (const auto& [u, n] : cont_counts) CHECK(hyb_motion[u] == n);
}

TEST_CASE("negative sweep mirrors the positive one", "[bifurcation]") {
    const auto p = table1();
    const auto sat = ReluctanceModel::saturation(*p.phi_sat);
    SweepOptions opts;
    opts.n_steps = 101;
    const BranchData pos = sweep(p, sat, 0.0, 50.0, opts);
    const BranchData neg = sweep(p, sat, 0.0, -50.0, opts);

    REQUIRE(pos.points.size() == neg.points.size());
    for (std::size_t i = 0; i < pos.points.size(); ++i) {
        CHECK(neg.points[i].u == Approx(-pos.points[i].u).margin(1e-12));
        CHECK(neg.points[i].z == Approx(pos.points[i].z).margin(1e-12));
        CHECK(neg.points[i].phi == Approx(-pos.points[i].phi).margin(1e-15));
        CHECK(neg.points[i].stability == pos.points[i].stability);
    }
}

TEST_CASE("degenerate sweep lists the equilibria of a single voltage", "[bifurcation]") {
    const auto p = table1();
    const auto basic = ReluctanceModel::basic();
    SweepOptions opts;
    opts.hybrid = true;
    const BranchData data = sweep(p, basic, 20.0, 20.0, opts);
    REQUIRE(data.points.size() == 3);
    for (const auto& pt : data.points) CHECK(pt.u == 20.0);
    CHECK(data.annotations.empty());
}

TEST_CASE("sweep rejects too few steps", "[bifurcation]") {
    const auto p = table1();
    SweepOptions opts;
    opts.n_steps = 1;
    CHECK_THROWS_AS(sweep(p, ReluctanceModel::basic(), 0.0, 10.0, opts),
                    std::invalid_argument);
}
