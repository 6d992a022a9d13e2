#include <doctest.h>

#include "test_support.hpp"
#include "tiltset/forceset.hpp"

using namespace tiltset;
using geom::Vec3;

namespace {

const platform::PlatformParams& params() {
    static const auto p = test::reference_params();
    return p;
}

forceset::HfsQuery query_at(double uniform_gamma) {
    return forceset::make_query(
        params(), platform::TiltVector::Constant(4, uniform_gamma));
}

}  // namespace

TEST_CASE("cuboid vertex generation") {
    const auto solid = forceset::RfsSpec::cuboid(Vec3(0, 0, 24.525), 1.0);
    CHECK(solid.vertices.size() == 8);
    for (const auto& v : solid.vertices) {
        CHECK(std::abs(std::abs(v.x()) - 1.0) < 1e-15);
        CHECK(std::abs(std::abs(v.y()) - 1.0) < 1e-15);
    }
    const auto point = forceset::RfsSpec::cuboid(Vec3(1, 2, 3), 0.0);
    CHECK(point.vertices.size() == 1);
    CHECK(point.vertices[0].isApprox(Vec3(1, 2, 3)));
    CHECK_THROWS_AS(forceset::RfsSpec::cuboid(Vec3::Zero(), -1.0),
                    std::invalid_argument);
}

TEST_CASE("membership at zero tilt") {
    const auto q = query_at(0.0);
    const double mg = params().weight();

    SUBCASE("symmetric hover with a uniform witness") {
        const auto res = forceset::membership(q, Vec3(0, 0, mg));
        CHECK(res.included);
        CHECK(res.linf == doctest::Approx(0.23359375).epsilon(1e-9));
        REQUIRE(res.thrusts.size() == 16);
        for (int i = 0; i < 16; ++i) {
            CHECK(res.thrusts(i) == doctest::Approx(mg / 16).epsilon(1e-7));
        }
    }
    SUBCASE("lateral forces are unreachable") {
        const auto res = forceset::membership(q, Vec3(1, 0, mg));
        CHECK_FALSE(res.included);
        CHECK(std::isinf(res.linf));
    }
    SUBCASE("apex: all rotors at the limit") {
        const auto res =
            forceset::membership(q, Vec3(0, 0, 16 * params().u_max));
        CHECK(res.included);
        CHECK(res.linf == doctest::Approx(1.0).epsilon(1e-7));
    }
    SUBCASE("non-finite query rejected") {
        CHECK_THROWS_AS(forceset::membership(q, Vec3(0, 0, NAN)),
                        std::invalid_argument);
    }
}

TEST_CASE("hoverable") {
    const double mg = params().weight();
    CHECK(forceset::hoverable(query_at(0.0), Vec3(0, 0, mg)));
    CHECK_FALSE(forceset::hoverable(query_at(0.0), Vec3(0, 1, mg)));
    CHECK(forceset::hoverable(query_at(-M_PI / 6), Vec3(0, 1, mg)));
}

TEST_CASE("inclusion counting reproduces the tilt dichotomy") {
    const double mg = params().weight();
    const auto rfs = forceset::RfsSpec::cuboid(Vec3(0, 0, mg), 1.0);
    CHECK(forceset::count_included(query_at(-M_PI / 24), rfs) < 8);
    CHECK(forceset::count_included(query_at(-M_PI / 6), rfs) == 8);
    CHECK(forceset::count_included(query_at(0.0), rfs) == 0);
}

TEST_CASE("support points at zero tilt") {
    const auto q = query_at(0.0);
    const auto points = forceset::support_points(
        q, {Vec3(0, 0, 1), Vec3(0, 0, -1), Vec3(1, 0, 0)});
    REQUIRE(points.size() == 3);
    CHECK(points[0].isApprox(Vec3(0, 0, 16 * params().u_max), 1e-9));
    CHECK(points[1].norm() <= 1e-9);
    CHECK(std::abs(points[2].x()) <= 1e-10);

    CHECK_THROWS_AS(forceset::support_points(q, {Vec3::Zero()}),
                    std::invalid_argument);
}

TEST_CASE("support points lie in the HFS") {
    const auto q = query_at(-M_PI / 6);
    std::vector<Vec3> dirs;
    test::TestRng rng(211);
    for (int i = 0; i < 24; ++i) {
        dirs.push_back(rng.uniform_vec(3, -1, 1).normalized());
    }
    for (const auto& p : forceset::support_points(q, dirs)) {
        const auto res = forceset::membership(q, p);
        CHECK(res.linf <= 1.0 + 1e-6);
    }
}

TEST_CASE("membership respects convexity along sampled chords") {
    const auto q = query_at(-M_PI / 6);
    const double mg = params().weight();
    const Vec3 hub(0, 0, mg);
    REQUIRE(forceset::membership(q, hub).linf < 1.0);

    test::TestRng rng(223);
    for (int trial = 0; trial < 12; ++trial) {
        // find a second included point
        Vec3 other = hub + Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1),
                                rng.uniform(-1, 1));
        if (!forceset::membership(q, other).included) continue;
        for (int k = 1; k < 5; ++k) {
            const double s = k / 5.0;
            const Vec3 mid = s * other + (1 - s) * hub;
            CHECK(forceset::membership(q, mid).included);
        }
    }
}

TEST_CASE("two routes to hoverability agree") {
    // L-inf membership (Proposition-style, <= 1) against a direct box
    // feasibility LP on the same equalities.
    const double mg = params().weight();
    test::TestRng rng(227);
    for (int trial = 0; trial < 200; ++trial) {
        const auto gamma = rng.uniform_vec(4, -M_PI_2, M_PI_2);
        const auto q = forceset::make_query(params(), gamma);
        const bool via_membership =
            forceset::membership(q, Vec3(0, 0, mg)).included;

        lp::LpProblem p;
        p.cost = Eigen::VectorXd::Zero(16);
        p.eq_lhs = Eigen::MatrixXd(6, 16);
        p.eq_lhs.topRows(3) = q.maps.force;
        p.eq_lhs.bottomRows(3) = q.maps.torque;
        p.eq_rhs = (Eigen::VectorXd(6) << 0, 0, mg, 0, 0, 0).finished();
        p.lower = Eigen::VectorXd::Zero(16);
        p.upper = Eigen::VectorXd::Constant(16, params().u_max);
        const bool via_feasibility =
            lp::solve(p).status == lp::Status::optimal;

        CHECK(via_membership == via_feasibility);
    }
}

TEST_CASE("stacked wrench map keeps rank >= 4 over random tilts") {
    test::TestRng rng(229);
    for (int trial = 0; trial < 100; ++trial) {
        const auto q =
            forceset::make_query(params(), rng.uniform_vec(4, -M_PI_2, M_PI_2));
        geom::MatDyn stacked(6, 16);
        stacked.topRows(3) = q.maps.force;
        stacked.bottomRows(3) = q.maps.torque;
        CHECK(geom::rank(stacked) >= 4);
    }
}
