#include <doctest.h>

#include <cstring>

#include "lp_oracle.hpp"
#include "test_support.hpp"
#include "tiltset/lp.hpp"

using namespace tiltset;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

lp::LpProblem box_problem(int n) {
    lp::LpProblem p;
    p.cost = Eigen::VectorXd::Zero(n);
    p.eq_lhs = Eigen::MatrixXd::Zero(0, n);
    p.eq_rhs = Eigen::VectorXd::Zero(0);
    p.lower = Eigen::VectorXd::Zero(n);
    p.upper = Eigen::VectorXd::Ones(n);
    return p;
}

}  // namespace

TEST_CASE("solve: trivial boxes and equalities") {
    SUBCASE("min x over [0,1]") {
        auto p = box_problem(1);
        p.cost << 1.0;
        const auto sol = lp::solve(p);
        REQUIRE(sol.status == lp::Status::optimal);
        CHECK(sol.x(0) == doctest::Approx(0.0));
        CHECK(sol.objective == doctest::Approx(0.0));
    }
    SUBCASE("degenerate family, unique objective") {
        auto p = box_problem(2);
        p.cost << -1.0, -1.0;
        p.eq_lhs = Eigen::MatrixXd::Ones(1, 2);
        p.eq_rhs = Eigen::VectorXd::Ones(1);
        const auto sol = lp::solve(p);
        REQUIRE(sol.status == lp::Status::optimal);
        CHECK(sol.objective == doctest::Approx(-1.0).epsilon(1e-9));
    }
    SUBCASE("infeasible equality") {
        auto p = box_problem(2);
        p.eq_lhs = Eigen::MatrixXd::Ones(1, 2);
        p.eq_rhs = Eigen::VectorXd::Constant(1, 5.0);  // x1+x2=5 in [0,1]^2
        CHECK(lp::solve(p).status == lp::Status::infeasible);
    }
    SUBCASE("unbounded") {
        auto p = box_problem(1);
        p.cost << -1.0;
        p.upper(0) = kInf;
        CHECK(lp::solve(p).status == lp::Status::unbounded);
    }
    SUBCASE("NaN rejected") {
        auto p = box_problem(1);
        p.lower(0) = NAN;
        CHECK_THROWS_AS(lp::solve(p), std::invalid_argument);
    }
    SUBCASE("crossed bounds rejected") {
        auto p = box_problem(1);
        p.lower(0) = 2.0;
        CHECK_THROWS_AS(lp::solve(p), std::invalid_argument);
    }
}

TEST_CASE("solve matches the enumeration oracle on random instances") {
    test::TestRng rng(101);
    int solved = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 3;
        const int me = 1 + (trial % 2);
        lp::LpProblem p;
        p.cost = rng.uniform_vec(n, -1, 1);
        p.eq_lhs = Eigen::MatrixXd(me, n);
        for (int i = 0; i < me; ++i)
            p.eq_lhs.row(i) = rng.uniform_vec(n, -1, 1).transpose();
        p.eq_rhs = rng.uniform_vec(me, -0.5, 0.5);
        p.lower = Eigen::VectorXd::Constant(n, -1.5);
        p.upper = Eigen::VectorXd::Constant(n, 1.5);

        test::EnumLp e;
        e.cost = p.cost;
        e.eq_lhs = p.eq_lhs;
        e.eq_rhs = p.eq_rhs;
        e.ineq_lhs = Eigen::MatrixXd::Zero(2 * n, n);
        e.ineq_rhs = Eigen::VectorXd::Zero(2 * n);
        for (int j = 0; j < n; ++j) {
            e.ineq_lhs(2 * j, j) = 1;
            e.ineq_rhs(2 * j) = p.upper(j);
            e.ineq_lhs(2 * j + 1, j) = -1;
            e.ineq_rhs(2 * j + 1) = -p.lower(j);
        }
        const auto expected = test::enumerate_optimum(e);
        const auto sol = lp::solve(p);
        if (expected) {
            REQUIRE(sol.status == lp::Status::optimal);
            CHECK(sol.objective ==
                  doctest::Approx(expected->objective).epsilon(1e-8));
            ++solved;
        } else {
            CHECK(sol.status == lp::Status::infeasible);
        }
    }
    CHECK(solved > 20);  // the instance family must actually exercise us
}

TEST_CASE("optimal returns satisfy feasibility tolerances") {
    test::TestRng rng(103);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 6, me = 3;
        lp::LpProblem p;
        p.cost = rng.uniform_vec(n, -1, 1);
        p.eq_lhs = Eigen::MatrixXd(me, n);
        for (int i = 0; i < me; ++i)
            p.eq_lhs.row(i) = rng.uniform_vec(n, -1, 1).transpose();
        const Eigen::VectorXd x_seed = rng.uniform_vec(n, 0.2, 0.8);
        p.eq_rhs = p.eq_lhs * x_seed;  // feasible by construction
        p.lower = Eigen::VectorXd::Zero(n);
        p.upper = Eigen::VectorXd::Ones(n);
        const auto sol = lp::solve(p);
        REQUIRE(sol.status == lp::Status::optimal);
        CHECK((p.eq_lhs * sol.x - p.eq_rhs).cwiseAbs().maxCoeff() <= 1e-7);
        CHECK((sol.x - p.lower).minCoeff() >= -1e-9);
        CHECK((p.upper - sol.x).minCoeff() >= -1e-9);
    }
}

TEST_CASE("weak duality bound holds for random dual points") {
    test::TestRng rng(107);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 5, me = 2;
        lp::LpProblem p;
        p.cost = rng.uniform_vec(n, -1, 1);
        p.eq_lhs = Eigen::MatrixXd(me, n);
        for (int i = 0; i < me; ++i)
            p.eq_lhs.row(i) = rng.uniform_vec(n, -1, 1).transpose();
        p.eq_rhs = p.eq_lhs * rng.uniform_vec(n, 0.1, 0.9);
        p.lower = Eigen::VectorXd::Zero(n);
        p.upper = Eigen::VectorXd::Ones(n);
        const auto sol = lp::solve(p);
        REQUIRE(sol.status == lp::Status::optimal);

        for (int k = 0; k < 5; ++k) {
            const Eigen::VectorXd y = rng.uniform_vec(me, -1, 1);
            const Eigen::VectorXd reduced = p.cost - p.eq_lhs.transpose() * y;
            double bound = p.eq_rhs.dot(y);
            for (int j = 0; j < n; ++j) {
                bound += std::min(reduced(j) * p.lower(j),
                                  reduced(j) * p.upper(j));
            }
            CHECK(sol.objective >= bound - 1e-7);
        }
    }
}

TEST_CASE("determinism: identical problems give identical bytes") {
    test::TestRng rng(109);
    lp::LpProblem p;
    const int n = 8, me = 3;
    p.cost = rng.uniform_vec(n, -1, 1);
    p.eq_lhs = Eigen::MatrixXd(me, n);
    for (int i = 0; i < me; ++i)
        p.eq_lhs.row(i) = rng.uniform_vec(n, -1, 1).transpose();
    p.eq_rhs = p.eq_lhs * rng.uniform_vec(n, 0.2, 0.8);
    p.lower = Eigen::VectorXd::Zero(n);
    p.upper = Eigen::VectorXd::Ones(n);

    const auto a = lp::solve(p);
    const auto b = lp::solve(p);
    REQUIRE(a.status == lp::Status::optimal);
    REQUIRE(b.status == lp::Status::optimal);
    CHECK(std::memcmp(a.x.data(), b.x.data(), sizeof(double) * n) == 0);
}

TEST_CASE("minimize_linf") {
    SUBCASE("single equality") {
        Eigen::MatrixXd a(1, 1);
        a << 1.0;
        const auto res = lp::minimize_linf(
            a, Eigen::VectorXd::Constant(1, 0.5),
            Eigen::VectorXd::Constant(1, -1.0),
            Eigen::VectorXd::Constant(1, 1.0));
        REQUIRE(res.status == lp::Status::optimal);
        CHECK(res.linf == doctest::Approx(0.5));
        CHECK(res.x(0) == doctest::Approx(0.5));
    }
    SUBCASE("identity: max abs coordinate") {
        Eigen::MatrixXd a = Eigen::MatrixXd::Identity(2, 2);
        Eigen::VectorXd b(2);
        b << 0.3, -0.7;
        const auto res = lp::minimize_linf(
            a, b, Eigen::VectorXd::Constant(2, -2.0),
            Eigen::VectorXd::Constant(2, 2.0));
        REQUIRE(res.status == lp::Status::optimal);
        CHECK(res.linf == doctest::Approx(0.7));
    }
    SUBCASE("random 4x8 system matches the enumerator") {
        test::TestRng rng(113);
        Eigen::MatrixXd a(4, 8);
        for (int i = 0; i < 4; ++i)
            a.row(i) = rng.uniform_vec(8, -1, 1).transpose();
        const Eigen::VectorXd b = a * rng.uniform_vec(8, -0.4, 0.4);
        const Eigen::VectorXd lo = Eigen::VectorXd::Constant(8, -2.0);
        const Eigen::VectorXd hi = Eigen::VectorXd::Constant(8, 2.0);
        const auto res = lp::minimize_linf(a, b, lo, hi);
        REQUIRE(res.status == lp::Status::optimal);
        const auto expected = test::enumerate_linf(a, b, lo, hi);
        REQUIRE(expected.has_value());
        CHECK(res.linf == doctest::Approx(*expected).epsilon(1e-6));
    }
    SUBCASE("infeasible system") {
        Eigen::MatrixXd a(2, 1);
        a << 1.0, 1.0;
        Eigen::VectorXd b(2);
        b << 0.0, 1.0;  // x = 0 and x = 1
        CHECK(lp::minimize_linf(a, b, Eigen::VectorXd::Constant(1, -2.0),
                                Eigen::VectorXd::Constant(1, 2.0))
                  .status == lp::Status::infeasible);
    }
}

TEST_CASE("minimize_range") {
    SUBCASE("symmetric optimum") {
        Eigen::MatrixXd a(1, 2);
        a << 1.0, 1.0;
        const auto res =
            lp::minimize_range(a, Eigen::VectorXd::Constant(1, 2.0), 4.0);
        REQUIRE(res.status == lp::Status::optimal);
        CHECK(res.range == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(res.x(0) == doctest::Approx(1.0));
        CHECK(res.x(1) == doctest::Approx(1.0));
    }
    SUBCASE("infeasible when outside the box image") {
        Eigen::MatrixXd a(1, 2);
        a << 1.0, 1.0;
        CHECK(lp::minimize_range(a, Eigen::VectorXd::Constant(1, 9.0), 4.0)
                  .status == lp::Status::infeasible);
    }
    SUBCASE("random feasible 10x16 beats rejection samples") {
        test::TestRng rng(127);
        Eigen::MatrixXd a(10, 16);
        for (int i = 0; i < 10; ++i)
            a.row(i) = rng.uniform_vec(16, -1, 1).transpose();
        const Eigen::VectorXd u0 = rng.uniform_vec(16, 1.0, 3.0);
        const Eigen::VectorXd b = a * u0;
        const double u_max = 4.0;
        const auto res = lp::minimize_range(a, b, u_max);
        REQUIRE(res.status == lp::Status::optimal);
        CHECK((a * res.x - b).cwiseAbs().maxCoeff() <= 1e-7);

        // Sample the affine solution set and reject points outside the box;
        // the LP optimum must beat every survivor.
        const Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
        const Eigen::MatrixXd kernel = lu.kernel();
        int kept = 0;
        for (int s = 0; s < 10000; ++s) {
            const Eigen::VectorXd xi =
                rng.uniform_vec(static_cast<int>(kernel.cols()), -1.0, 1.0);
            const Eigen::VectorXd u = u0 + kernel * xi;
            if (u.minCoeff() < 0 || u.maxCoeff() > u_max) continue;
            ++kept;
            CHECK(res.range <= u.maxCoeff() - u.minCoeff() + 1e-7);
        }
        CHECK(kept > 100);
    }
}
