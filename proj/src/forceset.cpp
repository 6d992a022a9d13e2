#include "tiltset/forceset.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace tiltset::forceset {

namespace {

// Box on the normalized thrust variables; |u_tilde| = 1 is the thrust
// limit, so anything this far out is "not included" regardless.
constexpr double kNormalizedBox = 100.0;

}  // namespace

RfsSpec RfsSpec::cuboid(const geom::Vec3& center, double half_width) {
    if (half_width < 0) {
        throw std::invalid_argument("RfsSpec::cuboid: negative half width");
    }
    RfsSpec spec;
    if (half_width == 0.0) {
        spec.vertices.push_back(center);
        return spec;
    }
    for (double sx : {-1.0, 1.0}) {
        for (double sy : {-1.0, 1.0}) {
            for (double sz : {-1.0, 1.0}) {
                spec.vertices.push_back(
                    center + half_width * geom::Vec3(sx, sy, sz));
            }
        }
    }
    return spec;
}

HfsQuery make_query(const platform::PlatformParams& params,
                    const platform::TiltVector& gamma) {
    return {platform::build_allocation_maps(params, gamma), params.u_max};
}

MembershipResult membership(const HfsQuery& query, const geom::Vec3& v) {
    if (!v.allFinite()) {
        throw std::invalid_argument("membership: non-finite query force");
    }
    const auto cols = query.maps.force.cols();
    Eigen::MatrixXd wrench_map(6, cols);
    wrench_map.topRows(3) = query.maps.force;
    wrench_map.bottomRows(3) = query.maps.torque;

    // In normalized variables u = (u_max/2)(u_tilde + 1):
    //   (u_max/2) M u_tilde = [v; 0] - (u_max/2) M 1.
    const Eigen::MatrixXd a = (query.u_max / 2.0) * wrench_map;
    Eigen::VectorXd b(6);
    b << v, geom::Vec3::Zero();
    b -= a * Eigen::VectorXd::Ones(cols);

    const auto res = lp::minimize_linf(
        a, b, Eigen::VectorXd::Constant(cols, -kNormalizedBox),
        Eigen::VectorXd::Constant(cols, kNormalizedBox));
    if (res.status != lp::Status::optimal) {
        return {false, std::numeric_limits<double>::infinity(), {}};
    }
    const Eigen::VectorXd u =
        (query.u_max / 2.0) *
        (res.x + Eigen::VectorXd::Ones(cols));
    return {res.linf <= 1.0 + kMembershipTol, res.linf, u};
}

bool hoverable(const HfsQuery& query, const geom::Vec3& f_eq) {
    // The rank >= 4 actuation condition holds for every tilt configuration
    // of this platform (validated numerically in the test suite), so
    // hoverability reduces to HFS membership of the equilibrium force.
    return membership(query, f_eq).included;
}

int count_included(const HfsQuery& query, const RfsSpec& rfs) {
    int count = 0;
    for (const auto& v : rfs.vertices) {
        if (membership(query, v).included) {
            ++count;
        }
    }
    return count;
}

std::vector<geom::Vec3> support_points(
    const HfsQuery& query, const std::vector<geom::Vec3>& directions) {
    const auto cols = query.maps.force.cols();
    std::vector<geom::Vec3> points;
    points.reserve(directions.size());
    for (const auto& d : directions) {
        if (d.norm() == 0.0) {
            throw std::invalid_argument("support_points: zero direction");
        }
        lp::LpProblem p;
        p.cost = -(d.transpose() * query.maps.force).transpose();
        p.eq_lhs = query.maps.torque;
        p.eq_rhs = geom::Vec3::Zero();
        p.lower = Eigen::VectorXd::Zero(cols);
        p.upper = Eigen::VectorXd::Constant(cols, query.u_max);
        const auto sol = lp::solve(p);
        if (sol.status != lp::Status::optimal) {
            throw std::runtime_error("support_points: LP unexpectedly failed");
        }
        points.emplace_back(query.maps.force * sol.x);
    }
    return points;
}

}  // namespace tiltset::forceset
