// Hoverable force set (HFS) machinery: membership of payload forces under
// zero-torque hovering, hoverability, inclusion counting against a required
// force set (RFS), and support-function sampling for plot export.
//
// The HFS is never materialized as a polytope; every query is an LP over
// the rotor-thrust box.

#pragma once

#include <vector>

#include "tiltset/lp.hpp"
#include "tiltset/platform.hpp"

namespace tiltset::forceset {

/// Slack on the linf <= 1 membership comparison (LP opt_tol propagation).
inline constexpr double kMembershipTol = 1e-7;

/// Required force set given by its vertex list (payload frame, N).
struct RfsSpec {
    std::vector<geom::Vec3> vertices;

    /// Cartesian-product cuboid vertices around `center`. Emits the 8
    /// corners; a zero half-width collapses to the single center point.
    static RfsSpec cuboid(const geom::Vec3& center, double half_width);
};

/// Membership query context: maps built at one tilt configuration plus the
/// rotor thrust bound they were built with.
struct HfsQuery {
    platform::AllocationMaps maps;
    double u_max = 0.0;
};

HfsQuery make_query(const platform::PlatformParams& params,
                    const platform::TiltVector& gamma);

struct MembershipResult {
    bool included = false;
    double linf = 0.0;            // +inf when the equality system is infeasible
    Eigen::VectorXd thrusts;      // witness rotor thrusts (empty if infeasible)
};

/// Solves min ||u_tilde||_inf with u_tilde = (2/u_max)(u - u_max/2 * 1)
/// subject to [force; torque] maps * u = [v; 0]. Included iff the optimum
/// is <= 1 + kMembershipTol.
MembershipResult membership(const HfsQuery& query, const geom::Vec3& v);

/// True when the HFS contains the equilibrium force.
bool hoverable(const HfsQuery& query, const geom::Vec3& f_eq);

/// Number of RFS vertices inside the HFS.
int count_included(const HfsQuery& query, const RfsSpec& rfs);

/// For each direction d, maximizes d . force over the HFS and returns the
/// attained force point. The convex hull of the results inner-approximates
/// the HFS.
std::vector<geom::Vec3> support_points(
    const HfsQuery& query, const std::vector<geom::Vec3>& directions);

}  // namespace tiltset::forceset
