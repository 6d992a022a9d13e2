// Elementary rigid-body math: rotation matrices, skew operator, adjoint
// wrench transform and numerical rank. Everything here is a pure function
// over value types.

#pragma once

#include <Eigen/Dense>

namespace tiltset::geom {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using MatDyn = Eigen::MatrixXd;

enum class Axis { x, y, z };

/// Proper rotation matrix about a coordinate axis, angle in radians.
Mat3 rot_axis(Axis axis, double angle);

/// Skew-symmetric matrix of a, so that hat(a) * b == a x b.
Mat3 hat(const Vec3& a);

/// 6x6 wrench transform
///
///   [ R^T          0   ]
///   [ -R^T hat(p)  R^T ]
///
/// acting on stacked (force, torque). With (R, p) the pose of the target
/// frame expressed in the source frame, this carries a wrench from source
/// to target coordinates.
Mat6 adjoint_transpose(const Mat3& R, const Vec3& p);

/// Numerical rank: number of singular values above tol * sigma_max.
int rank(const MatDyn& m, double tol = 1e-9);

/// Roll-pitch-yaw of R = rot_z(yaw) rot_y(pitch) rot_x(roll).
Vec3 rpy_zyx(const Mat3& R);

}  // namespace tiltset::geom
