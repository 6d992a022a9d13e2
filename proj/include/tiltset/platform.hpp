// Platform geometry and the thrust-transformation maps: rotor thrusts of N
// hinged quadrotor UAVs -> payload wrench and joint torques.

#pragma once

#include <cstdint>
#include <vector>

#include "tiltset/geom.hpp"

namespace tiltset::platform {

/// Physical constants of the platform. Defaults are the reference
/// four-UAV configuration used throughout the tests.
struct PlatformParams {
    int n_uavs = 4;
    double mass = 2.5;                    // kg, whole platform
    geom::Mat3 inertia =                  // kg m^2, payload frame
        geom::Vec3(0.05, 0.05, 0.05).asDiagonal();
    std::vector<double> joint_inertia = {0.005, 0.005, 0.005, 0.005};  // kg m^2
    std::vector<double> arm_length = {0.22, 0.22, 0.22, 0.22};         // m
    std::vector<double> arm_angle = {0.0, M_PI_2, M_PI, 3.0 * M_PI_2}; // rad
    double rotor_offset = 0.08;           // m, rotor positions [+-r, +-r, 0]
    double drag_ratio = 0.011;            // kappa = c_tau / c_u
    double u_max = 4.0;                   // N, per-rotor thrust bound
    double gravity = 9.81;                // m/s^2

    /// Throws std::invalid_argument on violated invariants (non-positive
    /// masses/lengths, non-SPD inertia, repeated arm angles, ...).
    void validate() const;

    /// Hash of all physical constants, used to tie persisted tilt tables
    /// to the parameter set they were computed for.
    std::uint64_t content_hash() const;

    double weight() const { return mass * gravity; }
};

/// Joint tilt angles, one per UAV, radians.
using TiltVector = Eigen::VectorXd;

/// The linear maps from stacked rotor thrusts u (4N) at a fixed tilt
/// configuration. `all` is the vertical stack [force; torque; joint].
struct AllocationMaps {
    geom::MatDyn force;   // 3 x 4N   payload force
    geom::MatDyn torque;  // 3 x 4N   payload torque
    geom::MatDyn joint;   // N x 4N   joint torques
    geom::MatDyn all;     // (6+N) x 4N
};

/// Force/torque pair (frame noted at each use site).
struct Wrench {
    geom::Vec3 force = geom::Vec3::Zero();
    geom::Vec3 torque = geom::Vec3::Zero();
};

/// 6x4 map from one UAV's rotor thrusts to the wrench on that UAV in its
/// own frame. Rotors alternate CW/CCW at [+-r, +-r, 0].
Eigen::Matrix<double, 6, 4> uav_wrench_matrix(const PlatformParams& params);

/// Torque about the hinge axis X_q: the 4th wrench component.
double joint_torque_row(const geom::Vec6& uav_wrench);

/// Assembles the allocation maps at tilt configuration gamma.
/// Rejects non-finite gamma and |gamma_i| > pi/2.
AllocationMaps build_allocation_maps(const PlatformParams& params,
                                     const TiltVector& gamma);

/// Force (payload frame) needed to hold the equilibrium under gravity and
/// a world-frame disturbance: R_wp^T (m g e3 - disturbance_w).
geom::Vec3 equilibrium_force(const PlatformParams& params,
                             const geom::Mat3& R_wp,
                             const geom::Vec3& disturbance_w);

}  // namespace tiltset::platform
