// Closed-loop rigid-body simulation: payload Newton-Euler dynamics plus
// second-order joint dynamics under the cascaded controller, with a wind
// disturbance zone and a smooth reference trajectory.

#pragma once

#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "tiltset/control.hpp"
#include "tiltset/platform.hpp"
#include "tiltset/tiltopt.hpp"

namespace tiltset::sim {

struct SimState {
    geom::Vec3 position_w = geom::Vec3::Zero();
    geom::Mat3 attitude = geom::Mat3::Identity();   // R_wp
    geom::Vec3 velocity = geom::Vec3::Zero();       // payload frame
    geom::Vec3 angular_velocity = geom::Vec3::Zero();
    platform::TiltVector gamma;
    Eigen::VectorXd gamma_rate;
    double time = 0.0;
};

/// Field-wise time derivative of SimState.
struct StateDerivative {
    geom::Vec3 position;
    geom::Mat3 attitude;
    geom::Vec3 velocity;
    geom::Vec3 angular_velocity;
    Eigen::VectorXd gamma;
    Eigen::VectorXd gamma_rate;
};

/// Newton-Euler payload dynamics and J_x gamma'' = tau_gamma joint
/// dynamics. `wrench` is the total applied payload wrench (payload frame,
/// gravity excluded -- it is added here).
StateDerivative dynamics_derivative(const SimState& state,
                                    const platform::Wrench& wrench,
                                    const Eigen::VectorXd& joint_torque,
                                    const platform::PlatformParams& params);

/// Classical RK4 step with the controls held constant; the attitude is
/// re-orthonormalized afterwards.
SimState rk4_step(const SimState& state, const platform::Wrench& wrench,
                  const Eigen::VectorXd& joint_torque,
                  const platform::PlatformParams& params, double dt);

struct DisturbanceZone {
    geom::Vec3 force = geom::Vec3::Zero();  // world frame, N
    double x_min = 0.0;                     // zone boundaries, inclusive
    double x_max = 0.0;
};

/// zone.force while x_min <= x <= x_max, else zero.
geom::Vec3 wind_force(const DisturbanceZone& zone, const geom::Vec3& position_w);

enum class TrajectoryKind { hover, arc };

struct TrajectoryParams {
    double x_distance = 5.0;   // m travelled along x (arc)
    double y_amplitude = 1.0;  // m lateral excursion (arc)
};

struct TrajectorySample {
    geom::Vec3 position = geom::Vec3::Zero();
    geom::Vec3 velocity = geom::Vec3::Zero();
    geom::Vec3 acceleration = geom::Vec3::Zero();
};

/// Closed-form C^2 reference: rest-to-rest, zero orientation throughout.
class Trajectory {
public:
    Trajectory(TrajectoryKind kind, double duration, TrajectoryParams params);

    TrajectorySample at(double t) const;
    double duration() const { return duration_; }

    /// Largest |m a_lateral| over the run (sampled).
    double max_lateral_force(double mass) const;

private:
    TrajectoryKind kind_;
    double duration_;
    TrajectoryParams params_;
};

/// The default arc: quintic smooth-step in x plus a sin^3 lateral arc,
/// rest at both ends, continuous acceleration.
Trajectory make_trajectory(TrajectoryKind kind, double duration,
                           const TrajectoryParams& params = {});

struct TableRangeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct AllocationAbort : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LogRecord {
    double t = 0.0;
    geom::Vec3 position = geom::Vec3::Zero();
    geom::Vec3 rpy = geom::Vec3::Zero();
    geom::Vec3 velocity = geom::Vec3::Zero();          // payload frame
    geom::Vec3 angular_velocity = geom::Vec3::Zero();
    Eigen::VectorXd gamma;
    Eigen::VectorXd gamma_ref;
    geom::Vec3 f_ref = geom::Vec3::Zero();
    geom::Vec3 f_nom = geom::Vec3::Zero();
    Eigen::VectorXd thrusts;
    bool allocation_feasible = true;
    bool disturbance_active = false;
};

struct SimLog {
    std::vector<LogRecord> records;
    double max_position_error = 0.0;       // m
    double max_orientation_error = 0.0;    // rad, max |rpy| component
    int infeasible_steps = 0;

    /// Fixed-schema CSV: t, px, py, pz, roll, pitch, yaw, vx, vy, vz,
    /// wx, wy, wz, g1..g4, gref1..gref4, frefx..z, fnomx..z, u1..u16,
    /// feasible, wind.
    void write_csv(std::ostream& out) const;
};

inline constexpr int kMaxConsecutiveInfeasible = 10;

/// Runs the closed loop at fixed dt: exact state measurement, perfect wind
/// detection, allocation at the measured tilt angles, RK4 integration.
/// Throws TableRangeError if the trajectory demands forces outside the
/// table, AllocationAbort after kMaxConsecutiveInfeasible infeasible steps.
SimLog run(const platform::PlatformParams& params,
           const control::ControllerConfig& ctrl_cfg,
           const tiltopt::TiltTable& table, const Trajectory& trajectory,
           const DisturbanceZone& zone, double dt, double duration);

}  // namespace tiltset::sim
