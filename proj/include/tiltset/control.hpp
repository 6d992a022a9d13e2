// Cascaded controller: major-loop PID on pose -> reference wrench; minor
// loop low-pass filter -> tilt-table lookup -> tilt PID; min-max LP
// allocation at the measured tilt angles.

#pragma once

#include <utility>

#include "tiltset/platform.hpp"
#include "tiltset/tiltopt.hpp"

namespace tiltset::control {

struct PidGains {
    double p = 0.0;
    double i = 0.0;
    double d = 0.0;
};

struct ControllerConfig {
    PidGains translation{1.0, 0.1, 1.0};
    PidGains rotation{10.0, 10.0, 10.0};
    PidGains tilt{20.0, 1.0, 5.0};
    double lpf_time_constant = 1.0;  // s
    double dt = 1e-3;                // s
    double force_ref_clamp = 1.0;    // N, per lateral axis

    void validate() const;
};

/// Integrator + previous-error memory for one PID channel.
struct PidState {
    Eigen::VectorXd integral;      // integral of the error, rectangular rule
    Eigen::VectorXd prev_error;
    double windup_limit = 64.0;    // clamp on |i_gain * integral| per axis

    explicit PidState(int dims = 3)
        : integral(Eigen::VectorXd::Zero(dims)),
          prev_error(Eigen::VectorXd::Zero(dims)) {}
    void reset();
};

/// P e + I int(e) + D (e - e_prev)/dt; updates the state.
Eigen::VectorXd pid_step(PidState& state, const Eigen::VectorXd& error,
                         const PidGains& gains, double dt);

/// Same, but the derivative term uses the supplied rate instead of a
/// finite difference (derivative-on-measurement when rate = -measurement').
Eigen::VectorXd pid_step(PidState& state, const Eigen::VectorXd& error,
                         const Eigen::VectorXd& error_rate,
                         const PidGains& gains, double dt);

struct ControlOutput {
    geom::Vec3 f_p_ref = geom::Vec3::Zero();        // payload frame
    geom::Vec3 tau_p_ref = geom::Vec3::Zero();      // payload frame
    platform::TiltVector gamma_ref;
    Eigen::VectorXd tau_gamma_ref;
    Eigen::VectorXd thrusts;                        // 4N, in [0, u_max]
    bool allocation_feasible = false;
};

struct AllocationResult {
    Eigen::VectorXd thrusts;
    bool feasible = false;
};

/// Min-max thrust allocation at the measured tilt configuration:
/// min (max u - min u) s.t. maps.all u = [f; tau; tau_gamma], 0 <= u <= u_max.
AllocationResult allocate(const platform::AllocationMaps& maps,
                          const geom::Vec3& f_p_ref,
                          const geom::Vec3& tau_p_ref,
                          const Eigen::VectorXd& tau_gamma_ref, double u_max);

/// Exact state handed to the controller each tick.
struct StateMeasurement {
    geom::Vec3 position_w = geom::Vec3::Zero();
    geom::Mat3 attitude = geom::Mat3::Identity();   // R_wp
    geom::Vec3 velocity_b = geom::Vec3::Zero();     // payload frame
    geom::Vec3 angular_velocity_b = geom::Vec3::Zero();
    platform::TiltVector gamma;
    Eigen::VectorXd gamma_rate;
};

struct References {
    geom::Vec3 position_w = geom::Vec3::Zero();
    geom::Vec3 velocity_w = geom::Vec3::Zero();
    geom::Vec3 acceleration_w = geom::Vec3::Zero();
    geom::Vec3 disturbance_estimate_w = geom::Vec3::Zero();
};

class Controller {
public:
    Controller(const platform::PlatformParams& params,
               const ControllerConfig& config,
               const tiltopt::TiltTable* table);

    /// Clears PID/LPF state. The filtered lateral force starts at
    /// `filtered_init` so a run can begin settled on its initial reference.
    void reset(const Eigen::Vector2d& filtered_init = Eigen::Vector2d::Zero());

    /// Pose PIDs + feedforward: returns (f_p_ref, tau_p_ref), both payload
    /// frame. nominal_w is the world-frame trajectory feedforward wrench;
    /// the disturbance estimate is cancelled in the same step it appears.
    std::pair<geom::Vec3, geom::Vec3> major_loop(
        const geom::Vec3& position_error_w, const geom::Vec3& velocity_error_w,
        const geom::Vec3& rpy_error, const geom::Vec3& angular_velocity_b,
        const platform::Wrench& nominal_w,
        const geom::Vec3& disturbance_estimate_w, const geom::Mat3& R_wp);

    /// LPF on the lateral reference force, then bicubic table lookup.
    platform::TiltVector minor_loop(const geom::Vec3& f_p_ref);

    /// Full cascade: major loop -> minor loop -> tilt PID -> allocation at
    /// the measured gamma. On infeasible allocation the last feasible
    /// thrust vector is reused and the output is flagged.
    ControlOutput step(const StateMeasurement& meas, const References& refs);

    Eigen::Vector2d filtered_lateral() const { return filtered_lateral_; }

private:
    platform::PlatformParams params_;
    ControllerConfig config_;
    const tiltopt::TiltTable* table_;
    PidState pid_translation_{3};
    PidState pid_rotation_{3};
    PidState pid_tilt_;
    Eigen::Vector2d filtered_lateral_ = Eigen::Vector2d::Zero();
    Eigen::VectorXd last_feasible_thrusts_;
};

}  // namespace tiltset::control
