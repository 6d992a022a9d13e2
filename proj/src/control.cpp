#include "tiltset/control.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tiltset/forceset.hpp"
#include "tiltset/lp.hpp"

namespace tiltset::control {

void ControllerConfig::validate() const {
    if (!(dt > 0)) {
        throw std::invalid_argument("controller: dt must be positive");
    }
    if (!(lpf_time_constant > 0)) {
        throw std::invalid_argument(
            "controller: lpf_time_constant must be positive");
    }
    for (const auto& g : {translation, rotation, tilt}) {
        if (g.p < 0 || g.i < 0 || g.d < 0) {
            throw std::invalid_argument("controller: gains must be >= 0");
        }
    }
    if (!(force_ref_clamp > 0)) {
        throw std::invalid_argument("controller: force_ref_clamp must be positive");
    }
}

void PidState::reset() {
    integral.setZero();
    prev_error.setZero();
}

Eigen::VectorXd pid_step(PidState& state, const Eigen::VectorXd& error,
                         const PidGains& gains, double dt) {
    const Eigen::VectorXd rate = (error - state.prev_error) / dt;
    return pid_step(state, error, rate, gains, dt);
}

Eigen::VectorXd pid_step(PidState& state, const Eigen::VectorXd& error,
                         const Eigen::VectorXd& error_rate,
                         const PidGains& gains, double dt) {
    if (!(dt > 0)) {
        throw std::invalid_argument("pid_step: dt must be positive");
    }
    state.integral += error * dt;
    if (gains.i > 0) {
        const double cap = state.windup_limit / gains.i;
        state.integral = state.integral.cwiseMax(-cap).cwiseMin(cap);
    }
    state.prev_error = error;
    return gains.p * error + gains.i * state.integral + gains.d * error_rate;
}

AllocationResult allocate(const platform::AllocationMaps& maps,
                          const geom::Vec3& f_p_ref,
                          const geom::Vec3& tau_p_ref,
                          const Eigen::VectorXd& tau_gamma_ref, double u_max) {
    Eigen::VectorXd ref(6 + tau_gamma_ref.size());
    ref << f_p_ref, tau_p_ref, tau_gamma_ref;
    const auto res = lp::minimize_range(maps.all, ref, u_max);
    if (res.status != lp::Status::optimal) {
        return {{}, false};
    }
    AllocationResult out;
    out.thrusts = res.x.cwiseMax(0.0).cwiseMin(u_max);
    out.feasible = true;
    return out;
}

Controller::Controller(const platform::PlatformParams& params,
                       const ControllerConfig& config,
                       const tiltopt::TiltTable* table)
    : params_(params),
      config_(config),
      table_(table),
      pid_tilt_(params.n_uavs) {
    params_.validate();
    config_.validate();
    // Anti-windup: integral contribution capped at the total thrust
    // authority expressed as an equivalent force.
    const double authority = params_.u_max * 4.0 * params_.n_uavs;
    pid_translation_.windup_limit = authority;
    pid_rotation_.windup_limit = authority;
    pid_tilt_.windup_limit = authority;
    last_feasible_thrusts_ = Eigen::VectorXd::Zero(4 * params_.n_uavs);
}

void Controller::reset(const Eigen::Vector2d& filtered_init) {
    pid_translation_.reset();
    pid_rotation_.reset();
    pid_tilt_.reset();
    filtered_lateral_ = filtered_init;
    last_feasible_thrusts_.setZero();
}

std::pair<geom::Vec3, geom::Vec3> Controller::major_loop(
    const geom::Vec3& position_error_w, const geom::Vec3& velocity_error_w,
    const geom::Vec3& rpy_error, const geom::Vec3& angular_velocity_b,
    const platform::Wrench& nominal_w,
    const geom::Vec3& disturbance_estimate_w, const geom::Mat3& R_wp) {
    const Eigen::VectorXd trans = pid_step(
        pid_translation_, position_error_w, velocity_error_w,
        config_.translation, config_.dt);
    const geom::Vec3 f_w_des =
        nominal_w.force + geom::Vec3(trans) - disturbance_estimate_w;
    geom::Vec3 f_p_ref = R_wp.transpose() * f_w_des;
    const double clamp = config_.force_ref_clamp;
    f_p_ref.x() = std::clamp(f_p_ref.x(), -clamp, clamp);
    f_p_ref.y() = std::clamp(f_p_ref.y(), -clamp, clamp);

    const Eigen::VectorXd rot =
        pid_step(pid_rotation_, rpy_error,
                 Eigen::VectorXd(-angular_velocity_b), config_.rotation,
                 config_.dt);
    const geom::Vec3 tau_p_ref = nominal_w.torque + geom::Vec3(rot);
    return {f_p_ref, tau_p_ref};
}

platform::TiltVector Controller::minor_loop(const geom::Vec3& f_p_ref) {
    if (table_ == nullptr) {
        throw std::logic_error("controller: no tilt table attached");
    }
    // Exact discretization of 1/(tau s + 1); only the table-indexed lateral
    // components are filtered.
    const double a = std::exp(-config_.dt / config_.lpf_time_constant);
    filtered_lateral_ =
        a * filtered_lateral_ + (1.0 - a) * f_p_ref.head<2>();
    return table_->interpolate(filtered_lateral_.x(), filtered_lateral_.y());
}

ControlOutput Controller::step(const StateMeasurement& meas,
                               const References& refs) {
    const geom::Vec3 position_error = refs.position_w - meas.position_w;
    const geom::Vec3 velocity_error =
        refs.velocity_w - meas.attitude * meas.velocity_b;
    const geom::Vec3 rpy_error = -geom::rpy_zyx(meas.attitude);

    platform::Wrench nominal_w;
    nominal_w.force = params_.mass * refs.acceleration_w +
                      geom::Vec3(0, 0, params_.weight());

    ControlOutput out;
    std::tie(out.f_p_ref, out.tau_p_ref) = major_loop(
        position_error, velocity_error, rpy_error, meas.angular_velocity_b,
        nominal_w, refs.disturbance_estimate_w, meas.attitude);

    out.gamma_ref = minor_loop(out.f_p_ref);
    const Eigen::VectorXd tilt_error = out.gamma_ref - meas.gamma;
    out.tau_gamma_ref =
        pid_step(pid_tilt_, tilt_error, Eigen::VectorXd(-meas.gamma_rate),
                 config_.tilt, config_.dt);

    const auto maps = platform::build_allocation_maps(params_, meas.gamma);
    const auto alloc = allocate(maps, out.f_p_ref, out.tau_p_ref,
                                out.tau_gamma_ref, params_.u_max);
    out.allocation_feasible = alloc.feasible;
    if (alloc.feasible) {
        out.thrusts = alloc.thrusts;
        last_feasible_thrusts_ = alloc.thrusts;
    } else {
        out.thrusts = last_feasible_thrusts_;
    }
    return out;
}

}  // namespace tiltset::control
