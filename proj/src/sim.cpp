#include "tiltset/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace tiltset::sim {

namespace {

geom::Mat3 orthonormalized(const geom::Mat3& r) {
    Eigen::JacobiSVD<geom::Mat3> svd(
        r, Eigen::ComputeFullU | Eigen::ComputeFullV);
    geom::Mat3 u = svd.matrixU();
    if ((u * svd.matrixV().transpose()).determinant() < 0) {
        u.col(2) *= -1;
    }
    return u * svd.matrixV().transpose();
}

void append_fields(std::string& line, const double* values, int count) {
    char buf[32];
    for (int i = 0; i < count; ++i) {
        std::snprintf(buf, sizeof(buf), ",%.17g", values[i]);
        line += buf;
    }
}

}  // namespace

StateDerivative dynamics_derivative(const SimState& state,
                                    const platform::Wrench& wrench,
                                    const Eigen::VectorXd& joint_torque,
                                    const platform::PlatformParams& params) {
    StateDerivative d;
    const geom::Vec3 gravity_b =
        params.gravity * state.attitude.transpose() * geom::Vec3(0, 0, 1);
    d.velocity = wrench.force / params.mass -
                 state.angular_velocity.cross(state.velocity) - gravity_b;
    d.angular_velocity = params.inertia.ldlt().solve(
        wrench.torque - state.angular_velocity.cross(
                            params.inertia * state.angular_velocity));
    d.attitude = state.attitude * geom::hat(state.angular_velocity);
    d.position = state.attitude * state.velocity;
    d.gamma = state.gamma_rate;
    d.gamma_rate.resize(joint_torque.size());
    for (Eigen::Index i = 0; i < joint_torque.size(); ++i) {
        d.gamma_rate(i) = joint_torque(i) / params.joint_inertia[i];
    }
    return d;
}

SimState rk4_step(const SimState& state, const platform::Wrench& wrench,
                  const Eigen::VectorXd& joint_torque,
                  const platform::PlatformParams& params, double dt) {
    if (!(dt > 0)) {
        throw std::invalid_argument("rk4_step: dt must be positive");
    }
    const auto advance = [&](const SimState& s, const StateDerivative& d,
                             double h) {
        SimState out = s;
        out.position_w = state.position_w + h * d.position;
        out.attitude = state.attitude + h * d.attitude;
        out.velocity = state.velocity + h * d.velocity;
        out.angular_velocity = state.angular_velocity + h * d.angular_velocity;
        out.gamma = state.gamma + h * d.gamma;
        out.gamma_rate = state.gamma_rate + h * d.gamma_rate;
        return out;
    };

    const StateDerivative k1 =
        dynamics_derivative(state, wrench, joint_torque, params);
    const StateDerivative k2 = dynamics_derivative(
        advance(state, k1, dt / 2), wrench, joint_torque, params);
    const StateDerivative k3 = dynamics_derivative(
        advance(state, k2, dt / 2), wrench, joint_torque, params);
    const StateDerivative k4 =
        dynamics_derivative(advance(state, k3, dt), wrench, joint_torque, params);

    SimState next = state;
    const double w = dt / 6.0;
    next.position_w += w * (k1.position + 2 * k2.position + 2 * k3.position +
                            k4.position);
    next.attitude += w * (k1.attitude + 2 * k2.attitude + 2 * k3.attitude +
                          k4.attitude);
    next.velocity += w * (k1.velocity + 2 * k2.velocity + 2 * k3.velocity +
                          k4.velocity);
    next.angular_velocity +=
        w * (k1.angular_velocity + 2 * k2.angular_velocity +
             2 * k3.angular_velocity + k4.angular_velocity);
    next.gamma += w * (k1.gamma + 2 * k2.gamma + 2 * k3.gamma + k4.gamma);
    next.gamma_rate += w * (k1.gamma_rate + 2 * k2.gamma_rate +
                            2 * k3.gamma_rate + k4.gamma_rate);
    next.attitude = orthonormalized(next.attitude);
    next.time = state.time + dt;
    return next;
}

geom::Vec3 wind_force(const DisturbanceZone& zone,
                      const geom::Vec3& position_w) {
    if (position_w.x() >= zone.x_min && position_w.x() <= zone.x_max) {
        return zone.force;
    }
    return geom::Vec3::Zero();
}

Trajectory::Trajectory(TrajectoryKind kind, double duration,
                       TrajectoryParams params)
    : kind_(kind), duration_(duration), params_(params) {
    if (!(duration > 0)) {
        throw std::invalid_argument("trajectory: duration must be positive");
    }
}

TrajectorySample Trajectory::at(double t) const {
    TrajectorySample sample;
    if (kind_ == TrajectoryKind::hover) {
        return sample;
    }
    const double s = std::clamp(t / duration_, 0.0, 1.0);
    const double T = duration_;

    // Quintic smooth-step along x: rest-to-rest with continuous accel.
    const double q = ((6 * s - 15) * s + 10) * s * s * s;
    const double qd = ((30 * s - 60) * s + 30) * s * s;
    const double qdd = ((120 * s - 180) * s + 60) * s;
    sample.position.x() = params_.x_distance * q;
    sample.velocity.x() = params_.x_distance * qd / T;
    sample.acceleration.x() = params_.x_distance * qdd / (T * T);

    // sin^3 lateral arc: zero position, velocity and acceleration at both
    // ends, single smooth excursion of y_amplitude.
    const double th = M_PI * s;
    const double sn = std::sin(th);
    const double cs = std::cos(th);
    const double a = params_.y_amplitude;
    sample.position.y() = a * sn * sn * sn;
    sample.velocity.y() = a * 3.0 * M_PI / T * sn * sn * cs;
    sample.acceleration.y() =
        a * 3.0 * M_PI * M_PI / (T * T) * (2.0 * sn * cs * cs - sn * sn * sn);
    return sample;
}

double Trajectory::max_lateral_force(double mass) const {
    double worst = 0.0;
    const int samples = 4000;
    for (int i = 0; i <= samples; ++i) {
        const auto s = at(duration_ * i / samples);
        worst = std::max(worst, mass * std::abs(s.acceleration.x()));
        worst = std::max(worst, mass * std::abs(s.acceleration.y()));
    }
    return worst;
}

Trajectory make_trajectory(TrajectoryKind kind, double duration,
                           const TrajectoryParams& params) {
    return Trajectory(kind, duration, params);
}

void SimLog::write_csv(std::ostream& out) const {
    std::string line =
        "t,px,py,pz,roll,pitch,yaw,vx,vy,vz,wx,wy,wz,"
        "g1,g2,g3,g4,gref1,gref2,gref3,gref4,"
        "frefx,frefy,frefz,fnomx,fnomy,fnomz,"
        "u1,u2,u3,u4,u5,u6,u7,u8,u9,u10,u11,u12,u13,u14,u15,u16,"
        "feasible,wind";
    out << line << '\n';
    for (const auto& r : records) {
        char head[32];
        std::snprintf(head, sizeof(head), "%.17g", r.t);
        line.assign(head);
        append_fields(line, r.position.data(), 3);
        append_fields(line, r.rpy.data(), 3);
        append_fields(line, r.velocity.data(), 3);
        append_fields(line, r.angular_velocity.data(), 3);
        append_fields(line, r.gamma.data(), static_cast<int>(r.gamma.size()));
        append_fields(line, r.gamma_ref.data(),
                      static_cast<int>(r.gamma_ref.size()));
        append_fields(line, r.f_ref.data(), 3);
        append_fields(line, r.f_nom.data(), 3);
        append_fields(line, r.thrusts.data(),
                      static_cast<int>(r.thrusts.size()));
        line += r.allocation_feasible ? ",1" : ",0";
        line += r.disturbance_active ? ",1" : ",0";
        out << line << '\n';
    }
}

SimLog run(const platform::PlatformParams& params,
           const control::ControllerConfig& ctrl_cfg,
           const tiltopt::TiltTable& table, const Trajectory& trajectory,
           const DisturbanceZone& zone, double dt, double duration) {
    params.validate();
    ctrl_cfg.validate();
    if (!(dt > 0) || duration < 0) {
        throw std::invalid_argument("run: need dt > 0 and duration >= 0");
    }

    // The table must cover the nominal lateral demand plus the wind
    // feedforward; PID corrections on top of that stay small.
    const double lateral_demand =
        trajectory.max_lateral_force(params.mass) +
        std::max(std::abs(zone.force.x()), std::abs(zone.force.y()));
    const double range = std::min(table.range_x(), table.range_y());
    if (lateral_demand > range + 1e-9) {
        std::ostringstream msg;
        msg << "run: lateral force demand " << lateral_demand
            << " N exceeds the tilt-table range " << range << " N";
        throw TableRangeError(msg.str());
    }

    const int n = params.n_uavs;
    SimState state;
    state.position_w = trajectory.at(0.0).position;
    state.gamma_rate = Eigen::VectorXd::Zero(n);

    // Start settled: joints at the table solution for the initial demand.
    const geom::Vec3 wind0 = wind_force(zone, state.position_w);
    const Eigen::Vector2d lateral0 =
        (params.mass * trajectory.at(0.0).acceleration - wind0).head<2>();
    state.gamma = table.interpolate(lateral0.x(), lateral0.y());

    control::Controller controller(params, ctrl_cfg, &table);
    controller.reset(lateral0);

    SimLog log;
    const auto n_steps = static_cast<long>(std::llround(duration / dt));
    log.records.reserve(n_steps + 1);
    int consecutive_infeasible = 0;

    for (long k = 0;; ++k) {
        const double t = k * dt;
        const auto ref = trajectory.at(t);
        const geom::Vec3 wind = wind_force(zone, state.position_w);

        control::StateMeasurement meas;
        meas.position_w = state.position_w;
        meas.attitude = state.attitude;
        meas.velocity_b = state.velocity;
        meas.angular_velocity_b = state.angular_velocity;
        meas.gamma = state.gamma;
        meas.gamma_rate = state.gamma_rate;

        control::References refs;
        refs.position_w = ref.position;
        refs.velocity_w = ref.velocity;
        refs.acceleration_w = ref.acceleration;
        refs.disturbance_estimate_w = wind;  // perfect detection

        const auto out = controller.step(meas, refs);
        if (!out.allocation_feasible) {
            ++log.infeasible_steps;
            if (++consecutive_infeasible > kMaxConsecutiveInfeasible) {
                std::ostringstream msg;
                msg << "run: allocation infeasible for more than "
                    << kMaxConsecutiveInfeasible << " consecutive steps at t="
                    << t << " s";
                throw AllocationAbort(msg.str());
            }
        } else {
            consecutive_infeasible = 0;
        }

        LogRecord rec;
        rec.t = t;
        rec.position = state.position_w;
        rec.rpy = geom::rpy_zyx(state.attitude);
        rec.velocity = state.velocity;
        rec.angular_velocity = state.angular_velocity;
        rec.gamma = state.gamma;
        rec.gamma_ref = out.gamma_ref;
        rec.f_ref = out.f_p_ref;
        rec.f_nom = state.attitude.transpose() *
                    (params.mass * ref.acceleration +
                     geom::Vec3(0, 0, params.weight()));
        rec.thrusts = out.thrusts;
        rec.allocation_feasible = out.allocation_feasible;
        rec.disturbance_active = wind.squaredNorm() > 0;
        log.records.push_back(std::move(rec));

        log.max_position_error = std::max(
            log.max_position_error, (ref.position - state.position_w).norm());
        log.max_orientation_error =
            std::max(log.max_orientation_error,
                     geom::rpy_zyx(state.attitude).cwiseAbs().maxCoeff());

        if (k >= n_steps) break;

        // Apply the allocated thrusts through the maps at the current (not
        // reference) tilt angles; wind enters as an external force.
        const auto maps = platform::build_allocation_maps(params, state.gamma);
        platform::Wrench applied;
        applied.force = maps.force * out.thrusts +
                        state.attitude.transpose() * wind;
        applied.torque = maps.torque * out.thrusts;
        const Eigen::VectorXd joint_torque = maps.joint * out.thrusts;
        state = rk4_step(state, applied, joint_torque, params, dt);
    }
    return log;
}

}  // namespace tiltset::sim
