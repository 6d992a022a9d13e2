#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "test_support.hpp"
#include "tiltset/sim.hpp"

using namespace tiltset;
using geom::Vec3;

namespace {

const platform::PlatformParams& params() {
    static const auto p = test::reference_params();
    return p;
}

sim::SimState rest_state() {
    sim::SimState s;
    s.gamma = platform::TiltVector::Zero(4);
    s.gamma_rate = Eigen::VectorXd::Zero(4);
    return s;
}

}  // namespace

TEST_CASE("dynamics derivative") {
    const double mg = params().weight();

    SUBCASE("hover is an equilibrium") {
        const auto s = rest_state();
        platform::Wrench w;
        w.force = Vec3(0, 0, mg);
        const auto d =
            sim::dynamics_derivative(s, w, Eigen::VectorXd::Zero(4), params());
        CHECK(d.velocity.norm() <= 1e-13);
        CHECK(d.angular_velocity.norm() <= 1e-13);
        CHECK(d.position.norm() == 0.0);
        CHECK(d.attitude.norm() == 0.0);
        CHECK(d.gamma_rate.norm() == 0.0);
    }
    SUBCASE("free fall") {
        const auto s = rest_state();
        const auto d = sim::dynamics_derivative(
            s, platform::Wrench{}, Eigen::VectorXd::Zero(4), params());
        CHECK(d.velocity.isApprox(Vec3(0, 0, -params().gravity), 1e-13));
    }
    SUBCASE("isotropic inertia spins torque-free") {
        auto s = rest_state();
        s.angular_velocity = Vec3(0.7, -0.3, 1.1);
        platform::Wrench w;
        w.force = params().mass * params().gravity *
                  (s.attitude.transpose() * Vec3(0, 0, 1));
        auto state = s;
        for (int k = 0; k < 500; ++k) {
            state = sim::rk4_step(state, w, Eigen::VectorXd::Zero(4), params(),
                                  1e-3);
        }
        CHECK(state.angular_velocity.isApprox(s.angular_velocity, 1e-9));
    }
    SUBCASE("joint acceleration") {
        const auto s = rest_state();
        Eigen::VectorXd tau(4);
        tau << 0.01, 0, -0.02, 0;
        const auto d =
            sim::dynamics_derivative(s, platform::Wrench{}, tau, params());
        CHECK(d.gamma_rate(0) ==
              doctest::Approx(0.01 / params().joint_inertia[0]));
        CHECK(d.gamma_rate(2) ==
              doctest::Approx(-0.02 / params().joint_inertia[2]));
    }
}

TEST_CASE("rk4 integration") {
    const double mg = params().weight();

    SUBCASE("equilibrium is a fixed point") {
        const auto s = rest_state();
        platform::Wrench w;
        w.force = Vec3(0, 0, mg);
        const auto next =
            sim::rk4_step(s, w, Eigen::VectorXd::Zero(4), params(), 1e-3);
        CHECK((next.position_w - s.position_w).norm() <= 1e-12);
        CHECK((next.velocity - s.velocity).norm() <= 1e-12);
        CHECK((next.attitude - s.attitude).norm() <= 1e-12);
    }
    SUBCASE("free fall matches the closed form") {
        auto state = rest_state();
        const double dt = 1e-3;
        for (int k = 0; k < 1000; ++k) {
            state = sim::rk4_step(state, platform::Wrench{},
                                  Eigen::VectorXd::Zero(4), params(), dt);
        }
        const double expected = -0.5 * params().gravity;  // z(1 s)
        CHECK(std::abs(state.position_w.z() - expected) < 1e-9);
    }
    SUBCASE("constant joint torque gives a quadratic angle") {
        auto state = rest_state();
        platform::Wrench w;
        w.force = Vec3(0, 0, mg);
        Eigen::VectorXd tau = Eigen::VectorXd::Zero(4);
        tau(1) = 2e-4;
        const double dt = 1e-3;
        for (int k = 0; k < 500; ++k) {
            state = sim::rk4_step(state, w, tau, params(), dt);
        }
        const double t = 0.5;
        const double expected =
            0.5 * tau(1) / params().joint_inertia[1] * t * t;
        CHECK(state.gamma(1) == doctest::Approx(expected).epsilon(1e-10));
    }
    SUBCASE("energy conservation in unforced flight") {
        auto state = rest_state();
        state.velocity = Vec3(0.4, -0.2, 0.6);
        state.angular_velocity = Vec3(0.5, 0.8, -0.3);
        const auto energy = [&](const sim::SimState& s) {
            const double kinetic =
                0.5 * params().mass * s.velocity.squaredNorm() +
                0.5 * s.angular_velocity.dot(params().inertia *
                                             s.angular_velocity);
            return kinetic + params().mass * params().gravity *
                                 s.position_w.z();
        };
        const double e0 = energy(state);
        for (int k = 0; k < 5000; ++k) {
            state = sim::rk4_step(state, platform::Wrench{},
                                  Eigen::VectorXd::Zero(4), params(), 1e-3);
            CHECK((state.attitude.transpose() * state.attitude -
                   geom::Mat3::Identity())
                      .cwiseAbs()
                      .maxCoeff() <= 1e-9);
        }
        CHECK(std::abs(energy(state) - e0) / std::abs(e0) <= 1e-6);
    }
    SUBCASE("world angular momentum conserved without torque") {
        auto state = rest_state();
        state.angular_velocity = Vec3(0.9, -0.4, 0.2);
        const Vec3 l0 =
            state.attitude * (params().inertia * state.angular_velocity);
        for (int k = 0; k < 3000; ++k) {
            state = sim::rk4_step(state, platform::Wrench{},
                                  Eigen::VectorXd::Zero(4), params(), 1e-3);
        }
        const Vec3 l1 =
            state.attitude * (params().inertia * state.angular_velocity);
        CHECK((l1 - l0).norm() <= 1e-8);
    }
}

TEST_CASE("wind zone") {
    const sim::DisturbanceZone zone{Vec3(0, 0.5, 0), 1.0, 4.0};
    CHECK(sim::wind_force(zone, Vec3(0, 0, 0)).norm() == 0.0);
    CHECK(sim::wind_force(zone, Vec3(2.5, 7, -1)).isApprox(Vec3(0, 0.5, 0)));
    CHECK(sim::wind_force(zone, Vec3(4.0, 0, 0)).isApprox(Vec3(0, 0.5, 0)));
    CHECK(sim::wind_force(zone, Vec3(1.0, 0, 0)).isApprox(Vec3(0, 0.5, 0)));
    CHECK(sim::wind_force(zone, Vec3(4.0 + 1e-9, 0, 0)).norm() == 0.0);
}

TEST_CASE("arc trajectory") {
    const double T = 40.0;
    const auto traj = sim::make_trajectory(sim::TrajectoryKind::arc, T, {});

    SUBCASE("rest-to-rest boundary conditions") {
        const auto s0 = traj.at(0.0);
        CHECK(s0.position.norm() == 0.0);
        CHECK(s0.velocity.norm() == 0.0);
        CHECK(s0.acceleration.norm() == 0.0);
        const auto s1 = traj.at(T);
        CHECK(s1.position.x() == doctest::Approx(5.0));
        CHECK(s1.velocity.norm() <= 1e-12);
        CHECK(s1.acceleration.norm() <= 1e-12);
    }
    SUBCASE("traverses the wind zone") {
        CHECK(traj.at(T).position.x() >= 5.0 - 1e-12);
    }
    SUBCASE("lateral force demand fits the default table range") {
        CHECK(traj.max_lateral_force(params().mass) + 0.5 <= 1.0);
    }
    SUBCASE("acceleration is the derivative of velocity") {
        const double h = 1e-5;
        for (double t : {3.0, 11.0, 17.5, 26.0, 39.0}) {
            const Vec3 numeric =
                (traj.at(t + h).velocity - traj.at(t - h).velocity) / (2 * h);
            CHECK((numeric - traj.at(t).acceleration).norm() <= 1e-6);
        }
    }
    SUBCASE("duration must be positive") {
        CHECK_THROWS_AS(sim::make_trajectory(sim::TrajectoryKind::arc, 0.0, {}),
                        std::invalid_argument);
    }
}

TEST_CASE("closed-loop run") {
    const auto& table = test::shared_test_table();
    control::ControllerConfig ctrl;

    SUBCASE("zero-length run logs exactly the initial record") {
        const auto traj =
            sim::make_trajectory(sim::TrajectoryKind::hover, 1.0, {});
        const auto log = sim::run(params(), ctrl, table, traj,
                                  sim::DisturbanceZone{}, 1e-3, 0.0);
        CHECK(log.records.size() == 1);
        CHECK(log.records.front().t == 0.0);
    }

    SUBCASE("hover regulation stays within a millimetre") {
        const auto traj =
            sim::make_trajectory(sim::TrajectoryKind::hover, 10.0, {});
        const auto log = sim::run(params(), ctrl, table, traj,
                                  sim::DisturbanceZone{}, 1e-3, 10.0);
        CHECK(log.max_position_error < 1e-3);
        CHECK(log.infeasible_steps == 0);
    }

    SUBCASE("a demanding trajectory outside the table range is rejected") {
        sim::TrajectoryParams tp;
        tp.y_amplitude = 60.0;  // lateral accel demand blows the 1 N budget
        const auto traj =
            sim::make_trajectory(sim::TrajectoryKind::arc, 10.0, tp);
        CHECK_THROWS_AS(sim::run(params(), ctrl, table, traj,
                                 sim::DisturbanceZone{}, 1e-3, 10.0),
                        sim::TableRangeError);
    }

    SUBCASE("manual loop replays run()") {
        const auto traj =
            sim::make_trajectory(sim::TrajectoryKind::hover, 1.0, {});
        const sim::DisturbanceZone zone{Vec3(0, 0.2, 0), -1.0, 1.0};
        const double dt = 1e-3;
        const auto log =
            sim::run(params(), ctrl, table, traj, zone, dt, 0.05);

        // replicate: controller at exact state, wrench at current gamma
        sim::SimState state;
        state.gamma = table.interpolate(-zone.force.x(), -zone.force.y());
        state.gamma_rate = Eigen::VectorXd::Zero(4);
        control::Controller controller(params(), ctrl, &table);
        controller.reset(Eigen::Vector2d(-zone.force.x(), -zone.force.y()));
        for (std::size_t k = 0; k + 1 < log.records.size(); ++k) {
            control::StateMeasurement meas;
            meas.position_w = state.position_w;
            meas.attitude = state.attitude;
            meas.velocity_b = state.velocity;
            meas.angular_velocity_b = state.angular_velocity;
            meas.gamma = state.gamma;
            meas.gamma_rate = state.gamma_rate;
            control::References refs;
            refs.disturbance_estimate_w =
                sim::wind_force(zone, state.position_w);
            const auto out = controller.step(meas, refs);
            const auto maps =
                platform::build_allocation_maps(params(), state.gamma);
            platform::Wrench applied;
            applied.force =
                maps.force * out.thrusts +
                state.attitude.transpose() *
                    sim::wind_force(zone, state.position_w);
            applied.torque = maps.torque * out.thrusts;
            state = sim::rk4_step(state, applied, maps.joint * out.thrusts,
                                  params(), dt);
            const auto& rec = log.records[k + 1];
            CHECK((rec.position - state.position_w).norm() <= 1e-12);
            CHECK((rec.gamma - state.gamma).norm() <= 1e-12);
        }
    }
}

TEST_CASE("csv schema") {
    const auto& table = test::shared_test_table();
    control::ControllerConfig ctrl;
    const auto traj = sim::make_trajectory(sim::TrajectoryKind::hover, 1.0, {});
    const auto log = sim::run(params(), ctrl, table, traj,
                              sim::DisturbanceZone{}, 1e-3, 0.01);
    std::ostringstream out;
    log.write_csv(out);
    const std::string text = out.str();
    const auto header_end = text.find('\n');
    const std::string header = text.substr(0, header_end);
    CHECK(header ==
          "t,px,py,pz,roll,pitch,yaw,vx,vy,vz,wx,wy,wz,"
          "g1,g2,g3,g4,gref1,gref2,gref3,gref4,"
          "frefx,frefy,frefz,fnomx,fnomy,fnomz,"
          "u1,u2,u3,u4,u5,u6,u7,u8,u9,u10,u11,u12,u13,u14,u15,u16,"
          "feasible,wind");
    // 45 columns in every data row
    const auto first_row =
        text.substr(header_end + 1, text.find('\n', header_end + 1) -
                                        header_end - 1);
    CHECK(std::count(first_row.begin(), first_row.end(), ',') == 44);
    CHECK(log.records.size() == 11);
}
