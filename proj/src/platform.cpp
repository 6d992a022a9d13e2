#include "tiltset/platform.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace tiltset::platform {

namespace {

// FNV-1a over the raw bytes of a double sequence.
void hash_doubles(std::uint64_t& h, const double* data, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) {
        std::uint64_t bits;
        std::memcpy(&bits, &data[i], sizeof(bits));
        for (int b = 0; b < 8; ++b) {
            h ^= (bits >> (8 * b)) & 0xffu;
            h *= 0x100000001b3ull;
        }
    }
}

}  // namespace

void PlatformParams::validate() const {
    if (n_uavs < 1) {
        throw std::invalid_argument("platform: n_uavs must be >= 1");
    }
    if (!(mass > 0) || !(u_max > 0) || !(gravity > 0) || !(rotor_offset > 0)) {
        throw std::invalid_argument(
            "platform: mass, u_max, gravity, rotor_offset must be positive");
    }
    const auto n = static_cast<std::size_t>(n_uavs);
    if (joint_inertia.size() != n || arm_length.size() != n ||
        arm_angle.size() != n) {
        throw std::invalid_argument(
            "platform: joint_inertia, arm_length, arm_angle must have n_uavs "
            "entries");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(joint_inertia[i] > 0) || !(arm_length[i] > 0)) {
            throw std::invalid_argument(
                "platform: joint inertias and arm lengths must be positive");
        }
        if (!std::isfinite(arm_angle[i])) {
            throw std::invalid_argument("platform: arm angles must be finite");
        }
        for (std::size_t j = i + 1; j < n; ++j) {
            if (arm_angle[i] == arm_angle[j]) {
                throw std::invalid_argument(
                    "platform: arm angles must be pairwise distinct");
            }
        }
    }
    if (!inertia.isApprox(inertia.transpose(), 1e-12)) {
        throw std::invalid_argument("platform: inertia must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<geom::Mat3> es(inertia);
    if (es.eigenvalues().minCoeff() <= 0) {
        throw std::invalid_argument("platform: inertia must be positive definite");
    }
}

std::uint64_t PlatformParams::content_hash() const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    const double head[] = {static_cast<double>(n_uavs), mass,
                           rotor_offset,  drag_ratio,
                           u_max,         gravity};
    hash_doubles(h, head, sizeof(head) / sizeof(double));
    hash_doubles(h, inertia.data(), 9);
    hash_doubles(h, joint_inertia.data(), joint_inertia.size());
    hash_doubles(h, arm_length.data(), arm_length.size());
    hash_doubles(h, arm_angle.data(), arm_angle.size());
    return h;
}

Eigen::Matrix<double, 6, 4> uav_wrench_matrix(const PlatformParams& params) {
    const double r = params.rotor_offset;
    const double k = params.drag_ratio;
    Eigen::Matrix<double, 6, 4> b;
    b << 0, 0, 0, 0,
         0, 0, 0, 0,
         1, 1, 1, 1,
         r, r, -r, -r,
         -r, r, r, -r,
         k, -k, k, -k;
    return b;
}

double joint_torque_row(const geom::Vec6& uav_wrench) {
    return uav_wrench(3);
}

AllocationMaps build_allocation_maps(const PlatformParams& params,
                                     const TiltVector& gamma) {
    const int n = params.n_uavs;
    if (gamma.size() != n) {
        throw std::invalid_argument("build_allocation_maps: gamma size mismatch");
    }
    for (int i = 0; i < n; ++i) {
        if (!std::isfinite(gamma(i))) {
            throw std::invalid_argument("build_allocation_maps: non-finite gamma");
        }
        if (std::abs(gamma(i)) > M_PI_2 + 1e-12) {
            throw std::invalid_argument(
                "build_allocation_maps: |gamma_i| exceeds pi/2 hinge range");
        }
    }

    const auto b = uav_wrench_matrix(params);
    geom::Vec6 mask;
    mask << 1, 1, 1, 0, 1, 1;  // the hinge-axis torque never reaches the payload

    AllocationMaps maps;
    maps.force.setZero(3, 4 * n);
    maps.torque.setZero(3, 4 * n);
    maps.joint.setZero(n, 4 * n);

    for (int i = 0; i < n; ++i) {
        const double alpha = params.arm_angle[i];
        // Hinge axis X_q is tangential: the UAV frame is yawed pi/2 past the
        // arm direction, so at gamma = 0 the Y_q axis points at the payload.
        const geom::Mat3 r_pq =
            geom::rot_axis(geom::Axis::z, alpha + M_PI_2) *
            geom::rot_axis(geom::Axis::x, gamma(i));
        const geom::Vec3 p_pq =
            geom::rot_axis(geom::Axis::z, alpha) *
            geom::Vec3(params.arm_length[i], 0, 0);

        // Wrench transform UAV frame -> payload frame: the adjoint arguments
        // are the payload pose expressed in the UAV frame.
        const geom::Mat6 ad = geom::adjoint_transpose(
            r_pq.transpose(), -(r_pq.transpose() * p_pq));

        const Eigen::Matrix<double, 6, 4> fp = ad * mask.asDiagonal() * b;
        maps.force.block<3, 4>(0, 4 * i) = fp.topRows<3>();
        maps.torque.block<3, 4>(0, 4 * i) = fp.bottomRows<3>();
        maps.joint.block<1, 4>(i, 4 * i) = b.row(3);
    }

    maps.all.resize(6 + n, 4 * n);
    maps.all.topRows(3) = maps.force;
    maps.all.middleRows(3, 3) = maps.torque;
    maps.all.bottomRows(n) = maps.joint;
    return maps;
}

geom::Vec3 equilibrium_force(const PlatformParams& params,
                             const geom::Mat3& R_wp,
                             const geom::Vec3& disturbance_w) {
    return R_wp.transpose() *
           (geom::Vec3(0, 0, params.weight()) - disturbance_w);
}

}  // namespace tiltset::platform
