#include "tiltset/geom.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tiltset::geom {

Mat3 rot_axis(Axis axis, double angle) {
    if (!std::isfinite(angle)) {
        throw std::invalid_argument("rot_axis: angle must be finite");
    }
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    Mat3 r;
    switch (axis) {
        case Axis::x:
            r << 1, 0, 0,
                 0, c, -s,
                 0, s, c;
            break;
        case Axis::y:
            r << c, 0, s,
                 0, 1, 0,
                 -s, 0, c;
            break;
        case Axis::z:
            r << c, -s, 0,
                 s, c, 0,
                 0, 0, 1;
            break;
    }
    return r;
}

Mat3 hat(const Vec3& a) {
    Mat3 m;
    m << 0, -a.z(), a.y(),
         a.z(), 0, -a.x(),
         -a.y(), a.x(), 0;
    return m;
}

Mat6 adjoint_transpose(const Mat3& R, const Vec3& p) {
    Mat6 ad = Mat6::Zero();
    const Mat3 rt = R.transpose();
    ad.topLeftCorner<3, 3>() = rt;
    ad.bottomLeftCorner<3, 3>() = -rt * hat(p);
    ad.bottomRightCorner<3, 3>() = rt;
    return ad;
}

Vec3 rpy_zyx(const Mat3& R) {
    const double pitch = -std::asin(std::clamp(R(2, 0), -1.0, 1.0));
    const double roll = std::atan2(R(2, 1), R(2, 2));
    const double yaw = std::atan2(R(1, 0), R(0, 0));
    return {roll, pitch, yaw};
}

int rank(const MatDyn& m, double tol) {
    if (!(tol > 0)) {
        throw std::invalid_argument("rank: tol must be positive");
    }
    if (m.size() == 0) {
        return 0;
    }
    Eigen::JacobiSVD<MatDyn> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) {
        return 0;
    }
    const double cutoff = tol * sv(0);
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > cutoff) {
            ++r;
        }
    }
    return r;
}

}  // namespace tiltset::geom
