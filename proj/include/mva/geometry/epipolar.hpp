#pragma once

#include <limits>

#include <Eigen/Dense>

#include "mva/geometry/camera.hpp"

namespace mva::geom {

inline Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
    Eigen::Matrix3d s;
    s << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
    return s;
}

/// Fundamental matrix for an image pair, satisfying x_b' F x_a = 0 for
/// projections x_a, x_b of a common 3D point. Normalized to unit Frobenius
/// norm, so it is defined up to sign. Throws DegenerateBaseline when the
/// camera centers coincide.
inline Eigen::Matrix3d fundamental(const CameraPose& pose_a, const CameraPose& pose_b) {
    const Eigen::Vector3d ca = pose_a.center();
    const Eigen::Vector3d cb = pose_b.center();
    if ((ca - cb).norm() <= 1e-9) throw DegenerateBaseline("camera centers coincide");

    // Relative pose a -> b, then F = Kb^-T [t]x R Ka^-1.
    const Eigen::Matrix3d r_rel = pose_b.rotation * pose_a.rotation.transpose();
    const Eigen::Vector3d t_rel = pose_b.translation - r_rel * pose_a.translation;
    const Eigen::Matrix3d e = skew(t_rel) * r_rel;
    Eigen::Matrix3d f = pose_b.intrinsics.inverse().transpose() * e * pose_a.intrinsics.inverse();
    return f / f.norm();
}

inline double point_line_distance(const Eigen::Vector2d& x, const Eigen::Vector3d& line) {
    const double n = std::hypot(line.x(), line.y());
    if (n == 0.0) return std::numeric_limits<double>::infinity();
    return std::abs(line.x() * x.x() + line.y() * x.y() + line.z()) / n;
}

/// Bidirectional point-to-epipolar-line distance in pixels: the mean of the
/// distance from x_b to the line F x_a and from x_a to the line F' x_b.
/// The products are written out by index so that swapping the arguments
/// together with transposing F runs the exact same scalar operations,
/// making the symmetry bit-exact.
inline double epipolar_distance(const Eigen::Vector2d& x_a, const Eigen::Vector2d& x_b,
                                const Eigen::Matrix3d& f) {
    Eigen::Vector3d line_b, line_a;
    for (int i = 0; i < 3; ++i) {
        line_b[i] = f(i, 0) * x_a.x() + f(i, 1) * x_a.y() + f(i, 2);
        line_a[i] = f(0, i) * x_b.x() + f(1, i) * x_b.y() + f(2, i);
    }
    const double d_b = point_line_distance(x_b, line_b);
    const double d_a = point_line_distance(x_a, line_a);
    return 0.5 * (d_b + d_a);
}

}  // namespace mva::geom
