#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "mva/common.hpp"

namespace mva::geom {

MVA_DEFINE_ERROR(NonPositiveDepth);
MVA_DEFINE_ERROR(DegenerateBaseline);
MVA_DEFINE_ERROR(InvalidPose);

/// One camera at one frame. Rotation maps world to camera coordinates,
/// x_cam = R * x_world + t. Per-frame poses support moving cameras.
struct CameraPose {
    int camera_id = 0;
    int frame = 0;
    Eigen::Matrix3d intrinsics = Eigen::Matrix3d::Identity();
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();
    int width = 0;
    int height = 0;
    double frame_rate = 0.0;
    double start_time = 0.0;

    Eigen::Vector3d center() const { return -rotation.transpose() * translation; }

    // Optical axis in world coordinates, pointing into the scene.
    Eigen::Vector3d view_direction() const { return rotation.row(2).transpose(); }

    Eigen::Matrix<double, 3, 4> projection_matrix() const {
        Eigen::Matrix<double, 3, 4> P;
        P.leftCols<3>() = rotation;
        P.col(3) = translation;
        return intrinsics * P;
    }

    void validate() const {
        const Eigen::Matrix3d I = rotation * rotation.transpose();
        if ((I - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-9 ||
            std::abs(rotation.determinant() - 1.0) > 1e-9)
            throw InvalidPose("rotation is not a proper rotation");
        if (intrinsics(0, 0) <= 0.0 || intrinsics(1, 1) <= 0.0)
            throw InvalidPose("focal entries must be positive");
        if (width <= 0 || height <= 0) throw InvalidPose("image size must be positive");
    }
};

struct Keypoint2D {
    Eigen::Vector2d position = Eigen::Vector2d::Zero();
    double confidence = 0.0;

    bool visible() const { return confidence > 0.0; }
};

/// Pinhole projection in pixels, no lens distortion.
/// Throws NonPositiveDepth for points at or behind the camera plane.
inline Eigen::Vector2d project(const CameraPose& pose, const Eigen::Vector3d& point) {
    const Eigen::Vector3d pc = pose.rotation * point + pose.translation;
    if (pc.z() <= 0.0) throw NonPositiveDepth("point depth " + std::to_string(pc.z()));
    const Eigen::Vector3d h = pose.intrinsics * pc;
    return {h.x() / h.z(), h.y() / h.z()};
}

/// Projection that reports success instead of throwing; used in inner loops.
inline bool try_project(const CameraPose& pose, const Eigen::Vector3d& point,
                        Eigen::Vector2d& pixel) {
    const Eigen::Vector3d pc = pose.rotation * point + pose.translation;
    if (pc.z() <= 0.0) return false;
    const Eigen::Vector3d h = pose.intrinsics * pc;
    pixel = {h.x() / h.z(), h.y() / h.z()};
    return true;
}

inline bool in_image(const CameraPose& pose, const Eigen::Vector2d& px) {
    return px.x() >= 0.0 && px.y() >= 0.0 && px.x() < pose.width && px.y() < pose.height;
}

// Minimum distance between point p and segment [a, b].
inline double point_segment_distance(const Eigen::Vector3d& p, const Eigen::Vector3d& a,
                                     const Eigen::Vector3d& b) {
    const Eigen::Vector3d ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 < 1e-18) return (p - a).norm();
    const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

// Minimum distance between segments [a0,a1] and [b0,b1], with the parameter
// of the closest point on the first segment returned through s_out.
inline double segment_segment_distance(const Eigen::Vector3d& a0, const Eigen::Vector3d& a1,
                                       const Eigen::Vector3d& b0, const Eigen::Vector3d& b1,
                                       double* s_out = nullptr) {
    const Eigen::Vector3d d1 = a1 - a0;
    const Eigen::Vector3d d2 = b1 - b0;
    const Eigen::Vector3d r = a0 - b0;
    const double a = d1.squaredNorm();
    const double e = d2.squaredNorm();
    const double f = d2.dot(r);
    double s = 0.0, t = 0.0;
    if (a < 1e-18 && e < 1e-18) {
        // both degenerate
    } else if (a < 1e-18) {
        t = std::clamp(f / e, 0.0, 1.0);
    } else {
        const double c = d1.dot(r);
        if (e < 1e-18) {
            s = std::clamp(-c / a, 0.0, 1.0);
        } else {
            const double b = d1.dot(d2);
            const double denom = a * e - b * b;
            s = denom > 1e-18 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
            t = (b * s + f) / e;
            if (t < 0.0) {
                t = 0.0;
                s = std::clamp(-c / a, 0.0, 1.0);
            } else if (t > 1.0) {
                t = 1.0;
                s = std::clamp((b - c) / a, 0.0, 1.0);
            }
        }
    }
    if (s_out) *s_out = s;
    return (a0 + s * d1 - (b0 + t * d2)).norm();
}

}  // namespace mva::geom
