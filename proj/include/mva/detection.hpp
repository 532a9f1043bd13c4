#pragma once

#include <array>
#include <limits>
#include <optional>

#include <Eigen/Dense>

#include "mva/geometry/camera.hpp"
#include "mva/sim/skeleton_def.hpp"

namespace mva {

/// One observed person instance in one frame of one camera: 18 keypoints
/// with confidences plus a unit-norm appearance descriptor. gt_identity is
/// only populated by the simulator.
struct Detection {
    int id = -1;
    int camera_id = 0;
    int frame = 0;
    std::array<geom::Keypoint2D, kNumJoints> keypoints{};
    Eigen::VectorXd descriptor;
    Eigen::Vector2d bbox_min = Eigen::Vector2d::Zero();
    Eigen::Vector2d bbox_max = Eigen::Vector2d::Zero();
    std::optional<int> gt_identity;

    int visible_keypoints() const {
        int n = 0;
        for (const auto& kp : keypoints)
            if (kp.visible()) ++n;
        return n;
    }

    // Centroid of visible keypoints; falls back to bbox center when nothing
    // is visible (does not happen for detections the simulator emits).
    Eigen::Vector2d centroid() const {
        Eigen::Vector2d c = Eigen::Vector2d::Zero();
        int n = 0;
        for (const auto& kp : keypoints)
            if (kp.visible()) {
                c += kp.position;
                ++n;
            }
        return n > 0 ? Eigen::Vector2d(c / n) : Eigen::Vector2d(0.5 * (bbox_min + bbox_max));
    }

    void recompute_bbox() {
        bbox_min.setConstant(std::numeric_limits<double>::max());
        bbox_max.setConstant(std::numeric_limits<double>::lowest());
        bool any = false;
        for (const auto& kp : keypoints)
            if (kp.visible()) {
                bbox_min = bbox_min.cwiseMin(kp.position);
                bbox_max = bbox_max.cwiseMax(kp.position);
                any = true;
            }
        if (!any) {
            bbox_min.setZero();
            bbox_max.setZero();
        }
    }

    bool bbox_overlaps(const Detection& other) const {
        return bbox_min.x() <= other.bbox_max.x() && other.bbox_min.x() <= bbox_max.x() &&
               bbox_min.y() <= other.bbox_max.y() && other.bbox_min.y() <= bbox_max.y();
    }
};

inline double cosine_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return a.dot(b);
}

}  // namespace mva
