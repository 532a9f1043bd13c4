#pragma once

// Shared scene fixtures for the test suite.

#include <vector>

#include "mva/geometry/camera.hpp"
#include "mva/rng.hpp"
#include "mva/sim/simulator.hpp"

namespace fixtures {

// A camera on a ring looking at the origin area, pixel-realistic intrinsics.
inline mva::geom::CameraPose ring_camera(int id, double angle, double radius = 8.0,
                                         double height = 2.5, double focal = 1100.0) {
    mva::geom::CameraPose p;
    p.camera_id = id;
    p.width = 1920;
    p.height = 1080;
    p.intrinsics << focal, 0, 960, 0, focal, 540, 0, 0, 1;
    const Eigen::Vector3d center(radius * std::cos(angle), radius * std::sin(angle), height);
    const Eigen::Vector3d target(0, 0, 1.0);
    const Eigen::Vector3d fwd = (target - center).normalized();
    Eigen::Vector3d right = fwd.cross(Eigen::Vector3d::UnitZ()).normalized();
    p.rotation.row(0) = right;
    p.rotation.row(1) = fwd.cross(right);
    p.rotation.row(2) = fwd;
    p.translation = -p.rotation * center;
    p.frame_rate = 30.0;
    return p;
}

inline std::vector<mva::geom::CameraPose> camera_ring(int n, double radius = 8.0) {
    std::vector<mva::geom::CameraPose> out;
    for (int i = 0; i < n; ++i)
        out.push_back(ring_camera(i, 2.0 * M_PI * i / n, radius, 2.0 + 0.3 * (i % 3)));
    return out;
}

// Small quiet scene used across module tests.
inline mva::sim::SimConfig small_scene_config() {
    mva::sim::SimConfig cfg;
    cfg.n_people = 4;
    cfg.n_cameras = 3;
    cfg.duration = 8.0;
    cfg.frame_rate = 15.0;
    cfg.descriptor_dim = 16;
    cfg.identity_separation = 1.2;
    cfg.descriptor_noise = 0.05;
    cfg.keypoint_noise_px = 0.5;
    cfg.detection_drop_rate = 0.0;
    cfg.occlusion_rate = 0.0;
    cfg.arena_radius = 4.0;
    cfg.seed = 7;
    return cfg;
}

inline mva::sim::SimConfig noiseless_config(int people = 2, int cameras = 3) {
    mva::sim::SimConfig cfg;
    cfg.n_people = people;
    cfg.n_cameras = cameras;
    cfg.duration = 4.0;
    cfg.frame_rate = 15.0;
    cfg.descriptor_dim = 16;
    cfg.identity_separation = 1.4;
    cfg.descriptor_noise = 0.0;
    cfg.keypoint_noise_px = 0.0;
    cfg.detection_drop_rate = 0.0;
    cfg.occlusion_rate = 0.0;
    cfg.arena_radius = 3.0;
    cfg.seed = 11;
    return cfg;
}

}  // namespace fixtures
