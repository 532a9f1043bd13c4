#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/QR>

#include "mva/common.hpp"
#include "mva/detection.hpp"
#include "mva/geometry/camera.hpp"
#include "mva/rng.hpp"
#include "mva/sim/body_model.hpp"

namespace mva::sim {

MVA_DEFINE_ERROR(InvalidConfig);

struct SimConfig {
    int n_people = 14;
    int n_cameras = 9;
    double duration = 60.0;       // seconds
    double frame_rate = 30.0;     // frames/second, all cameras
    std::vector<int> offsets;     // per-camera integer frame offsets; zeros if empty
    int descriptor_dim = 32;
    double identity_separation = 1.2;  // mean inter-identity descriptor angle, radians
    double descriptor_noise = 0.05;    // per-observation angular jitter, radians
    double keypoint_noise_px = 1.0;
    double detection_drop_rate = 0.01;
    double occlusion_rate = 0.02;  // random per-joint dropout on top of geometric occlusion
    std::vector<std::pair<int, int>> confusion_pairs;
    std::uint64_t seed = 1;

    // Camera/arena parameters.
    int image_width = 1920;
    int image_height = 1080;
    double arena_radius = 6.0;

    // View-dependent descriptor corruption: a fixed subspace whose
    // coefficients depend on the bearing of the camera relative to the
    // person's heading. Models the viewpoint-dependent appearance gap a
    // scene-adapted embedding is supposed to remove. Off by default.
    int nuisance_dim = 0;
    double nuisance_gain = 0.0;

    int frames() const { return static_cast<int>(std::lround(duration * frame_rate)); }

    void validate() const {
        if (n_people < 1 || n_cameras < 1) throw InvalidConfig("need at least one person and camera");
        if (duration <= 0.0) throw InvalidConfig("duration must be positive");
        if (frame_rate <= 0.0) throw InvalidConfig("frame_rate must be positive");
        if (descriptor_dim < 2) throw InvalidConfig("descriptor_dim must be >= 2");
        for (double r : {descriptor_noise, keypoint_noise_px})
            if (r < 0.0) throw InvalidConfig("noise parameters must be non-negative");
        for (double r : {detection_drop_rate, occlusion_rate})
            if (r < 0.0 || r > 1.0) throw InvalidConfig("rates must lie in [0,1]");
        if (!offsets.empty() && static_cast<int>(offsets.size()) != n_cameras)
            throw InvalidConfig("offsets must have one entry per camera");
        for (auto [a, b] : confusion_pairs)
            if (a < 0 || b < 0 || a >= n_people || b >= n_people || a == b)
                throw InvalidConfig("confusion pair out of range");
        if (nuisance_dim < 0 || nuisance_dim >= descriptor_dim)
            throw InvalidConfig("nuisance_dim must lie in [0, descriptor_dim)");
        if (nuisance_gain < 0.0) throw InvalidConfig("nuisance_gain must be non-negative");
    }
};

/// Per-person ground-truth track sampled on the global tick grid.
struct PersonTrack {
    int person_id = 0;
    int first_tick = 0;
    std::vector<JointSet> joints;  // index i is tick first_tick + i

    const JointSet& at_tick(int tick) const { return joints[tick - first_tick]; }
    bool has_tick(int tick) const {
        return tick >= first_tick && tick < first_tick + static_cast<int>(joints.size());
    }
    int last_tick() const { return first_tick + static_cast<int>(joints.size()) - 1; }
};

struct GroundTruth {
    std::vector<PersonTrack> tracks;                    // indexed by person id
    std::vector<std::array<double, kNumLimbs>> limbs;   // per person, meters
    std::vector<int> offsets;                           // per camera, frames
    double tick_rate = 0.0;
};

struct Scene {
    std::vector<std::vector<geom::CameraPose>> poses;  // [camera][frame]
    std::vector<Detection> detections;                 // sorted by (camera, frame, id)
    GroundTruth gt;
    SimConfig config;

    const geom::CameraPose* pose(int camera, int frame) const {
        if (camera < 0 || camera >= static_cast<int>(poses.size())) return nullptr;
        if (frame < 0 || frame >= static_cast<int>(poses[camera].size())) return nullptr;
        return &poses[camera][frame];
    }
    int n_cameras() const { return static_cast<int>(poses.size()); }
    int n_frames(int camera) const { return static_cast<int>(poses[camera].size()); }
};

namespace detail {

// Identity base vectors with a target mean pairwise angle, found by
// bisecting the concentration around a common mean direction.
inline std::vector<Eigen::VectorXd> identity_bases(int n, int dim, double target_angle, Rng& rng) {
    std::vector<Eigen::VectorXd> raw(n);
    for (auto& v : raw) v = rng.unit_vector(dim);
    if (n == 1) return raw;

    const Eigen::VectorXd mu = rng.unit_vector(dim);
    auto spread = [&](double kappa) {
        std::vector<Eigen::VectorXd> out(n);
        for (int i = 0; i < n; ++i) out[i] = (mu + kappa * raw[i]).normalized();
        return out;
    };
    auto mean_angle = [&](const std::vector<Eigen::VectorXd>& vs) {
        double s = 0.0;
        int c = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                s += std::acos(std::clamp(vs[i].dot(vs[j]), -1.0, 1.0));
                ++c;
            }
        return s / c;
    };

    double lo = 1e-3, hi = 1e3;
    if (mean_angle(spread(hi)) < target_angle) return spread(hi);  // random is the ceiling
    for (int it = 0; it < 60; ++it) {
        const double mid = std::sqrt(lo * hi);
        if (mean_angle(spread(mid)) < target_angle)
            lo = mid;
        else
            hi = mid;
    }
    return spread(hi);
}

// Rotate u by `angle` toward a direction orthogonal to it.
inline Eigen::VectorXd rotate_toward(const Eigen::VectorXd& u, const Eigen::VectorXd& dir,
                                     double angle) {
    Eigen::VectorXd w = dir - dir.dot(u) * u;
    const double n = w.norm();
    if (n < 1e-12) return u;
    w /= n;
    return std::cos(angle) * u + std::sin(angle) * w;
}

struct CameraRig {
    double radius, height, phi0, omega, focal;
    Eigen::Vector2d target_drift;
    double drift_period;

    geom::CameraPose pose_at(int camera_id, int frame, const SimConfig& cfg, int offset) const {
        const double t = (frame + offset) / cfg.frame_rate;
        const double phi = phi0 + omega * t;
        const Eigen::Vector3d center(radius * std::cos(phi), radius * std::sin(phi), height);
        const Eigen::Vector3d target(target_drift.x() * std::sin(2.0 * M_PI * t / drift_period),
                                     target_drift.y() * std::cos(2.0 * M_PI * t / drift_period),
                                     1.0);
        const Eigen::Vector3d fwd = (target - center).normalized();
        Eigen::Vector3d right = fwd.cross(Eigen::Vector3d::UnitZ());
        right.normalize();
        const Eigen::Vector3d down = fwd.cross(right);

        geom::CameraPose p;
        p.camera_id = camera_id;
        p.frame = frame;
        p.rotation.row(0) = right;
        p.rotation.row(1) = down;
        p.rotation.row(2) = fwd;
        p.translation = -p.rotation * center;
        p.intrinsics << focal, 0, cfg.image_width / 2.0, 0, focal, cfg.image_height / 2.0, 0, 0, 1;
        p.width = cfg.image_width;
        p.height = cfg.image_height;
        p.frame_rate = cfg.frame_rate;
        p.start_time = offset / cfg.frame_rate;
        return p;
    }
};

}  // namespace detail

/// Generate a full synthetic scene: smooth walkers, orbiting cameras,
/// noisy projected detections and exact ground truth. Deterministic for a
/// fixed seed regardless of thread count (per-camera substreams).
inline Scene generate_scene(const SimConfig& config) {
    config.validate();
    Scene scene;
    scene.config = config;
    Rng root_rng(config.seed);

    std::vector<int> offsets = config.offsets;
    if (offsets.empty()) offsets.assign(config.n_cameras, 0);

    const int frames = config.frames();
    const int min_off = *std::min_element(offsets.begin(), offsets.end());
    const int max_off = *std::max_element(offsets.begin(), offsets.end());
    const int tick_begin = min_off;
    const int tick_end = frames - 1 + max_off;  // inclusive

    // People: dimensions, trajectories, ground-truth tracks.
    std::vector<BodyDims> dims(config.n_people);
    std::vector<RootTrajectory> trajs;
    trajs.reserve(config.n_people);
    scene.gt.tracks.resize(config.n_people);
    scene.gt.limbs.resize(config.n_people);
    for (int p = 0; p < config.n_people; ++p) {
        Rng prng = root_rng.substream(2000 + p);
        dims[p] = BodyDims::sample(prng);
        trajs.push_back(RootTrajectory::generate(prng, tick_begin / config.frame_rate,
                                                 (tick_end + 1) / config.frame_rate,
                                                 config.arena_radius));
        auto& track = scene.gt.tracks[p];
        track.person_id = p;
        track.first_tick = tick_begin;
        track.joints.reserve(tick_end - tick_begin + 1);
        for (int tick = tick_begin; tick <= tick_end; ++tick)
            track.joints.push_back(body_pose(dims[p], trajs[p].at(tick / config.frame_rate)));
        scene.gt.limbs[p] = limb_lengths(track.joints.front());
    }
    scene.gt.offsets = offsets;
    scene.gt.tick_rate = config.frame_rate;

    // Descriptor model: identity bases in the signal subspace, view-dependent
    // nuisance in the complement, one global random rotation over everything.
    Rng drng = root_rng.substream(1);
    const int dim = config.descriptor_dim;
    const int sig_dim = dim - config.nuisance_dim;
    auto bases_sub = detail::identity_bases(config.n_people, sig_dim, config.identity_separation, drng);
    for (auto [a, b] : config.confusion_pairs)
        bases_sub[b] = detail::rotate_toward(bases_sub[a], drng.unit_vector(sig_dim), 0.05);

    Eigen::MatrixXd gauss(dim, dim);
    for (int c = 0; c < dim; ++c) gauss.col(c) = drng.gaussian_vector(dim);
    const Eigen::MatrixXd rot = Eigen::HouseholderQR<Eigen::MatrixXd>(gauss).householderQ();

    std::vector<Eigen::VectorXd> bases(config.n_people);
    for (int p = 0; p < config.n_people; ++p) {
        Eigen::VectorXd full = Eigen::VectorXd::Zero(dim);
        full.head(sig_dim) = bases_sub[p];
        bases[p] = rot * full;
    }

    // Camera rigs.
    std::vector<detail::CameraRig> rigs(config.n_cameras);
    for (int c = 0; c < config.n_cameras; ++c) {
        Rng crng = root_rng.substream(3000 + c);
        auto& rig = rigs[c];
        rig.radius = crng.uniform(7.5, 10.5);
        rig.height = crng.uniform(1.7, 3.2);
        rig.phi0 = 2.0 * M_PI * c / config.n_cameras + crng.uniform(-0.2, 0.2);
        rig.omega = crng.uniform(-0.06, 0.06);
        rig.focal = config.image_width * crng.uniform(0.52, 0.62);
        rig.target_drift = {crng.uniform(0.2, 0.8), crng.uniform(0.2, 0.8)};
        rig.drift_period = crng.uniform(15.0, 30.0);
    }

    scene.poses.resize(config.n_cameras);
    std::vector<std::vector<Detection>> per_camera(config.n_cameras);

    parallel_for(config.n_cameras, [&](std::size_t ci) {
        const int c = static_cast<int>(ci);
        Rng cam_rng = root_rng.substream(1000 + c);
        auto& poses = scene.poses[c];
        poses.reserve(frames);
        for (int f = 0; f < frames; ++f) poses.push_back(rigs[c].pose_at(c, f, config, offsets[c]));

        for (int f = 0; f < frames; ++f) {
            const int tick = f + offsets[c];
            const auto& pose = poses[f];
            const Eigen::Vector3d cam_center = pose.center();

            // Torso segments of everyone at this tick, for occlusion tests.
            std::vector<std::pair<Eigen::Vector3d, Eigen::Vector3d>> torsos(config.n_people);
            for (int p = 0; p < config.n_people; ++p) {
                const auto& j = scene.gt.tracks[p].at_tick(tick);
                torsos[p] = {j[kNeck], 0.5 * (j[kRHip] + j[kLHip])};
            }

            for (int p = 0; p < config.n_people; ++p) {
                if (cam_rng.uniform() < config.detection_drop_rate) continue;
                const auto& joints = scene.gt.tracks[p].at_tick(tick);
                Detection det;
                det.camera_id = c;
                det.frame = f;
                det.gt_identity = p;
                int visible = 0;
                for (int jn = 0; jn < kNumJoints; ++jn) {
                    Eigen::Vector2d px;
                    if (!geom::try_project(pose, joints[jn], px) || !geom::in_image(pose, px))
                        continue;
                    bool occluded = false;
                    const double joint_dist = (joints[jn] - cam_center).norm();
                    for (int q = 0; q < config.n_people && !occluded; ++q) {
                        if (q == p) continue;
                        // Coarse reject on the infinite ray before the exact test.
                        const Eigen::Vector3d mid = 0.5 * (torsos[q].first + torsos[q].second);
                        const Eigen::Vector3d dir = (joints[jn] - cam_center) / joint_dist;
                        const double along = (mid - cam_center).dot(dir);
                        if (along <= 0.0 || along >= joint_dist + 0.5) continue;
                        if ((mid - cam_center - along * dir).norm() > 0.75) continue;
                        double s = 0.0;
                        const double dist = geom::segment_segment_distance(
                            cam_center, joints[jn], torsos[q].first, torsos[q].second, &s);
                        occluded = dist < 0.15 && s > 1e-6 && s < 0.999;
                    }
                    if (occluded) continue;
                    if (config.occlusion_rate > 0.0 && cam_rng.uniform() < config.occlusion_rate)
                        continue;
                    if (config.keypoint_noise_px > 0.0) {
                        px.x() += cam_rng.normal(0.0, config.keypoint_noise_px);
                        px.y() += cam_rng.normal(0.0, config.keypoint_noise_px);
                    }
                    det.keypoints[jn] = {px, 1.0};
                    ++visible;
                }
                if (visible == 0) continue;
                det.recompute_bbox();

                Eigen::VectorXd desc = bases[p];
                if (config.nuisance_dim > 0 && config.nuisance_gain > 0.0) {
                    const auto& j = joints;
                    const Eigen::Vector3d head_fwd = (j[kNose] - j[kNeck]);
                    const double heading = std::atan2(head_fwd.y(), head_fwd.x());
                    const Eigen::Vector3d rel = cam_center - 0.5 * (torsos[p].first + torsos[p].second);
                    const double bearing = std::atan2(rel.y(), rel.x()) - heading;
                    Eigen::VectorXd nu = Eigen::VectorXd::Zero(dim);
                    for (int k = 0; k < config.nuisance_dim; ++k) {
                        const int harmonic = k / 2 + 1;
                        nu[sig_dim + k] = (k % 2 == 0) ? std::cos(harmonic * bearing)
                                                       : std::sin(harmonic * bearing);
                    }
                    nu.normalize();
                    desc = (bases[p] + config.nuisance_gain * (rot * nu).eval()).normalized();
                }
                if (config.descriptor_noise > 0.0) {
                    const double angle = cam_rng.normal(0.0, config.descriptor_noise);
                    desc = detail::rotate_toward(desc, cam_rng.unit_vector(dim), angle);
                }
                det.descriptor = desc;
                per_camera[c].push_back(std::move(det));
            }
        }
    });

    for (int c = 0; c < config.n_cameras; ++c)
        for (auto& det : per_camera[c]) {
            det.id = static_cast<int>(scene.detections.size());
            scene.detections.push_back(std::move(det));
        }
    return scene;
}

}  // namespace mva::sim
