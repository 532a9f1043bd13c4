#pragma once

#include <array>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "mva/rng.hpp"
#include "mva/sim/skeleton_def.hpp"

namespace mva::sim {

/// Fixed per-person body dimensions in meters. All joints are placed by
/// forward kinematics from these, so every limb length is exactly constant
/// over time and exactly left/right symmetric.
struct BodyDims {
    double pelvis_height = 1.0;
    double torso = 0.50;
    double shoulder_half = 0.19;
    double hip_half = 0.10;
    double upper_arm = 0.28;
    double forearm = 0.25;
    double thigh = 0.42;
    double shin = 0.41;
    double neck_nose = 0.13;
    double nose_eye = 0.06;
    double eye_ear = 0.07;
    double stride = 1.40;

    static BodyDims sample(Rng& rng) {
        BodyDims d;
        d.pelvis_height = rng.normal(1.00, 0.05);
        d.torso = rng.normal(0.50, 0.03);
        d.shoulder_half = rng.normal(0.19, 0.015);
        d.hip_half = rng.normal(0.10, 0.008);
        d.upper_arm = rng.normal(0.28, 0.02);
        d.forearm = rng.normal(0.25, 0.015);
        d.thigh = rng.normal(0.42, 0.025);
        d.shin = rng.normal(0.41, 0.025);
        d.neck_nose = rng.normal(0.13, 0.01);
        d.nose_eye = rng.normal(0.06, 0.004);
        d.eye_ear = rng.normal(0.07, 0.004);
        d.stride = rng.normal(1.40, 0.12);
        return d;
    }
};

/// Root motion as piecewise constant-speed, constant-turn-rate segments;
/// closed-form evaluation keeps the trajectory independent of sampling rate.
class RootTrajectory {
  public:
    struct Segment {
        double t0 = 0.0;
        double duration = 0.0;
        Eigen::Vector2d pos = Eigen::Vector2d::Zero();
        double heading = 0.0;
        double speed = 0.0;
        double turn_rate = 0.0;
        double distance0 = 0.0;  // cumulative path length at t0
    };

    static RootTrajectory generate(Rng& rng, double t_begin, double t_end, double arena_radius) {
        RootTrajectory traj;
        Segment seg;
        seg.t0 = t_begin;
        const double r0 = arena_radius * std::sqrt(rng.uniform());
        const double a0 = rng.uniform(0.0, 2.0 * M_PI);
        seg.pos = {r0 * std::cos(a0), r0 * std::sin(a0)};
        seg.heading = rng.uniform(0.0, 2.0 * M_PI);
        double t = t_begin;
        while (t < t_end) {
            seg.duration = rng.uniform(2.0, 5.0);
            seg.speed = std::clamp(rng.normal(1.1, 0.35), 0.4, 2.2);
            seg.turn_rate = rng.uniform(-0.45, 0.45);
            // Steer back toward the arena center when drifting out.
            if (seg.pos.norm() > arena_radius) {
                const double to_center = std::atan2(-seg.pos.y(), -seg.pos.x());
                double diff = std::remainder(to_center - seg.heading, 2.0 * M_PI);
                seg.turn_rate = std::clamp(diff / seg.duration, -0.6, 0.6);
            }
            traj.segments_.push_back(seg);
            t += seg.duration;
            const State end = eval_segment(seg, seg.duration);
            Segment next;
            next.t0 = t;
            next.pos = end.pos;
            next.heading = end.heading;
            next.distance0 = seg.distance0 + seg.speed * seg.duration;
            seg = next;
        }
        return traj;
    }

    struct State {
        Eigen::Vector2d pos;
        double heading;
        double distance;  // path length traveled since t_begin
    };

    State at(double t) const {
        const Segment* s = &segments_.back();
        for (const auto& seg : segments_)
            if (t < seg.t0 + seg.duration) {
                s = &seg;
                break;
            }
        return eval_segment(*s, std::clamp(t - s->t0, 0.0, s->duration));
    }

  private:
    static State eval_segment(const Segment& s, double tau) {
        State out;
        out.heading = s.heading + s.turn_rate * tau;
        out.distance = s.distance0 + s.speed * tau;
        if (std::abs(s.turn_rate) < 1e-9) {
            out.pos = s.pos + s.speed * tau * Eigen::Vector2d(std::cos(s.heading), std::sin(s.heading));
        } else {
            const double k = s.speed / s.turn_rate;
            out.pos = s.pos + k * Eigen::Vector2d(std::sin(out.heading) - std::sin(s.heading),
                                                  -std::cos(out.heading) + std::cos(s.heading));
        }
        return out;
    }

    std::vector<Segment> segments_;
};

using JointSet = std::array<Eigen::Vector3d, kNumJoints>;

namespace detail {

// Rotate (0,0,-1) about the lateral axis by `angle`, tilting toward
// `forward` for positive angles.
inline Eigen::Vector3d swing_dir(const Eigen::Vector3d& forward, double angle) {
    return std::sin(angle) * forward - std::cos(angle) * Eigen::Vector3d::UnitZ();
}

}  // namespace detail

/// Forward-kinematic walker pose at continuous time t.
inline JointSet body_pose(const BodyDims& d, const RootTrajectory::State& root, double /*t*/ = 0.0) {
    JointSet j;
    const double phase = 2.0 * M_PI * root.distance / d.stride;
    const Eigen::Vector3d fwd(std::cos(root.heading), std::sin(root.heading), 0.0);
    const Eigen::Vector3d left(-std::sin(root.heading), std::cos(root.heading), 0.0);

    const double bob = 0.015 * std::sin(2.0 * phase);
    const Eigen::Vector3d mid_hip(root.pos.x(), root.pos.y(), d.pelvis_height + bob);
    const Eigen::Vector3d neck = mid_hip + Eigen::Vector3d(0, 0, d.torso);

    j[kNeck] = neck;
    j[kRShoulder] = neck - d.shoulder_half * left;
    j[kLShoulder] = neck + d.shoulder_half * left;
    j[kRHip] = mid_hip - d.hip_half * left;
    j[kLHip] = mid_hip + d.hip_half * left;

    const double leg_amp = 0.50, knee_amp = 0.65, arm_amp = 0.45;
    for (int side = 0; side < 2; ++side) {  // 0 = right, 1 = left
        const double ph = phase + (side == 0 ? 0.0 : M_PI);
        const int hip = side == 0 ? kRHip : kLHip;
        const int knee = side == 0 ? kRKnee : kLKnee;
        const int ankle = side == 0 ? kRAnkle : kLAnkle;
        const double hip_swing = leg_amp * std::sin(ph);
        const double knee_bend = knee_amp * 0.5 * (1.0 - std::cos(ph));
        j[knee] = j[hip] + d.thigh * detail::swing_dir(fwd, hip_swing);
        j[ankle] = j[knee] + d.shin * detail::swing_dir(fwd, hip_swing - knee_bend);

        const int shoulder = side == 0 ? kRShoulder : kLShoulder;
        const int elbow = side == 0 ? kRElbow : kLElbow;
        const int wrist = side == 0 ? kRWrist : kLWrist;
        const double arm_swing = arm_amp * std::sin(ph + M_PI);
        const double elbow_bend = 0.35 + 0.25 * 0.5 * (1.0 - std::cos(ph + M_PI));
        j[elbow] = j[shoulder] + d.upper_arm * detail::swing_dir(fwd, arm_swing);
        j[wrist] = j[elbow] + d.forearm * detail::swing_dir(fwd, arm_swing + elbow_bend);
    }

    // Rigid head; directions are fixed in the body frame so all head limb
    // lengths stay constant.
    const Eigen::Vector3d nose_dir = (0.55 * fwd + 0.835 * Eigen::Vector3d::UnitZ()).normalized();
    j[kNose] = neck + d.neck_nose * nose_dir;
    const Eigen::Vector3d up = Eigen::Vector3d::UnitZ();
    const Eigen::Vector3d eye_r = (0.35 * fwd - 0.80 * left + 0.49 * up).normalized();
    const Eigen::Vector3d eye_l = (0.35 * fwd + 0.80 * left + 0.49 * up).normalized();
    j[kREye] = j[kNose] + d.nose_eye * eye_r;
    j[kLEye] = j[kNose] + d.nose_eye * eye_l;
    const Eigen::Vector3d ear_r = (-0.45 * fwd - 0.89 * left).normalized();
    const Eigen::Vector3d ear_l = (-0.45 * fwd + 0.89 * left).normalized();
    j[kREar] = j[kREye] + d.eye_ear * ear_r;
    j[kLEar] = j[kLEye] + d.eye_ear * ear_l;
    return j;
}

inline std::array<double, kNumLimbs> limb_lengths(const JointSet& joints) {
    std::array<double, kNumLimbs> out{};
    for (int q = 0; q < kNumLimbs; ++q)
        out[q] = (joints[kLimbEdges[q].first] - joints[kLimbEdges[q].second]).norm();
    return out;
}

}  // namespace mva::sim
