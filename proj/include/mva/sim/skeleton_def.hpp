#pragma once

#include <array>
#include <utility>

namespace mva {

// COCO-18 joint order.
enum Joint : int {
    kNose = 0,
    kNeck = 1,
    kRShoulder = 2,
    kRElbow = 3,
    kRWrist = 4,
    kLShoulder = 5,
    kLElbow = 6,
    kLWrist = 7,
    kRHip = 8,
    kRKnee = 9,
    kRAnkle = 10,
    kLHip = 11,
    kLKnee = 12,
    kLAnkle = 13,
    kREye = 14,
    kLEye = 15,
    kREar = 16,
    kLEar = 17,
};

inline constexpr int kNumJoints = 18;

// Keypoint connectivity set: 17 limb edges.
inline constexpr std::array<std::pair<int, int>, 17> kLimbEdges = {{
    {kNeck, kRShoulder},
    {kRShoulder, kRElbow},
    {kRElbow, kRWrist},
    {kNeck, kLShoulder},
    {kLShoulder, kLElbow},
    {kLElbow, kLWrist},
    {kNeck, kRHip},
    {kRHip, kRKnee},
    {kRKnee, kRAnkle},
    {kNeck, kLHip},
    {kLHip, kLKnee},
    {kLKnee, kLAnkle},
    {kNeck, kNose},
    {kNose, kREye},
    {kREye, kREar},
    {kNose, kLEye},
    {kLEye, kLEar},
}};

inline constexpr int kNumLimbs = 17;

// Corresponding left/right limb pairs, indices into kLimbEdges:
// shoulder links, upper arms, forearms, hip links, thighs, shins.
inline constexpr std::array<std::pair<int, int>, 6> kSymmetryPairs = {{
    {0, 3},
    {1, 4},
    {2, 5},
    {6, 9},
    {7, 10},
    {8, 11},
}};

inline constexpr const char* kJointNames[kNumJoints] = {
    "nose",  "neck",  "r_shoulder", "r_elbow", "r_wrist", "l_shoulder",
    "l_elbow", "l_wrist", "r_hip",   "r_knee",  "r_ankle", "l_hip",
    "l_knee",  "l_ankle", "r_eye",   "l_eye",   "r_ear",   "l_ear",
};

}  // namespace mva
