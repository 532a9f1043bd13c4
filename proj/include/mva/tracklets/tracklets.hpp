#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "mva/common.hpp"
#include "mva/detection.hpp"
#include "mva/tracklets/hungarian.hpp"

namespace mva {

MVA_DEFINE_ERROR(MissingLabels);

/// A conservative single-camera run of detections assumed to be one person.
/// Frames are strictly consecutive (gap 0).
struct Tracklet {
    int camera_id = 0;
    std::vector<int> detection_ids;
    int first_frame = 0;

    int length() const { return static_cast<int>(detection_ids.size()); }
    int last_frame() const { return first_frame + length() - 1; }
    bool contains_frame(int f) const { return f >= first_frame && f <= last_frame(); }
    int detection_at(int frame) const { return detection_ids[frame - first_frame]; }
    bool overlaps(const Tracklet& other) const {
        return first_frame <= other.last_frame() && other.first_frame <= last_frame();
    }
};

struct TrackletParams {
    double sim_floor = 0.5;
    double max_px_step = 120.0;  // image_width / 16 at 1920
};

/// Greedy frame-to-frame linking: one-to-one Hungarian matching on descriptor
/// cosine similarity, gated by a similarity floor and a centroid displacement
/// cap, with a split whenever the instantaneous centroid velocity exceeds 3x
/// the tracklet's running average. Unmatched detections start new tracklets.
inline std::vector<Tracklet> build_tracklets(const std::vector<Detection>& detections,
                                             const TrackletParams& params = {}) {
    struct Active {
        Tracklet t;
        Eigen::Vector2d last_centroid;
        double mean_velocity = 0.0;
        int steps = 0;
    };

    // Group detection indices per camera per frame, preserving input order.
    // Detection ids double as indices into the detection list everywhere in
    // the pipeline; enforce that here since tracklets store ids.
    std::map<int, std::map<int, std::vector<int>>> by_camera;
    for (std::size_t i = 0; i < detections.size(); ++i) {
        if (detections[i].id != static_cast<int>(i))
            throw Error("detection ids must equal their index in the list");
        by_camera[detections[i].camera_id][detections[i].frame].push_back(static_cast<int>(i));
    }

    std::vector<Tracklet> out;
    for (auto& [cam, frames] : by_camera) {
        std::vector<Active> active;
        int prev_frame = 0;
        bool first = true;
        for (auto& [frame, idxs] : frames) {
            std::vector<Active> next_active;
            std::vector<bool> taken(idxs.size(), false);

            if (!first && frame == prev_frame + 1 && !active.empty()) {
                Eigen::MatrixXd cost(active.size(), idxs.size());
                for (std::size_t r = 0; r < active.size(); ++r) {
                    const Detection& last =
                        detections[active[r].t.detection_ids.back()];
                    for (std::size_t c = 0; c < idxs.size(); ++c) {
                        const Detection& cand = detections[idxs[c]];
                        const double sim = last.descriptor.dot(cand.descriptor);
                        const double step =
                            (active[r].last_centroid - cand.centroid()).norm();
                        cost(r, c) = (sim >= params.sim_floor && step <= params.max_px_step)
                                         ? -sim
                                         : kForbidden;
                    }
                }
                const auto assignment = solve_assignment(cost);
                for (std::size_t r = 0; r < active.size(); ++r) {
                    const int c = assignment[r];
                    if (c < 0) {
                        out.push_back(std::move(active[r].t));
                        continue;
                    }
                    Active& a = active[r];
                    const Eigen::Vector2d centroid = detections[idxs[c]].centroid();
                    const double velocity = (centroid - a.last_centroid).norm();
                    if (a.steps >= 1 && velocity > 3.0 * a.mean_velocity) {
                        // Split before this frame: close the run, restart fresh.
                        out.push_back(std::move(a.t));
                        Active fresh;
                        fresh.t.camera_id = cam;
                        fresh.t.first_frame = frame;
                        fresh.t.detection_ids = {detections[idxs[c]].id};
                        fresh.last_centroid = centroid;
                        next_active.push_back(std::move(fresh));
                    } else {
                        a.mean_velocity =
                            (a.mean_velocity * a.steps + velocity) / (a.steps + 1);
                        a.steps += 1;
                        a.t.detection_ids.push_back(detections[idxs[c]].id);
                        a.last_centroid = centroid;
                        next_active.push_back(std::move(a));
                    }
                    taken[c] = true;
                }
            } else {
                for (auto& a : active) out.push_back(std::move(a.t));
            }

            for (std::size_t c = 0; c < idxs.size(); ++c) {
                if (taken[c]) continue;
                Active fresh;
                fresh.t.camera_id = cam;
                fresh.t.first_frame = frame;
                fresh.t.detection_ids = {detections[idxs[c]].id};
                fresh.last_centroid = detections[idxs[c]].centroid();
                next_active.push_back(std::move(fresh));
            }
            active = std::move(next_active);
            prev_frame = frame;
            first = false;
        }
        for (auto& a : active) out.push_back(std::move(a.t));
    }

    std::sort(out.begin(), out.end(), [](const Tracklet& a, const Tracklet& b) {
        if (a.camera_id != b.camera_id) return a.camera_id < b.camera_id;
        if (a.first_frame != b.first_frame) return a.first_frame < b.first_frame;
        return a.detection_ids.front() < b.detection_ids.front();
    });
    return out;
}

/// 1 - fraction of tracklets containing two or more ground-truth identities.
inline double tracklet_purity(const std::vector<Tracklet>& tracklets,
                              const std::vector<Detection>& detections) {
    if (tracklets.empty()) return 1.0;
    int mixed = 0;
    for (const auto& t : tracklets) {
        std::set<int> ids;
        for (int d : t.detection_ids) {
            if (!detections[d].gt_identity) throw MissingLabels("detection " + std::to_string(d));
            ids.insert(*detections[d].gt_identity);
        }
        if (ids.size() >= 2) ++mixed;
    }
    return 1.0 - static_cast<double>(mixed) / static_cast<double>(tracklets.size());
}

/// Reverse index: detection id -> tracklet index (-1 when unknown).
inline std::vector<int> tracklet_of_detection(const std::vector<Tracklet>& tracklets,
                                              std::size_t n_detections) {
    std::vector<int> idx(n_detections, -1);
    for (std::size_t t = 0; t < tracklets.size(); ++t)
        for (int d : tracklets[t].detection_ids) idx[d] = static_cast<int>(t);
    return idx;
}

}  // namespace mva
