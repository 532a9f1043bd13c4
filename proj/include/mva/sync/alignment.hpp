#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "mva/common.hpp"
#include "mva/detection.hpp"
#include "mva/geometry/epipolar.hpp"
#include "mva/tracklets/tracklets.hpp"

namespace mva::sync {

MVA_DEFINE_ERROR(NoCandidates);

using DescriptorSet = std::vector<Eigen::VectorXd>;

inline DescriptorSet raw_descriptors(const std::vector<Detection>& detections) {
    DescriptorSet out(detections.size());
    for (std::size_t i = 0; i < detections.size(); ++i) out[i] = detections[i].descriptor;
    return out;
}

struct CandidateParams {
    double median_sim_floor = 0.5;
    double ratio_test = 0.7;
    int sample_per_tracklet = 32;  // cap for the median computation
    int min_tracklet_len = 3;
    int max_frame_gap = -1;  // skip pairs further apart in time; -1 disables
};

struct CandidatePair {
    int tracklet_i = -1;  // global tracklet indices
    int tracklet_j = -1;
    double median_similarity = 0.0;
};

namespace detail {

inline std::vector<int> sample_ids(const Tracklet& t, int cap) {
    const int n = t.length();
    if (n <= cap) return t.detection_ids;
    std::vector<int> out;
    out.reserve(cap);
    for (int k = 0; k < cap; ++k)
        out.push_back(t.detection_ids[static_cast<std::size_t>(k) * (n - 1) / (cap - 1)]);
    return out;
}

inline double median_cross_similarity(const Tracklet& a, const Tracklet& b,
                                      const DescriptorSet& desc, int cap) {
    const auto ia = sample_ids(a, cap);
    const auto ib = sample_ids(b, cap);
    std::vector<double> sims;
    sims.reserve(ia.size() * ib.size());
    for (int da : ia)
        for (int db : ib) sims.push_back(desc[da].dot(desc[db]));
    std::sort(sims.begin(), sims.end());
    const std::size_t n = sims.size();
    return n % 2 == 1 ? sims[n / 2] : 0.5 * (sims[n / 2 - 1] + sims[n / 2]);
}

}  // namespace detail

/// Candidate cross-view tracklet pairs: median descriptor similarity at or
/// above the floor, added per anchor tracklet in descending similarity while
/// the ratio to the best candidate stays at or above the ratio threshold.
/// Indices in the result refer to the full tracklet list.
inline std::vector<CandidatePair> candidate_matches(const std::vector<int>& tracklets_i,
                                                    const std::vector<int>& tracklets_j,
                                                    const std::vector<Tracklet>& tracklets,
                                                    const DescriptorSet& descriptors,
                                                    const CandidateParams& params = {}) {
    std::vector<CandidatePair> out;
    for (int ti : tracklets_i) {
        const Tracklet& a = tracklets[ti];
        if (a.length() < params.min_tracklet_len) continue;
        std::vector<CandidatePair> row;
        for (int tj : tracklets_j) {
            const Tracklet& b = tracklets[tj];
            if (b.length() < params.min_tracklet_len) continue;
            if (params.max_frame_gap >= 0) {
                const int gap = std::max(a.first_frame, b.first_frame) -
                                std::min(a.last_frame(), b.last_frame());
                if (gap > params.max_frame_gap) continue;
            }
            const double med =
                detail::median_cross_similarity(a, b, descriptors, params.sample_per_tracklet);
            if (med >= params.median_sim_floor) row.push_back({ti, tj, med});
        }
        std::sort(row.begin(), row.end(), [](const CandidatePair& x, const CandidatePair& y) {
            if (x.median_similarity != y.median_similarity)
                return x.median_similarity > y.median_similarity;
            return x.tracklet_j < y.tracklet_j;
        });
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (k > 0 && row[k].median_similarity < params.ratio_test * row[0].median_similarity)
                break;
            out.push_back(row[k]);
        }
    }
    return out;
}

struct TrackletMatch {
    int camera_i = -1, camera_j = -1;
    int tracklet_i = -1, tracklet_j = -1;  // global indices
    int offset = 0;
    double median_similarity = 0.0;
    long long inlier_count = 0;
    long long evaluated = 0;
    bool consistent = true;
};

struct PairAlignment {
    int camera_i = -1, camera_j = -1;
    int offset = 0;  // frame t in camera_i corresponds to t + offset in camera_j
    bool ambiguous = false;
    bool accepted = false;
    long long best_inliers = 0;
    long long second_best_inliers = 0;
    double best_inlier_distance = 0.0;
    std::vector<TrackletMatch> matches;  // one-to-one after greedy selection
};

struct AlignmentParams {
    CandidateParams candidates;
    double inlier_px = 8.0;
    int window = -1;  // scan range is [-window, window]; -1 means 2W with W = 2 * frame_rate
    int frames_per_pair = 64;         // evaluation subsample per tracklet pair per offset
    double match_inlier_fraction = 0.5;
    double ambiguity_margin = 0.01;
    long long min_inliers = 36;  // acceptance floor for a pair result
};

/// Exhaustive integer-offset scan. For every offset in [-2W, 2W] the
/// keypoint correspondences of all candidate tracklet pairs are scored by
/// bidirectional epipolar distance; the offset with the most inliers wins,
/// ties broken by summed inlier distance, then by smaller |offset|. Offsets
/// within the ambiguity margin of the winner flag the result ambiguous.
inline PairAlignment ransac_offset(const std::vector<CandidatePair>& candidates,
                                   const std::vector<Tracklet>& tracklets,
                                   const std::vector<Detection>& detections,
                                   const std::vector<std::vector<geom::CameraPose>>& poses,
                                   const AlignmentParams& params = {}) {
    if (candidates.empty()) throw NoCandidates("no candidate tracklet pairs");
    PairAlignment out;
    out.camera_i = tracklets[candidates.front().tracklet_i].camera_id;
    out.camera_j = tracklets[candidates.front().tracklet_j].camera_id;

    const auto& poses_i = poses[out.camera_i];
    const auto& poses_j = poses[out.camera_j];
    const int window =
        params.window >= 0 ? params.window : static_cast<int>(4 * poses_i.front().frame_rate);

    // Offsets in |w| order so exact ties resolve to the smallest offset.
    std::vector<int> offsets_to_try;
    offsets_to_try.push_back(0);
    for (int w = 1; w <= window; ++w) {
        offsets_to_try.push_back(w);
        offsets_to_try.push_back(-w);
    }

    struct Score {
        long long inliers = 0;
        double distance = 0.0;
    };
    std::vector<Score> per_candidate(candidates.size());
    std::vector<Score> best_per_candidate(candidates.size());
    std::vector<Eigen::Matrix3d> fmat(poses_i.size());
    std::vector<unsigned char> fmat_ready(poses_i.size());

    // Exactly min(span, cap) evenly spaced frames: the sample count per
    // candidate barely varies with the offset, keeping raw inlier counts
    // comparable across offsets.
    auto sampled_frames = [&](const Tracklet& a, const Tracklet& b, int w, std::vector<int>& out) {
        out.clear();
        const int t_lo = std::max(a.first_frame, b.first_frame - w);
        const int t_hi = std::min(a.last_frame(), b.last_frame() - w);
        if (t_lo > t_hi) return;
        const int span = t_hi - t_lo + 1;
        const int cap = params.frames_per_pair;
        if (span <= cap) {
            for (int t = t_lo; t <= t_hi; ++t) out.push_back(t);
        } else {
            for (int k = 0; k < cap; ++k)
                out.push_back(t_lo + static_cast<int>(static_cast<long long>(k) * (span - 1) /
                                                      (cap - 1)));
        }
    };

    long long best = -1, second = -1;
    double best_dist = 0.0;
    int best_w = 0;
    std::vector<int> frames;
    for (int w : offsets_to_try) {
        std::fill(fmat_ready.begin(), fmat_ready.end(), 0);
        long long inliers = 0;
        double dist_sum = 0.0;
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            per_candidate[c] = {};
            const Tracklet& a = tracklets[candidates[c].tracklet_i];
            const Tracklet& b = tracklets[candidates[c].tracklet_j];
            sampled_frames(a, b, w, frames);
            for (int t : frames) {
                if (!fmat_ready[t]) {
                    fmat[t] = geom::fundamental(poses_i[t], poses_j[t + w]);
                    fmat_ready[t] = 1;
                }
                const Detection& da = detections[a.detection_at(t)];
                const Detection& db = detections[b.detection_at(t + w)];
                for (int p = 0; p < kNumJoints; ++p) {
                    if (!da.keypoints[p].visible() || !db.keypoints[p].visible()) continue;
                    const double d = geom::epipolar_distance(da.keypoints[p].position,
                                                             db.keypoints[p].position, fmat[t]);
                    if (d < params.inlier_px) {
                        ++per_candidate[c].inliers;
                        per_candidate[c].distance += d;
                    }
                }
            }
            inliers += per_candidate[c].inliers;
            dist_sum += per_candidate[c].distance;
        }
        if (inliers > best || (inliers == best && dist_sum < best_dist)) {
            second = best;
            best = inliers;
            best_dist = dist_sum;
            best_w = w;
            best_per_candidate = per_candidate;
        } else if (inliers > second) {
            second = inliers;
        }
    }

    out.offset = best_w;
    out.best_inliers = best;
    out.second_best_inliers = std::max<long long>(second, 0);
    out.best_inlier_distance = best_dist;
    out.ambiguous =
        second >= 0 && best > 0 &&
        static_cast<double>(second) >= (1.0 - params.ambiguity_margin) * static_cast<double>(best);

    // Per-candidate evaluation at the winning offset, then greedy one-to-one
    // selection of geometrically consistent matches.
    struct Scored {
        std::size_t idx;
        long long inliers;
        long long evaluated;
    };
    std::vector<Scored> scored;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        const Tracklet& a = tracklets[candidates[c].tracklet_i];
        const Tracklet& b = tracklets[candidates[c].tracklet_j];
        long long evaluated = 0;
        sampled_frames(a, b, best_w, frames);
        for (int t : frames) {
            const Detection& da = detections[a.detection_at(t)];
            const Detection& db = detections[b.detection_at(t + best_w)];
            for (int p = 0; p < kNumJoints; ++p)
                if (da.keypoints[p].visible() && db.keypoints[p].visible()) ++evaluated;
        }
        if (evaluated == 0) continue;
        if (static_cast<double>(best_per_candidate[c].inliers) <
            params.match_inlier_fraction * static_cast<double>(evaluated))
            continue;
        scored.push_back({c, best_per_candidate[c].inliers, evaluated});
    }
    std::sort(scored.begin(), scored.end(), [&](const Scored& x, const Scored& y) {
        if (x.inliers != y.inliers) return x.inliers > y.inliers;
        const double mx = candidates[x.idx].median_similarity;
        const double my = candidates[y.idx].median_similarity;
        if (mx != my) return mx > my;
        return x.idx < y.idx;
    });
    std::set<int> used_i, used_j;
    for (const auto& s : scored) {
        const auto& cand = candidates[s.idx];
        if (used_i.count(cand.tracklet_i) || used_j.count(cand.tracklet_j)) continue;
        used_i.insert(cand.tracklet_i);
        used_j.insert(cand.tracklet_j);
        TrackletMatch m;
        m.camera_i = out.camera_i;
        m.camera_j = out.camera_j;
        m.tracklet_i = cand.tracklet_i;
        m.tracklet_j = cand.tracklet_j;
        m.offset = best_w;
        m.median_similarity = cand.median_similarity;
        m.inlier_count = s.inliers;
        m.evaluated = s.evaluated;
        out.matches.push_back(m);
    }
    out.accepted = !out.ambiguous && out.best_inliers >= params.min_inliers &&
                   !out.matches.empty();
    return out;
}

struct AlignmentResult {
    int n_cameras = 0;
    std::vector<PairAlignment> pairs;  // camera_i < camera_j
    std::vector<std::array<int, 3>> offset_violations;  // camera triples
    std::vector<TrackletMatch> pruned;

    const PairAlignment* pair(int i, int j) const {
        for (const auto& p : pairs)
            if ((p.camera_i == i && p.camera_j == j) || (p.camera_i == j && p.camera_j == i))
                return &p;
        return nullptr;
    }

    // Antisymmetric offset view: w(i,j) = -w(j,i) by construction.
    std::optional<int> offset(int i, int j) const {
        const PairAlignment* p = pair(i, j);
        if (!p || !p->accepted) return std::nullopt;
        return p->camera_i == i ? p->offset : -p->offset;
    }

    /// Per-camera offsets composed over a spanning tree of accepted pairs,
    /// rooted at the lowest-numbered camera with any result.
    std::vector<std::optional<int>> camera_offsets() const {
        std::vector<std::optional<int>> off(n_cameras);
        for (int root = 0; root < n_cameras; ++root) {
            if (off[root]) continue;
            bool has_pair = false;
            for (const auto& p : pairs)
                if (p.accepted && (p.camera_i == root || p.camera_j == root)) has_pair = true;
            if (!has_pair) continue;
            off[root] = 0;
            std::vector<int> queue = {root};
            while (!queue.empty()) {
                const int i = queue.back();
                queue.pop_back();
                for (int j = 0; j < n_cameras; ++j) {
                    if (off[j]) continue;
                    const auto w = offset(i, j);
                    if (!w) continue;
                    // tick(cam i, t) = t + off_i and frame t in i matches
                    // frame t + w in j, so off_j = off_i - w.
                    off[j] = *off[i] - *w;
                    queue.push_back(j);
                }
            }
        }
        return off;
    }
};

/// Cycle-consistency pruning. Offsets must close over camera triples within
/// one frame; identity chains i->j->k must agree with directly observed
/// matches. Violating matches are marked inconsistent and moved to the
/// pruned list, worst offender first.
inline void cycle_prune(AlignmentResult& result) {
    // Offset closure: flag the weakest pair of every violating triple.
    for (int a = 0; a < result.n_cameras; ++a)
        for (int b = a + 1; b < result.n_cameras; ++b)
            for (int c = b + 1; c < result.n_cameras; ++c) {
                const auto wab = result.offset(a, b);
                const auto wbc = result.offset(b, c);
                const auto wac = result.offset(a, c);
                if (!wab || !wbc || !wac) continue;
                if (std::abs(*wab + *wbc - *wac) <= 1) continue;
                result.offset_violations.push_back({a, b, c});
                PairAlignment* weakest = nullptr;
                for (auto [i, j] : {std::pair{a, b}, {b, c}, {a, c}}) {
                    auto* p = const_cast<PairAlignment*>(result.pair(i, j));
                    if (!weakest || p->best_inliers < weakest->best_inliers) weakest = p;
                }
                weakest->accepted = false;
                for (auto& m : weakest->matches)
                    if (m.consistent) {
                        m.consistent = false;
                        result.pruned.push_back(m);
                    }
            }

    // Identity cycles among surviving matches.
    struct Ref {
        PairAlignment* pair;
        std::size_t idx;
        TrackletMatch* match() const { return &pair->matches[idx]; }
    };
    auto live_matches = [&]() {
        std::vector<Ref> refs;
        for (auto& p : result.pairs) {
            if (!p.accepted) continue;
            for (std::size_t k = 0; k < p.matches.size(); ++k)
                if (p.matches[k].consistent) refs.push_back({&p, k});
        }
        return refs;
    };

    while (true) {
        const auto refs = live_matches();
        // Directed lookup: (camera pair) -> tracklet_i -> tracklet_j.
        std::map<std::pair<int, int>, std::map<int, std::size_t>> fwd, bwd;
        for (std::size_t r = 0; r < refs.size(); ++r) {
            const auto* m = refs[r].match();
            fwd[{m->camera_i, m->camera_j}][m->tracklet_i] = r;
            bwd[{m->camera_i, m->camera_j}][m->tracklet_j] = r;
        }
        auto find = [&](int cam_a, int cam_b, int tracklet_a) -> std::optional<std::size_t> {
            if (auto it = fwd.find({cam_a, cam_b}); it != fwd.end())
                if (auto jt = it->second.find(tracklet_a); jt != it->second.end())
                    return jt->second;
            if (auto it = bwd.find({cam_b, cam_a}); it != bwd.end())
                if (auto jt = it->second.find(tracklet_a); jt != it->second.end())
                    return jt->second;
            return std::nullopt;
        };
        auto other_end = [&](std::size_t r, int tracklet_from) {
            const auto* m = refs[r].match();
            return m->tracklet_i == tracklet_from ? m->tracklet_j : m->tracklet_i;
        };

        std::vector<int> violations(refs.size(), 0), supports(refs.size(), 0);
        bool any_violation = false;
        for (std::size_t r = 0; r < refs.size(); ++r) {
            const auto* m = refs[r].match();
            for (int cam_b = 0; cam_b < result.n_cameras; ++cam_b) {
                if (cam_b == m->camera_i || cam_b == m->camera_j) continue;
                const auto leg1 = find(m->camera_i, cam_b, m->tracklet_i);
                if (!leg1) continue;
                const int mid = other_end(*leg1, m->tracklet_i);
                const auto leg2 = find(cam_b, m->camera_j, mid);
                if (!leg2) continue;
                const int implied = other_end(*leg2, mid);
                if (implied == m->tracklet_j) {
                    ++supports[r];
                    // legs get their support when visited as the direct match
                } else {
                    ++violations[r];
                    ++violations[*leg1];
                    ++violations[*leg2];
                    any_violation = true;
                }
            }
        }
        if (!any_violation) break;

        std::size_t victim = 0;
        auto better_victim = [&](std::size_t x, std::size_t y) {
            const int sx = violations[x] - supports[x], sy = violations[y] - supports[y];
            if (sx != sy) return sx > sy;
            const auto *mx = refs[x].match(), *my = refs[y].match();
            if (mx->inlier_count != my->inlier_count) return mx->inlier_count < my->inlier_count;
            return std::tie(mx->camera_i, mx->camera_j, mx->tracklet_i, mx->tracklet_j) <
                   std::tie(my->camera_i, my->camera_j, my->tracklet_i, my->tracklet_j);
        };
        for (std::size_t r = 1; r < refs.size(); ++r)
            if (violations[r] > 0 && (violations[victim] == 0 || better_victim(r, victim)))
                victim = r;
        refs[victim].match()->consistent = false;
        result.pruned.push_back(*refs[victim].match());
    }
}

/// Run candidate matching and offset recovery for every camera pair, then
/// cycle-prune. Camera pairs are processed independently (parallelizable);
/// the prune is a single reduction.
inline AlignmentResult align_all(const std::vector<Tracklet>& tracklets,
                                 const std::vector<Detection>& detections,
                                 const DescriptorSet& descriptors,
                                 const std::vector<std::vector<geom::CameraPose>>& poses,
                                 const AlignmentParams& params = {}) {
    AlignmentResult result;
    result.n_cameras = static_cast<int>(poses.size());

    std::map<int, std::vector<int>> by_camera;
    for (std::size_t t = 0; t < tracklets.size(); ++t)
        by_camera[tracklets[t].camera_id].push_back(static_cast<int>(t));

    std::vector<std::pair<int, int>> cam_pairs;
    for (auto it = by_camera.begin(); it != by_camera.end(); ++it)
        for (auto jt = std::next(it); jt != by_camera.end(); ++jt)
            cam_pairs.emplace_back(it->first, jt->first);

    std::vector<std::optional<PairAlignment>> slots(cam_pairs.size());
    AlignmentParams pair_params = params;
    if (pair_params.candidates.max_frame_gap < 0) {
        const int window = params.window >= 0
                               ? params.window
                               : static_cast<int>(4 * poses.front().front().frame_rate);
        pair_params.candidates.max_frame_gap = window;
    }
    parallel_for(cam_pairs.size(), [&](std::size_t k) {
        const auto [ci, cj] = cam_pairs[k];
        const auto candidates = candidate_matches(by_camera.at(ci), by_camera.at(cj), tracklets,
                                                  descriptors, pair_params.candidates);
        if (candidates.empty()) return;
        slots[k] = ransac_offset(candidates, tracklets, detections, poses, pair_params);
    });
    for (auto& s : slots)
        if (s) result.pairs.push_back(std::move(*s));
    cycle_prune(result);
    return result;
}

}  // namespace mva::sync
