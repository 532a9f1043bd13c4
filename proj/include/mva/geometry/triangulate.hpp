#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mva/geometry/camera.hpp"
#include "mva/rng.hpp"

namespace mva::geom {

MVA_DEFINE_ERROR(InsufficientViews);
MVA_DEFINE_ERROR(NoConsensus);

using Observation = std::pair<CameraPose, Keypoint2D>;

/// Linear (DLT) triangulation from any number of views. Rows are the usual
/// cross-product constraints of x = P X in homogeneous form.
inline Eigen::Vector3d triangulate_linear(const std::vector<const CameraPose*>& poses,
                                          const std::vector<Eigen::Vector2d>& pixels) {
    const int n = static_cast<int>(poses.size());
    Eigen::MatrixXd a(2 * n, 4);
    for (int i = 0; i < n; ++i) {
        const Eigen::Matrix<double, 3, 4> p = poses[i]->projection_matrix();
        a.row(2 * i) = pixels[i].x() * p.row(2) - p.row(0);
        a.row(2 * i + 1) = pixels[i].y() * p.row(2) - p.row(1);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    const Eigen::Vector4d x = svd.matrixV().col(3);
    return x.head<3>() / x(3);
}

struct TriangulationResult {
    Eigen::Vector3d point = Eigen::Vector3d::Zero();
    std::vector<bool> inliers;  // parallel to the observation list
    int inlier_count = 0;
    double total_inlier_error_px = 0.0;
};

namespace detail {

inline double reprojection_error(const CameraPose& pose, const Keypoint2D& kp,
                                 const Eigen::Vector3d& point) {
    Eigen::Vector2d px;
    if (!try_project(pose, point, px)) return std::numeric_limits<double>::infinity();
    return (px - kp.position).norm();
}

}  // namespace detail

/// RANSAC triangulation. Hypotheses are two-view DLT solutions; the number of
/// iterations is min(#pairs, 200) and pairs are visited in a seeded random
/// order so a fixed seed gives bit-identical output. The winning hypothesis
/// (most inliers, ties by lower total inlier reprojection error) is refined
/// by linear least squares over its inliers. An observation is an inlier iff
/// its reprojection error is below inlier_px.
inline TriangulationResult triangulate_ransac(const std::vector<Observation>& observations,
                                              double inlier_px, int min_views, Rng& rng) {
    std::vector<int> usable;
    for (int i = 0; i < static_cast<int>(observations.size()); ++i)
        if (observations[i].second.confidence > 0.0) usable.push_back(i);
    if (static_cast<int>(usable.size()) < 2)
        throw InsufficientViews("need 2 visible observations, have " +
                                std::to_string(usable.size()));

    std::vector<std::pair<int, int>> pairs;
    for (std::size_t a = 0; a < usable.size(); ++a)
        for (std::size_t b = a + 1; b < usable.size(); ++b)
            pairs.emplace_back(usable[a], usable[b]);
    rng.shuffle(pairs);
    const std::size_t iterations = std::min<std::size_t>(pairs.size(), 200);

    TriangulationResult best;
    best.inlier_count = -1;
    for (std::size_t it = 0; it < iterations; ++it) {
        const auto [ia, ib] = pairs[it];
        const Eigen::Vector3d hyp = triangulate_linear(
            {&observations[ia].first, &observations[ib].first},
            {observations[ia].second.position, observations[ib].second.position});

        int count = 0;
        double err = 0.0;
        std::vector<bool> mask(observations.size(), false);
        for (int i : usable) {
            const double e =
                detail::reprojection_error(observations[i].first, observations[i].second, hyp);
            if (e < inlier_px) {
                mask[i] = true;
                ++count;
                err += e;
            }
        }
        if (count > best.inlier_count ||
            (count == best.inlier_count && err < best.total_inlier_error_px)) {
            best.point = hyp;
            best.inliers = std::move(mask);
            best.inlier_count = count;
            best.total_inlier_error_px = err;
        }
    }

    if (best.inlier_count < min_views)
        throw NoConsensus("best hypothesis has " + std::to_string(best.inlier_count) +
                          " inliers, need " + std::to_string(min_views));

    // Refine over the consensus set, then recompute the inlier stats.
    std::vector<const CameraPose*> poses;
    std::vector<Eigen::Vector2d> pixels;
    for (std::size_t i = 0; i < observations.size(); ++i) {
        if (!best.inliers[i]) continue;
        poses.push_back(&observations[i].first);
        pixels.push_back(observations[i].second.position);
    }
    const Eigen::Vector3d refined = triangulate_linear(poses, pixels);

    TriangulationResult out;
    out.point = refined;
    out.inliers.assign(observations.size(), false);
    for (int i : usable) {
        const double e =
            detail::reprojection_error(observations[i].first, observations[i].second, refined);
        if (e < inlier_px) {
            out.inliers[i] = true;
            ++out.inlier_count;
            out.total_inlier_error_px += e;
        }
    }
    if (out.inlier_count < min_views)
        throw NoConsensus("refinement dropped below " + std::to_string(min_views) + " inliers");
    return out;
}

}  // namespace mva::geom
