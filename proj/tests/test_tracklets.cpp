#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "mva/sim/simulator.hpp"
#include "mva/tracklets/hungarian.hpp"
#include "mva/tracklets/tracklets.hpp"

#include "support/fixtures.hpp"

using namespace mva;

namespace {

Detection make_det(int id, int cam, int frame, const Eigen::Vector2d& center,
                   const Eigen::VectorXd& desc, int gt = -1) {
    Detection d;
    d.id = id;
    d.camera_id = cam;
    d.frame = frame;
    for (int j = 0; j < kNumJoints; ++j)
        d.keypoints[j] = {center + Eigen::Vector2d(3.0 * j, 2.0 * j), 1.0};
    d.descriptor = desc;
    d.recompute_bbox();
    if (gt >= 0) d.gt_identity = gt;
    return d;
}

Eigen::VectorXd axis(int dim, int i) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
    v[i] = 1.0;
    return v;
}

}  // namespace

TEST_CASE("hungarian matches brute force on small instances") {
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = rng.uniform_int(2, 5);
        Eigen::MatrixXd cost(n, n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
                cost(r, c) = rng.uniform() < 0.15 ? kForbidden : rng.uniform(-1.0, 1.0);

        const auto sol = solve_assignment(cost);
        double got = 0.0;
        int got_count = 0;
        for (int r = 0; r < n; ++r)
            if (sol[r] >= 0) {
                got += cost(r, sol[r]);
                ++got_count;
            }

        // Brute force over permutations, maximizing cardinality then cost.
        std::vector<int> perm(n);
        for (int i = 0; i < n; ++i) perm[i] = i;
        int best_count = -1;
        double best_cost = 0.0;
        do {
            int count = 0;
            double total = 0.0;
            for (int r = 0; r < n; ++r)
                if (std::isfinite(cost(r, perm[r]))) {
                    ++count;
                    total += cost(r, perm[r]);
                }
            if (count > best_count || (count == best_count && total < best_cost)) {
                best_count = count;
                best_cost = total;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
        REQUIRE(got_count == best_count);
        REQUIRE(got == Catch::Approx(best_cost).margin(1e-9));
    }
}

TEST_CASE("a lone person yields a single tracklet spanning all frames") {
    std::vector<Detection> dets;
    const Eigen::VectorXd desc = axis(8, 0);
    for (int f = 0; f < 60; ++f)
        dets.push_back(make_det(f, 0, f, {100.0 + 2.0 * f, 200.0}, desc, 0));
    const auto tracklets = build_tracklets(dets);
    REQUIRE(tracklets.size() == 1);
    REQUIRE(tracklets[0].length() == 60);
    REQUIRE(tracklets[0].first_frame == 0);
}

TEST_CASE("a noiseless simulated person links into one tracklet per camera") {
    auto cfg = fixtures::noiseless_config(1, 2);
    const auto scene = sim::generate_scene(cfg);
    const auto tracklets = build_tracklets(scene.detections);
    for (const auto& t : tracklets) {
        REQUIRE(t.length() == scene.n_frames(t.camera_id));
    }
    REQUIRE(tracklets.size() == 2);
}

TEST_CASE("velocity spike splits the tracklet exactly at the spike") {
    std::vector<Detection> dets;
    const Eigen::VectorXd desc = axis(8, 0);
    for (int f = 0; f < 60; ++f) {
        Eigen::Vector2d c(100.0 + 4.0 * f, 300.0);
        if (f >= 30) c.x() += 90.0;  // teleport between frame 29 and 30
        dets.push_back(make_det(f, 0, f, c, desc, 0));
    }
    const auto tracklets = build_tracklets(dets);
    REQUIRE(tracklets.size() == 2);
    REQUIRE(tracklets[0].last_frame() == 29);
    REQUIRE(tracklets[1].first_frame == 30);
}

TEST_CASE("first step is never split") {
    std::vector<Detection> dets;
    const Eigen::VectorXd desc = axis(8, 0);
    dets.push_back(make_det(0, 0, 0, {100, 100}, desc));
    dets.push_back(make_det(1, 0, 1, {180, 100}, desc));  // big but first step
    dets.push_back(make_det(2, 0, 2, {260, 100}, desc));
    const auto tracklets = build_tracklets(dets);
    REQUIRE(tracklets.size() == 1);
    REQUIRE(tracklets[0].length() == 3);
}

TEST_CASE("crossing people with confusing descriptors never mix identities") {
    auto cfg = fixtures::small_scene_config();
    cfg.n_people = 2;
    cfg.confusion_pairs = {{0, 1}};
    cfg.descriptor_noise = 0.03;
    const auto scene = sim::generate_scene(cfg);
    const auto tracklets = build_tracklets(scene.detections);
    REQUIRE(tracklet_purity(tracklets, scene.detections) == 1.0);
}

TEST_CASE("tracklets partition the detections with mutual exclusion") {
    const auto scene = sim::generate_scene(fixtures::small_scene_config());
    const auto tracklets = build_tracklets(scene.detections);
    std::set<int> seen;
    for (const auto& t : tracklets) {
        std::set<int> frames;
        for (std::size_t k = 0; k < t.detection_ids.size(); ++k) {
            const int d = t.detection_ids[k];
            REQUIRE(seen.insert(d).second);  // no detection in two tracklets
            // frames are consecutive within the tracklet
            REQUIRE(scene.detections[d].frame == t.first_frame + static_cast<int>(k));
            REQUIRE(frames.insert(scene.detections[d].frame).second);
        }
    }
    REQUIRE(seen.size() == scene.detections.size());
}

TEST_CASE("tracklet purity counts mixed tracklets") {
    std::vector<Detection> dets;
    const int dim = 8;
    // 100 single-identity tracklets (one per "camera" so they never link).
    for (int t = 0; t < 100; ++t)
        for (int f = 0; f < 3; ++f)
            dets.push_back(make_det(static_cast<int>(dets.size()), t, f,
                                    {100.0 + f, 100.0}, axis(dim, t % dim), t));
    auto tracklets = build_tracklets(dets);
    REQUIRE(tracklets.size() == 100);
    REQUIRE(tracklet_purity(tracklets, dets) == 1.0);

    dets[tracklets[0].detection_ids[2]].gt_identity = 555;
    dets[tracklets[1].detection_ids[2]].gt_identity = 556;
    REQUIRE(tracklet_purity(tracklets, dets) == Catch::Approx(0.98));

    dets[0].gt_identity.reset();
    REQUIRE_THROWS_AS(tracklet_purity(tracklets, dets), MissingLabels);
}

TEST_CASE("purity equals a brute-force label scan on random linkings") {
    Rng rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Detection> dets;
        for (int i = 0; i < 10; ++i)
            dets.push_back(make_det(i, 0, i, {100.0 + 5.0 * i, 100.0}, axis(8, 0),
                                    static_cast<int>(rng.uniform_index(3))));
        const auto tracklets = build_tracklets(dets);
        int mixed = 0;
        for (const auto& t : tracklets) {
            std::set<int> ids;
            for (int d : t.detection_ids) ids.insert(*dets[d].gt_identity);
            mixed += ids.size() > 1 ? 1 : 0;
        }
        const double expect = 1.0 - static_cast<double>(mixed) / tracklets.size();
        REQUIRE(tracklet_purity(tracklets, dets) == Catch::Approx(expect));
    }
}

TEST_CASE("lowering the similarity floor never reduces mixed tracklets") {
    auto cfg = fixtures::small_scene_config();
    cfg.n_people = 5;
    cfg.descriptor_noise = 0.25;
    cfg.identity_separation = 0.7;
    const auto scene = sim::generate_scene(cfg);
    int prev_mixed = -1;
    for (double floor : {0.9, 0.7, 0.5, 0.3, 0.0}) {
        TrackletParams params;
        params.sim_floor = floor;
        const auto tracklets = build_tracklets(scene.detections, params);
        int mixed = 0;
        for (const auto& t : tracklets) {
            std::set<int> ids;
            for (int d : t.detection_ids) ids.insert(*scene.detections[d].gt_identity);
            mixed += ids.size() > 1 ? 1 : 0;
        }
        if (prev_mixed >= 0) REQUIRE(mixed >= prev_mixed);
        prev_mixed = mixed;
    }
}
