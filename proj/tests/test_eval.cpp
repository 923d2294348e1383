#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "hbst/eval.hpp"
#include "hbst/synthetic.hpp"
#include "support.hpp"

namespace {

std::vector<hbst::ImageDescriptors> images_of(const hbst::SyntheticSequence& seq) {
  return hbst::group_by_image(seq.descriptors.entries);
}

hbst::ImageScore score(std::uint32_t image, double s) {
  hbst::ImageScore out;
  out.image_id = image;
  out.score = s;
  return out;
}

hbst::QueryScores query(std::uint32_t image, std::vector<hbst::ImageScore> scores) {
  hbst::QueryScores q;
  q.image_id = image;
  q.scores = std::move(scores);
  return q;
}

hbst::GroundTruth truth(std::set<std::pair<std::uint32_t, std::uint32_t>> pairs) {
  hbst::GroundTruth t;
  t.pairs = std::move(pairs);
  return t;
}

hbst::PoseRecord pose_at(std::uint32_t id, double x, double yaw_deg = 0.0) {
  // rotation about the camera's y axis turns +z toward +x
  const double half = yaw_deg * std::numbers::pi / 360.0;
  return hbst::PoseRecord::from_quaternion(id, {x, 0.0, 0.0}, 0.0, std::sin(half), 0.0, std::cos(half));
}

// Two identical images in sequence.
std::vector<hbst::ImageDescriptors> duplicate_pair() {
  hbst::Rng rng(301);
  auto first = hbst::random_entries(200, 256, 0, rng);
  auto second = first;
  for (auto& e : second) e.image_id = 1;
  return {{0, first}, {1, second}};
}

hbst::SyntheticSpec planted_spec() {
  hbst::SyntheticSpec spec;
  spec.num_images = 12;
  spec.descriptors_per_image = 300;
  spec.noise_bits = 15;
  spec.seed = 17;
  spec.loop_pairs = {{6, 0, 0.5}, {7, 1, 0.3}, {8, 2, 0.2}, {9, 3, 0.05}, {10, 4, 0.8}, {11, 5, 0.12}};
  return spec;
}

}  // namespace

TEST_CASE("pose axes and angles") {
  const auto a = pose_at(0, 0.0);
  CHECK(a.optical_axis[2] == doctest::Approx(1.0));
  const auto b = pose_at(1, 0.0, 90.0);
  CHECK(b.optical_axis[0] == doctest::Approx(1.0));
  CHECK(hbst::optical_axis_angle_deg(a, b) == doctest::Approx(90.0));
  CHECK(hbst::optical_axis_angle_deg(a, pose_at(2, 0.0, 19.0)) == doctest::Approx(19.0));
  // unnormalized quaternion
  const auto c = hbst::PoseRecord::from_quaternion(3, {}, 0.0, 0.0, 0.0, 5.0);
  const double norm = std::hypot(c.optical_axis[0], c.optical_axis[1], c.optical_axis[2]);
  CHECK(std::abs(norm - 1.0) < 1e-6);
  CHECK_THROWS_AS(hbst::PoseRecord::from_quaternion(4, {}, 0, 0, 0, 0), hbst::UsageError);
}

TEST_CASE("ground truth: identical pair without poses") {
  const auto images = duplicate_pair();
  const auto gt = hbst::build_ground_truth(images, std::nullopt);
  CHECK(gt.pairs == std::set<std::pair<std::uint32_t, std::uint32_t>>{{1, 0}});
}

TEST_CASE("ground truth: distance and angle gates") {
  const auto images = duplicate_pair();
  auto with = [&](hbst::PoseRecord a, hbst::PoseRecord b) {
    const std::vector<hbst::PoseRecord> poses{a, b};
    return hbst::build_ground_truth(images, std::span<const hbst::PoseRecord>(poses)).pairs.size();
  };
  CHECK(with(pose_at(0, 0.0), pose_at(1, 15.0)) == 0);
  CHECK(with(pose_at(0, 0.0), pose_at(1, 9.9)) == 1);
  CHECK(with(pose_at(0, 0.0), pose_at(1, 10.0)) == 0);
  CHECK(with(pose_at(0, 0.0), pose_at(1, 1.0, 30.0)) == 0);
  CHECK(with(pose_at(0, 0.0), pose_at(1, 1.0, 19.0)) == 1);

  const std::vector<hbst::PoseRecord> missing{pose_at(0, 0.0)};
  CHECK_THROWS_AS(hbst::build_ground_truth(images, std::span<const hbst::PoseRecord>(missing)),
                  hbst::UsageError);
}

TEST_CASE("ground truth: more than 10 percent is strict") {
  hbst::Rng rng(303);
  auto first = hbst::random_entries(100, 256, 0, rng);
  auto second = hbst::random_entries(100, 256, 1, rng);
  for (std::size_t i = 0; i < 10; ++i) second[i].descriptor = first[i].descriptor;
  std::vector<hbst::ImageDescriptors> images{{0, first}, {1, second}};
  CHECK(hbst::build_ground_truth(images, std::nullopt).pairs.empty());
  images[1].entries[10].descriptor = first[10].descriptor;
  CHECK(hbst::build_ground_truth(images, std::nullopt).pairs.size() == 1);
}

TEST_CASE("ground truth on a planted sequence equals the planted pairs") {
  const auto seq = hbst::generate_sequence(planted_spec());
  const auto gt = hbst::build_ground_truth(images_of(seq), std::nullopt);
  const std::set<std::pair<std::uint32_t, std::uint32_t>> planted(seq.truth.begin(), seq.truth.end());
  CHECK(gt.pairs == planted);
  CHECK(planted.size() == 5);  // the 0.05 overlap stays below the bar
  for (const auto& [q, r] : gt.pairs) CHECK(q > r);
}

TEST_CASE("protocol: first image, identical images") {
  hbst::Rng rng(305);
  const auto base = hbst::random_entries(100, 256, 0, rng);
  std::vector<hbst::ImageDescriptors> images;
  for (std::uint32_t t = 0; t < 5; ++t) {
    auto e = base;
    for (auto& x : e) x.image_id = t;
    images.push_back({t, e});
  }
  hbst::TreeConfig tc;
  tc.n_max = 10;
  hbst::RetrievalConfig rc;
  rc.tau = 0;
  for (const auto& results : {hbst::run_protocol(images, tc, rc), hbst::run_protocol_brute_force(images, rc)}) {
    REQUIRE(results.size() == 5);
    CHECK(results[0].scores.empty());
    for (std::uint32_t t = 1; t < 5; ++t) {
      REQUIRE(results[t].scores.size() == t);
      for (std::uint32_t i = 0; i < t; ++i) {
        CHECK(results[t].scores[i].image_id == i);
        CHECK(results[t].scores[i].score == 1.0);
      }
    }
  }
}

TEST_CASE("protocol rejects gaps in image ids") {
  hbst::Rng rng(307);
  std::vector<hbst::ImageDescriptors> images{{0, hbst::random_entries(5, 256, 0, rng)},
                                             {2, hbst::random_entries(5, 256, 2, rng)}};
  CHECK_THROWS_AS(hbst::run_protocol(images, hbst::TreeConfig{}, hbst::RetrievalConfig{}), hbst::UsageError);
  CHECK_THROWS_AS(hbst::run_protocol_brute_force(images, hbst::RetrievalConfig{}), hbst::UsageError);
}

TEST_CASE("brute-force protocol equals single-leaf tree protocol") {
  const auto images = images_of(hbst::generate_sequence(planted_spec()));
  hbst::TreeConfig tc;
  tc.n_max = 1000000;
  hbst::RetrievalConfig rc;
  const auto tree = hbst::run_protocol(images, tc, rc);
  const auto bf = hbst::run_protocol_brute_force(images, rc);
  REQUIRE(tree.size() == bf.size());
  for (std::size_t t = 0; t < bf.size(); ++t) {
    REQUIRE(tree[t].scores.size() == bf[t].scores.size());
    for (std::size_t i = 0; i < bf[t].scores.size(); ++i) {
      CHECK(tree[t].scores[i].image_id == bf[t].scores[i].image_id);
      CHECK(tree[t].scores[i].votes == bf[t].scores[i].votes);
      CHECK(tree[t].scores[i].matches == bf[t].scores[i].matches);
    }
  }
}

TEST_CASE("loop closures dominate the rankings on a planted sequence") {
  const auto seq = hbst::generate_sequence(planted_spec());
  hbst::TreeConfig tc;
  tc.n_max = 50;
  const auto results = hbst::run_protocol(images_of(seq), tc, hbst::RetrievalConfig{});
  for (const auto& [q, r] : seq.truth) {
    REQUIRE_FALSE(results[q].scores.empty());
    CHECK(results[q].scores.front().image_id == r);
  }
}

TEST_CASE("f1 arithmetic") {
  CHECK(hbst::f1_score(0.5, 0.5) == 0.5);
  CHECK(hbst::f1_score(0.0, 0.0) == 0.0);
  CHECK(hbst::f1_score(1.0, 0.5) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("pr curve of a perfect retrieval") {
  const std::vector<hbst::QueryScores> results{query(1, {score(0, 0.9)}), query(2, {score(1, 0.7)})};
  const auto curve = hbst::pr_curve(results, truth({{1, 0}, {2, 1}}));
  const auto best = hbst::max_f1(curve);
  REQUIRE(best.has_value());
  CHECK(best->precision == 1.0);
  CHECK(best->recall == 1.0);
  CHECK(best->f1 == 1.0);
}

TEST_CASE("pr curve sweep by hand") {
  // scores 0.9 (true), 0.6 (false), 0.4 (true), 0.2 (false); one true pair never reported
  const std::vector<hbst::QueryScores> results{query(3, {score(0, 0.9), score(1, 0.6)}),
                                               query(4, {score(2, 0.4), score(3, 0.2)})};
  const auto curve = hbst::pr_curve(results, truth({{3, 0}, {4, 2}, {4, 1}}));
  REQUIRE(curve.points.size() == 4);
  const double thresholds[] = {0.2, 0.4, 0.6, 0.9};
  const double precision[] = {0.5, 2.0 / 3.0, 0.5, 1.0};
  const double recall[] = {2.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(curve.points[i].threshold == thresholds[i]);
    CHECK(curve.points[i].precision == doctest::Approx(precision[i]));
    CHECK(curve.points[i].recall == doctest::Approx(recall[i]));
    CHECK(curve.points[i].f1 == doctest::Approx(hbst::f1_score(precision[i], recall[i])));
  }
  const auto best = hbst::max_f1(curve);
  REQUIRE(best.has_value());
  CHECK(best->threshold == 0.4);
}

TEST_CASE("max_f1 prefers higher precision on equal f1") {
  hbst::PrCurve curve;
  curve.points = {{0.1, 0.5, 1.0, 2.0 / 3.0}, {0.5, 1.0, 0.5, 2.0 / 3.0}};
  CHECK(hbst::max_f1(curve)->threshold == 0.5);
}

TEST_CASE("empty ground truth or no reports") {
  const std::vector<hbst::QueryScores> results{query(1, {score(0, 0.3)})};
  const auto curve = hbst::pr_curve(results, truth({}));
  CHECK_FALSE(curve.recall_defined);
  for (const auto& p : curve.points) CHECK(p.recall == 0.0);
  CHECK_FALSE(hbst::max_f1(curve).has_value());
  CHECK_FALSE(hbst::max_f1(hbst::pr_curve({}, truth({{1, 0}}))).has_value());
}

TEST_CASE("recall never rises with the threshold; precision does on separable scores") {
  hbst::Rng rng(311);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<hbst::QueryScores> results;
  std::set<std::pair<std::uint32_t, std::uint32_t>> pairs;
  std::vector<hbst::QueryScores> separable;
  for (std::uint32_t q = 1; q < 60; ++q) {
    hbst::QueryScores a = query(q, {});
    hbst::QueryScores b = query(q, {});
    for (std::uint32_t r = 0; r < q; r += 3) {
      const bool positive = u(rng) < 0.3;
      if (positive) pairs.emplace(q, r);
      a.scores.push_back(score(r, u(rng)));
      b.scores.push_back(score(r, positive ? 0.5 + 0.5 * u(rng) : 0.5 * u(rng)));
    }
    results.push_back(a);
    separable.push_back(b);
  }
  const auto gt = truth(pairs);
  const auto curve = hbst::pr_curve(results, gt);
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    CHECK(curve.points[i].recall <= curve.points[i - 1].recall);
    CHECK(curve.points[i].threshold > curve.points[i - 1].threshold);
  }
  const auto sep = hbst::pr_curve(separable, gt);
  for (std::size_t i = 1; i < sep.points.size(); ++i) {
    CHECK(sep.points[i].precision >= sep.points[i - 1].precision);
  }
}

TEST_CASE("max_f1 is invariant under strictly increasing score maps") {
  hbst::Rng rng(313);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<hbst::QueryScores> results;
  std::set<std::pair<std::uint32_t, std::uint32_t>> pairs;
  for (std::uint32_t q = 1; q < 40; ++q) {
    auto qs = query(q, {});
    for (std::uint32_t r = 0; r < q; r += 2) {
      const bool positive = u(rng) < 0.25;
      if (positive) pairs.emplace(q, r);
      // coarse grid so many scores tie
      const double raw = (positive ? 0.3 : 0.0) + 0.7 * u(rng);
      qs.scores.push_back(score(r, std::round(raw * 20.0) / 20.0));
    }
    results.push_back(qs);
  }
  const auto gt = truth(pairs);
  const auto base = hbst::max_f1(hbst::pr_curve(results, gt));
  REQUIRE(base.has_value());
  const auto mapped = [&](auto f) {
    auto copy = results;
    for (auto& q : copy) {
      for (auto& s : q.scores) s.score = f(s.score);
    }
    return hbst::max_f1(hbst::pr_curve(copy, gt));
  };
  for (const auto& m : {mapped([](double s) { return s * s; }), mapped([](double s) { return 0.2 + 0.3 * s; }),
                        mapped([](double s) { return std::sqrt(s); })}) {
    REQUIRE(m.has_value());
    CHECK(m->f1 == doctest::Approx(base->f1).epsilon(1e-12));
    CHECK(m->precision == doctest::Approx(base->precision).epsilon(1e-12));
    CHECK(m->recall == doctest::Approx(base->recall).epsilon(1e-12));
  }
}

TEST_CASE("brute force dominates the tree on a planted sequence") {
  const auto seq = hbst::generate_sequence(planted_spec());
  const auto images = images_of(seq);
  const auto gt = hbst::build_ground_truth(images, std::nullopt);
  const hbst::RetrievalConfig rc;
  const auto bf = hbst::max_f1(hbst::pr_curve(hbst::run_protocol_brute_force(images, rc), gt));
  REQUIRE(bf.has_value());
  for (const std::size_t n_max : {10u, 50u}) {
    hbst::TreeConfig tc;
    tc.n_max = n_max;
    const auto tree = hbst::max_f1(hbst::pr_curve(hbst::run_protocol(images, tc, rc), gt));
    REQUIRE(tree.has_value());
    CHECK(bf->f1 >= tree->f1);
  }
}
