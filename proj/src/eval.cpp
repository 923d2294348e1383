#include "hbst/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "hbst/detail/packed.hpp"

namespace hbst {

namespace {

using Clock = std::chrono::steady_clock;

void require_consecutive_ids(std::span<const ImageDescriptors> images) {
  for (std::size_t t = 0; t < images.size(); ++t) {
    if (images[t].image_id != images.front().image_id + t) {
      throw UsageError("image ids must be consecutive; image " + std::to_string(images[t].image_id) +
                       " found at position " + std::to_string(t));
    }
    for (const auto& entry : images[t].entries) {
      if (entry.image_id != images[t].image_id) {
        throw UsageError("entry image id does not match its image group");
      }
    }
  }
}

std::size_t sequence_width(std::span<const ImageDescriptors> images) {
  std::size_t width = 0;
  for (const auto& image : images) {
    const std::size_t w = uniform_width(image.entries);
    if (w == 0) continue;
    if (width == 0) width = w;
    require_same_width(width, w, "image sequence");
  }
  return width;
}

// All descriptors of a sequence, packed, with per-image ranges.
struct PackedSequence {
  detail::PackedDescriptors rows;
  std::vector<std::size_t> begin;  // begin[t] .. begin[t + 1] are image t's rows
  std::vector<std::uint32_t> image_of_row;
  std::vector<const DescriptorEntry*> entry_of_row;

  explicit PackedSequence(std::span<const ImageDescriptors> images)
      : rows(std::max<std::size_t>(sequence_width(images), 1)) {
    std::size_t total = 0;
    for (const auto& image : images) total += image.entries.size();
    rows.reserve(total);
    image_of_row.reserve(total);
    entry_of_row.reserve(total);
    for (std::size_t t = 0; t < images.size(); ++t) {
      begin.push_back(rows.size());
      for (const auto& entry : images[t].entries) {
        rows.push_back(entry.descriptor);
        image_of_row.push_back(static_cast<std::uint32_t>(t));
        entry_of_row.push_back(&entry);
      }
    }
    begin.push_back(rows.size());
  }
};

double distance_m(const PoseRecord& a, const PoseRecord& b) {
  double sq = 0.0;
  for (std::size_t i = 0; i < 3; ++i) sq += (a.position[i] - b.position[i]) * (a.position[i] - b.position[i]);
  return std::sqrt(sq);
}

}  // namespace

std::vector<ImageDescriptors> group_by_image(std::span<const DescriptorEntry> entries) {
  std::map<std::uint32_t, std::vector<DescriptorEntry>> groups;
  for (const auto& e : entries) groups[e.image_id].push_back(e);
  std::vector<ImageDescriptors> images;
  images.reserve(groups.size());
  for (auto& [id, group] : groups) images.push_back(ImageDescriptors{id, std::move(group)});
  return images;
}

PoseRecord PoseRecord::from_quaternion(std::uint32_t image_id, std::array<double, 3> position,
                                       double qx, double qy, double qz, double qw) {
  const double norm = std::sqrt(qx * qx + qy * qy + qz * qz + qw * qw);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw UsageError("pose of image " + std::to_string(image_id) + " has a degenerate quaternion");
  }
  qx /= norm;
  qy /= norm;
  qz /= norm;
  qw /= norm;
  PoseRecord pose;
  pose.image_id = image_id;
  pose.position = position;
  // Third column of the rotation matrix.
  pose.optical_axis = {2.0 * (qx * qz + qw * qy), 2.0 * (qy * qz - qw * qx),
                       1.0 - 2.0 * (qx * qx + qy * qy)};
  return pose;
}

double optical_axis_angle_deg(const PoseRecord& a, const PoseRecord& b) {
  double dot = 0.0;
  for (std::size_t i = 0; i < 3; ++i) dot += a.optical_axis[i] * b.optical_axis[i];
  return std::acos(std::clamp(dot, -1.0, 1.0)) * 180.0 / std::numbers::pi;
}

GroundTruth build_ground_truth(std::span<const ImageDescriptors> images,
                               std::optional<std::span<const PoseRecord>> poses,
                               const GroundTruthParams& params) {
  for (std::size_t t = 1; t < images.size(); ++t) {
    if (images[t].image_id <= images[t - 1].image_id) {
      throw UsageError("images must be in ascending id order");
    }
  }
  const std::size_t width = sequence_width(images);
  if (width != 0 && params.tau > width) throw UsageError("ground truth tau exceeds descriptor width");

  std::vector<const PoseRecord*> pose_of(images.size(), nullptr);
  if (poses) {
    std::map<std::uint32_t, const PoseRecord*> by_id;
    for (const auto& p : *poses) by_id[p.image_id] = &p;
    for (std::size_t t = 0; t < images.size(); ++t) {
      auto it = by_id.find(images[t].image_id);
      if (it == by_id.end()) {
        throw UsageError("no pose for image " + std::to_string(images[t].image_id));
      }
      pose_of[t] = it->second;
    }
  }

  GroundTruth truth;
  truth.params = params;
  const PackedSequence packed(images);
  std::vector<std::size_t> supported(images.size());
  for (std::size_t q = 1; q < images.size(); ++q) {
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < q; ++i) {
      if (pose_of[q] != nullptr &&
          !(distance_m(*pose_of[q], *pose_of[i]) < params.max_distance_m &&
            optical_axis_angle_deg(*pose_of[q], *pose_of[i]) < params.max_angle_deg)) {
        continue;
      }
      candidates.push_back(i);
    }
    if (candidates.empty() || images[q].entries.empty()) continue;

    std::fill(supported.begin(), supported.end(), 0);
    for (const auto& entry : images[q].entries) {
      for (const std::size_t i : candidates) {
        if (packed.rows.any_within(entry.descriptor, packed.begin[i], packed.begin[i + 1],
                                   params.tau)) {
          ++supported[i];
        }
      }
    }
    const auto n = static_cast<double>(images[q].entries.size());
    for (const std::size_t i : candidates) {
      if (static_cast<double>(supported[i]) / n > params.min_match_fraction) {
        truth.pairs.emplace(images[q].image_id, images[i].image_id);
      }
    }
  }
  return truth;
}

std::vector<QueryScores> run_protocol(std::span<const ImageDescriptors> images,
                                      const TreeConfig& tree_config,
                                      const RetrievalConfig& retrieval_config) {
  require_consecutive_ids(images);
  tree_config.validate(sequence_width(images));
  Tree tree;
  std::vector<QueryScores> results;
  results.reserve(images.size());
  for (const auto& image : images) {
    const auto start = Clock::now();
    QueryScores result;
    result.image_id = image.image_id;
    result.scores = query_image(tree, image.entries, retrieval_config);
    for (const auto& entry : image.entries) tree.insert(entry, tree_config);
    result.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    results.push_back(std::move(result));
  }
  return results;
}

std::vector<QueryScores> run_protocol_brute_force(std::span<const ImageDescriptors> images,
                                                  const RetrievalConfig& retrieval_config) {
  require_consecutive_ids(images);
  const std::size_t width = sequence_width(images);
  if (width != 0 && retrieval_config.tau > width) throw UsageError("tau exceeds descriptor width");
  const PackedSequence packed(images);

  constexpr std::uint32_t kNone = ~std::uint32_t{0};
  std::vector<std::uint32_t> best_distance(images.size(), kNone);
  std::vector<std::size_t> best_row(images.size(), 0);
  std::vector<std::uint32_t> touched;

  std::vector<QueryScores> results;
  results.reserve(images.size());
  for (std::size_t t = 0; t < images.size(); ++t) {
    const auto start = Clock::now();
    std::vector<std::vector<MatchRecord>> votes;
    votes.reserve(images[t].entries.size());
    for (const auto& entry : images[t].entries) {
      touched.clear();
      packed.rows.scan(entry.descriptor, 0, packed.begin[t], retrieval_config.tau,
                       [&](std::size_t row, std::uint32_t d) {
                         const std::uint32_t image = packed.image_of_row[row];
                         if (best_distance[image] == kNone) {
                           touched.push_back(image);
                           best_distance[image] = d;
                           best_row[image] = row;
                         } else if (d < best_distance[image]) {
                           best_distance[image] = d;
                           best_row[image] = row;
                         }
                       });
      std::vector<MatchRecord> keypoint_votes;
      keypoint_votes.reserve(touched.size());
      for (const std::uint32_t image : touched) {
        keypoint_votes.push_back(
            MatchRecord{entry, *packed.entry_of_row[best_row[image]], best_distance[image]});
        best_distance[image] = kNone;
      }
      votes.push_back(std::move(keypoint_votes));
    }
    QueryScores result;
    result.image_id = images[t].image_id;
    result.scores = rank_votes(std::move(votes), images[t].entries.size());
    result.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    results.push_back(std::move(result));
  }
  return results;
}

double f1_score(double precision, double recall) {
  if (precision + recall <= 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

PrCurve pr_curve(std::span<const QueryScores> results, const GroundTruth& ground_truth) {
  std::vector<std::pair<double, bool>> reported;
  for (const auto& query : results) {
    for (const auto& s : query.scores) {
      reported.emplace_back(s.score, ground_truth.contains(query.image_id, s.image_id));
    }
  }
  std::sort(reported.begin(), reported.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  PrCurve curve;
  curve.recall_defined = !ground_truth.pairs.empty();
  const auto possible = static_cast<double>(ground_truth.pairs.size());
  std::size_t total = 0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < reported.size();) {
    const double threshold = reported[i].first;
    for (; i < reported.size() && reported[i].first == threshold; ++i) {
      ++total;
      if (reported[i].second) ++correct;
    }
    PrPoint point;
    point.threshold = threshold;
    point.precision = static_cast<double>(correct) / static_cast<double>(total);
    point.recall = curve.recall_defined ? static_cast<double>(correct) / possible : 0.0;
    point.f1 = f1_score(point.precision, point.recall);
    curve.points.push_back(point);
  }
  std::reverse(curve.points.begin(), curve.points.end());
  return curve;
}

std::optional<PrPoint> max_f1(const PrCurve& curve) {
  if (!curve.recall_defined || curve.points.empty()) return std::nullopt;
  const PrPoint* best = &curve.points.front();
  for (const auto& p : curve.points) {
    if (p.f1 > best->f1 || (p.f1 == best->f1 && p.precision > best->precision)) best = &p;
  }
  return *best;
}

}  // namespace hbst
