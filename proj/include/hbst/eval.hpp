#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "hbst/retrieval.hpp"
#include "hbst/tree.hpp"

namespace hbst {

// All descriptors of one image.
struct ImageDescriptors {
  std::uint32_t image_id = 0;
  std::vector<DescriptorEntry> entries;
};

// Groups entries by image id, ascending, keeping entry order within an image.
std::vector<ImageDescriptors> group_by_image(std::span<const DescriptorEntry> entries);

struct PoseRecord {
  std::uint32_t image_id = 0;
  std::array<double, 3> position{};
  std::array<double, 3> optical_axis{0.0, 0.0, 1.0};  // unit vector

  // Camera +z rotated by the (normalized) quaternion.
  static PoseRecord from_quaternion(std::uint32_t image_id, std::array<double, 3> position,
                                    double qx, double qy, double qz, double qw);
};

// Angle between two optical axes in degrees.
double optical_axis_angle_deg(const PoseRecord& a, const PoseRecord& b);

struct GroundTruthParams {
  double max_distance_m = 10.0;
  double max_angle_deg = 20.0;
  double min_match_fraction = 0.10;
  std::uint32_t tau = 25;
};

// (query_id, reference_id) pairs, query acquired after reference.
struct GroundTruth {
  std::set<std::pair<std::uint32_t, std::uint32_t>> pairs;
  GroundTruthParams params;

  bool contains(std::uint32_t query_id, std::uint32_t reference_id) const {
    return pairs.contains({query_id, reference_id});
  }
};

// Pair (q, i), q later than i, is a match when
//  1. (poses given) the cameras are closer than max_distance_m and their
//     optical axes differ by less than max_angle_deg, and
//  2. more than min_match_fraction of q's descriptors have a brute-force
//     nearest neighbour in i within tau.
// Throws UsageError if poses are given but miss an image.
GroundTruth build_ground_truth(std::span<const ImageDescriptors> images,
                               std::optional<std::span<const PoseRecord>> poses,
                               const GroundTruthParams& params = {});

struct QueryScores {
  std::uint32_t image_id = 0;
  std::vector<ImageScore> scores;  // ranked, against all earlier images
  double seconds = 0.0;            // query plus insertion wall time
};

// Sequential protocol: each image queries the tree of its predecessors and is
// then inserted. Image ids must be consecutive.
std::vector<QueryScores> run_protocol(std::span<const ImageDescriptors> images,
                                      const TreeConfig& tree_config,
                                      const RetrievalConfig& retrieval_config);

// Same protocol with exhaustive matching instead of the tree.
std::vector<QueryScores> run_protocol_brute_force(std::span<const ImageDescriptors> images,
                                                  const RetrievalConfig& retrieval_config);

struct PrPoint {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct PrCurve {
  std::vector<PrPoint> points;  // ascending threshold
  bool recall_defined = true;   // false when the ground truth is empty
};

double f1_score(double precision, double recall);

// Sweeps the acceptance threshold over every observed score; a pair is
// reported when its score is >= the threshold.
PrCurve pr_curve(std::span<const QueryScores> results, const GroundTruth& ground_truth);

// Point with the highest F1, higher precision on ties. Nothing for an empty
// curve or undefined recall.
std::optional<PrPoint> max_f1(const PrCurve& curve);

}  // namespace hbst
