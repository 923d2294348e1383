#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hbst/tree.hpp"

namespace hbst {

struct RetrievalConfig {
  std::uint32_t tau = 25;
  double tau_image = 0.0;  // minimum score for retrieve_above
};

// Votes one stored image collected from a query image. Each query keypoint
// votes at most once per image, through its closest descriptor of that image.
struct ImageScore {
  std::uint32_t image_id = 0;
  std::size_t votes = 0;
  double score = 0.0;  // votes / number of query descriptors
  std::vector<MatchRecord> matches;
};

// Ranked by descending score, then ascending image id. Images without votes
// are not listed. Stored entries of the query's own image never vote.
std::vector<ImageScore> query_image(const Tree& tree, std::span<const DescriptorEntry> query,
                                    const RetrievalConfig& config);

// Turns per-keypoint votes into ranked scores. `votes[i]` holds the records of
// query keypoint i, at most one per stored image.
std::vector<ImageScore> rank_votes(std::vector<std::vector<MatchRecord>> votes,
                                   std::size_t query_count);

// Highest score, smallest image id on ties.
std::optional<ImageScore> retrieve_best(std::span<const ImageScore> scores);

// Every score >= tau_image, in input order.
std::vector<ImageScore> retrieve_above(std::span<const ImageScore> scores, double tau_image);

}  // namespace hbst
