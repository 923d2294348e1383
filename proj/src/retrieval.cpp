#include "hbst/retrieval.hpp"

#include <algorithm>
#include <map>

namespace hbst {

namespace {

// Keeps the closest record per stored image; earlier records win ties.
std::vector<MatchRecord> one_vote_per_image(std::vector<MatchRecord> matches,
                                            std::uint32_t query_image_id) {
  std::vector<MatchRecord> votes;
  for (auto& m : matches) {
    if (m.reference.image_id == query_image_id) continue;
    auto it = std::find_if(votes.begin(), votes.end(), [&](const MatchRecord& v) {
      return v.reference.image_id == m.reference.image_id;
    });
    if (it == votes.end()) {
      votes.push_back(std::move(m));
    } else if (m.distance < it->distance) {
      *it = std::move(m);
    }
  }
  return votes;
}

}  // namespace

std::vector<ImageScore> rank_votes(std::vector<std::vector<MatchRecord>> votes,
                                   std::size_t query_count) {
  std::map<std::uint32_t, ImageScore> per_image;
  for (auto& keypoint_votes : votes) {
    for (auto& vote : keypoint_votes) {
      auto& score = per_image[vote.reference.image_id];
      score.image_id = vote.reference.image_id;
      score.matches.push_back(std::move(vote));
    }
  }
  std::vector<ImageScore> ranked;
  ranked.reserve(per_image.size());
  for (auto& [id, score] : per_image) {
    score.votes = score.matches.size();
    score.score = static_cast<double>(score.votes) / static_cast<double>(query_count);
    ranked.push_back(std::move(score));
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const ImageScore& a, const ImageScore& b) {
    return a.score > b.score;
  });
  return ranked;
}

std::vector<ImageScore> query_image(const Tree& tree, std::span<const DescriptorEntry> query,
                                    const RetrievalConfig& config) {
  if (query.empty()) return {};
  for (const auto& entry : query) {
    if (entry.image_id != query.front().image_id) {
      throw UsageError("query_image: query entries span more than one image");
    }
  }
  std::vector<std::vector<MatchRecord>> votes;
  votes.reserve(query.size());
  for (const auto& entry : query) {
    votes.push_back(one_vote_per_image(tree.search_all(entry, config.tau), entry.image_id));
  }
  return rank_votes(std::move(votes), query.size());
}

std::optional<ImageScore> retrieve_best(std::span<const ImageScore> scores) {
  const ImageScore* best = nullptr;
  for (const auto& s : scores) {
    if (best == nullptr || s.score > best->score ||
        (s.score == best->score && s.image_id < best->image_id)) {
      best = &s;
    }
  }
  if (best == nullptr) return std::nullopt;
  return *best;
}

std::vector<ImageScore> retrieve_above(std::span<const ImageScore> scores, double tau_image) {
  std::vector<ImageScore> kept;
  for (const auto& s : scores) {
    if (s.score >= tau_image) kept.push_back(s);
  }
  return kept;
}

}  // namespace hbst
