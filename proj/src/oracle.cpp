#include "hbst/oracle.hpp"

#include <algorithm>

namespace hbst {

std::optional<MatchRecord> brute_force_nearest(const DescriptorEntry& query,
                                               std::span<const DescriptorEntry> refs,
                                               std::uint32_t tau) {
  const DescriptorEntry* best = nullptr;
  std::uint32_t best_distance = 0;
  for (const auto& ref : refs) {
    const std::uint32_t d = hamming(query.descriptor, ref.descriptor);
    if (best == nullptr || d < best_distance) {
      best = &ref;
      best_distance = d;
    }
  }
  if (best == nullptr || best_distance > tau) return std::nullopt;
  return MatchRecord{query, *best, best_distance};
}

std::vector<MatchRecord> brute_force_all(const DescriptorEntry& query,
                                         std::span<const DescriptorEntry> refs, std::uint32_t tau) {
  std::vector<MatchRecord> matches;
  for (const auto& ref : refs) {
    const std::uint32_t d = hamming(query.descriptor, ref.descriptor);
    if (d <= tau) matches.push_back(MatchRecord{query, ref, d});
  }
  return matches;
}

double completeness_single(const DescriptorEntry& query, std::span<const MatchRecord> tree_result,
                           std::span<const MatchRecord> oracle_result) {
  const auto key = entry_key(query);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> feasible;
  feasible.reserve(oracle_result.size());
  for (const auto& m : oracle_result) {
    if (entry_key(m.query) != key) throw ConsistencyError("oracle record belongs to another query");
    feasible.push_back(entry_key(m.reference));
  }
  std::sort(feasible.begin(), feasible.end());
  for (const auto& m : tree_result) {
    if (entry_key(m.query) != key) throw ConsistencyError("tree record belongs to another query");
    if (!std::binary_search(feasible.begin(), feasible.end(), entry_key(m.reference))) {
      throw ConsistencyError("tree result is not a subset of the brute-force result");
    }
  }
  if (tree_result.size() > oracle_result.size()) {
    throw ConsistencyError("tree result larger than the brute-force result");
  }
  if (oracle_result.empty()) return 1.0;
  return static_cast<double>(tree_result.size()) / static_cast<double>(oracle_result.size());
}

}  // namespace hbst
