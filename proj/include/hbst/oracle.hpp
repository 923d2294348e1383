#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "hbst/descriptor.hpp"
#include "hbst/tree.hpp"

namespace hbst {

// Exhaustive matcher. Global minimum if within tau; first reference wins ties.
std::optional<MatchRecord> brute_force_nearest(const DescriptorEntry& query,
                                               std::span<const DescriptorEntry> refs,
                                               std::uint32_t tau);

// Every reference within tau, in reference order.
std::vector<MatchRecord> brute_force_all(const DescriptorEntry& query,
                                         std::span<const DescriptorEntry> refs, std::uint32_t tau);

// |tree_result| / |oracle_result|, or 1 when the oracle found nothing.
// Throws ConsistencyError if tree_result is not a subset of oracle_result.
double completeness_single(const DescriptorEntry& query, std::span<const MatchRecord> tree_result,
                           std::span<const MatchRecord> oracle_result);

// Reference descriptors stored in the trees and the queries searched against
// them.
struct CompletenessCorpus {
  std::vector<DescriptorEntry> references;
  std::vector<DescriptorEntry> queries;
};

// Mean completeness of every depth-1 tree, one per split bit.
struct BitwiseCompleteness {
  std::vector<std::uint32_t> taus;
  std::vector<std::vector<double>> per_bit;  // [tau index][bit]

  double mean(std::size_t tau_index) const;
  double stddev(std::size_t tau_index) const;
};

BitwiseCompleteness bitwise_completeness(const CompletenessCorpus& corpus,
                                         std::span<const std::uint32_t> taus);

struct CompletenessReport {
  std::uint32_t tau = 0;
  std::vector<double> per_bit;
  std::map<std::size_t, double> per_depth_measured;
  std::map<std::size_t, double> per_depth_predicted;  // mean(per_bit)^h
};

// Mean completeness of balanced trees limited to each depth (n_max = 1, so
// the depth limit governs), next to the prediction from the depth-1 mean.
// One report per tau.
std::vector<CompletenessReport> depth_completeness(const CompletenessCorpus& corpus,
                                                   std::span<const std::uint32_t> taus,
                                                   std::span<const std::size_t> depths,
                                                   double delta_max = 0.1);

// Same as above with the bitwise experiment already run over the same taus.
std::vector<CompletenessReport> depth_completeness(const CompletenessCorpus& corpus,
                                                   const BitwiseCompleteness& bitwise,
                                                   std::span<const std::size_t> depths,
                                                   double delta_max = 0.1);

}  // namespace hbst
