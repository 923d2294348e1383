#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hbst/detail/packed.hpp"
#include "hbst/oracle.hpp"

namespace hbst {

namespace {

std::size_t corpus_width(const CompletenessCorpus& corpus) {
  const std::size_t refs = uniform_width(corpus.references);
  const std::size_t queries = uniform_width(corpus.queries);
  if (refs != 0 && queries != 0) require_same_width(refs, queries, "completeness corpus");
  return refs != 0 ? refs : queries;
}

void check_taus(std::span<const std::uint32_t> taus, std::size_t width) {
  if (taus.empty()) throw UsageError("at least one tau is required");
  for (const auto tau : taus) {
    if (width != 0 && tau > width) {
      throw UsageError("tau " + std::to_string(tau) + " exceeds descriptor width " +
                       std::to_string(width));
    }
  }
}

// Distances of every feasible reference per query, at the largest tau.
std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> feasible_sets(
    const CompletenessCorpus& corpus, std::size_t width, std::uint32_t max_tau) {
  detail::PackedDescriptors refs(width);
  refs.reserve(corpus.references.size());
  for (const auto& r : corpus.references) refs.push_back(r.descriptor);

  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> sets(corpus.queries.size());
  for (std::size_t q = 0; q < corpus.queries.size(); ++q) {
    refs.scan(corpus.queries[q].descriptor, 0, refs.size(), max_tau,
              [&](std::size_t i, std::uint32_t d) {
                sets[q].emplace_back(static_cast<std::uint32_t>(i), d);
              });
  }
  return sets;
}

}  // namespace

double BitwiseCompleteness::mean(std::size_t tau_index) const {
  const auto& values = per_bit.at(tau_index);
  if (values.empty()) return 1.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double BitwiseCompleteness::stddev(std::size_t tau_index) const {
  const auto& values = per_bit.at(tau_index);
  if (values.empty()) return 0.0;
  const double m = mean(tau_index);
  double acc = 0.0;
  for (const double v : values) acc += (v - m) * (v - m);
  return std::sqrt(acc / static_cast<double>(values.size()));
}

// A depth-1 tree on bit k returns exactly the feasible references that agree
// with the query on bit k, so all trees are evaluated from one brute-force
// pass per query. Bits constant over the references give a single leaf.
BitwiseCompleteness bitwise_completeness(const CompletenessCorpus& corpus,
                                         std::span<const std::uint32_t> taus) {
  const std::size_t width = corpus_width(corpus);
  check_taus(taus, width);
  const std::uint32_t max_tau = *std::max_element(taus.begin(), taus.end());
  const auto feasible = feasible_sets(corpus, width, max_tau);

  BitwiseCompleteness result;
  result.taus.assign(taus.begin(), taus.end());
  result.per_bit.assign(taus.size(), std::vector<double>(width, 0.0));
  if (corpus.queries.empty()) {
    for (auto& row : result.per_bit) std::fill(row.begin(), row.end(), 1.0);
    return result;
  }

  std::vector<bool> constant(width, true);
  if (!corpus.references.empty()) {
    const auto& first = corpus.references.front().descriptor;
    for (const auto& r : corpus.references) {
      for (std::size_t k = 0; k < width; ++k) {
        if (r.descriptor.bit(k) != first.bit(k)) constant[k] = false;
      }
    }
  }

  std::vector<std::uint32_t> disagree(width);
  for (std::size_t q = 0; q < corpus.queries.size(); ++q) {
    const auto& query = corpus.queries[q].descriptor;
    for (std::size_t t = 0; t < taus.size(); ++t) {
      auto& sums = result.per_bit[t];
      std::fill(disagree.begin(), disagree.end(), 0);
      std::size_t n = 0;
      for (const auto& [ref_index, distance] : feasible[q]) {
        if (distance > taus[t]) continue;
        ++n;
        const auto q_words = query.words();
        const auto r_words = corpus.references[ref_index].descriptor.words();
        for (std::size_t w = 0; w < q_words.size(); ++w) {
          std::uint64_t diff = q_words[w] ^ r_words[w];
          while (diff != 0) {
            ++disagree[w * 64 + static_cast<std::size_t>(std::countr_zero(diff))];
            diff &= diff - 1;
          }
        }
      }
      for (std::size_t k = 0; k < width; ++k) {
        sums[k] += n == 0 || constant[k] ? 1.0
                          : static_cast<double>(n - disagree[k]) / static_cast<double>(n);
      }
    }
  }
  const auto count = static_cast<double>(corpus.queries.size());
  for (auto& row : result.per_bit) {
    for (auto& v : row) v /= count;
  }
  return result;
}

std::vector<CompletenessReport> depth_completeness(const CompletenessCorpus& corpus,
                                                   std::span<const std::uint32_t> taus,
                                                   std::span<const std::size_t> depths,
                                                   double delta_max) {
  return depth_completeness(corpus, bitwise_completeness(corpus, taus), depths, delta_max);
}

std::vector<CompletenessReport> depth_completeness(const CompletenessCorpus& corpus,
                                                   const BitwiseCompleteness& bitwise,
                                                   std::span<const std::size_t> depths,
                                                   double delta_max) {
  const std::size_t width = corpus_width(corpus);
  const std::span<const std::uint32_t> taus = bitwise.taus;
  check_taus(taus, width);
  for (const auto h : depths) {
    if (width != 0 && h > width) throw UsageError("depth exceeds descriptor width");
  }
  const std::uint32_t max_tau = *std::max_element(taus.begin(), taus.end());

  // |feasible| per query and tau.
  std::vector<std::vector<std::size_t>> feasible_count(corpus.queries.size(),
                                                       std::vector<std::size_t>(taus.size(), 0));
  {
    const auto feasible = feasible_sets(corpus, width, max_tau);
    for (std::size_t q = 0; q < feasible.size(); ++q) {
      for (const auto& entry : feasible[q]) {
        for (std::size_t t = 0; t < taus.size(); ++t) {
          if (entry.second <= taus[t]) ++feasible_count[q][t];
        }
      }
    }
  }

  std::vector<CompletenessReport> reports(taus.size());
  for (std::size_t t = 0; t < taus.size(); ++t) {
    reports[t].tau = taus[t];
    reports[t].per_bit = bitwise.per_bit[t];
  }

  for (const std::size_t h : depths) {
    TreeConfig config;
    config.tau = 0;
    config.n_max = 1;
    config.delta_max = delta_max;
    config.max_depth = h;
    const Tree tree = Tree::build_balanced(corpus.references, config);

    std::vector<double> sums(taus.size(), 0.0);
    std::vector<std::size_t> found(taus.size());
    for (std::size_t q = 0; q < corpus.queries.size(); ++q) {
      std::fill(found.begin(), found.end(), 0);
      for (const auto& match : tree.search_all(corpus.queries[q], max_tau)) {
        for (std::size_t t = 0; t < taus.size(); ++t) {
          if (match.distance <= taus[t]) ++found[t];
        }
      }
      for (std::size_t t = 0; t < taus.size(); ++t) {
        const std::size_t n = feasible_count[q][t];
        sums[t] += n == 0 ? 1.0 : static_cast<double>(found[t]) / static_cast<double>(n);
      }
    }
    for (std::size_t t = 0; t < taus.size(); ++t) {
      reports[t].per_depth_measured[h] =
          corpus.queries.empty() ? 1.0 : sums[t] / static_cast<double>(corpus.queries.size());
      reports[t].per_depth_predicted[h] = std::pow(bitwise.mean(t), static_cast<double>(h));
    }
  }
  return reports;
}

}  // namespace hbst
