#include "hbst/bench.hpp"

#include <chrono>

#include "hbst/detail/packed.hpp"
#include "hbst/synthetic.hpp"

namespace hbst {

BenchmarkResult run_benchmark(const BenchmarkConfig& config) {
  using Clock = std::chrono::steady_clock;
  if (config.stored == 0 || config.queries == 0) throw UsageError("benchmark needs stored and query descriptors");
  config.tree.validate(config.dim_bits);

  Rng rng(config.seed);
  const auto stored = random_entries(config.stored, config.dim_bits, 0, rng);
  std::uniform_int_distribution<std::size_t> pick(0, stored.size() - 1);
  std::uniform_int_distribution<std::size_t> noise(0, config.max_noise);
  std::vector<DescriptorEntry> queries;
  queries.reserve(config.queries);
  for (std::size_t i = 0; i < config.queries; ++i) {
    DescriptorEntry q = stored[pick(rng)];
    q.image_id = 1;
    q.keypoint_id = static_cast<std::uint32_t>(i);
    q.descriptor = flip_random_bits(q.descriptor, noise(rng), rng);
    queries.push_back(std::move(q));
  }

  BenchmarkResult result;
  Tree tree;
  auto start = Clock::now();
  for (const auto& entry : stored) tree.insert(entry, config.tree);
  result.insert_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  result.depth = tree.depth_stats();

  std::vector<std::uint32_t> tree_distance(queries.size(), ~std::uint32_t{0});
  std::size_t scanned = 0;
  std::size_t traversed = 0;
  start = Clock::now();
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const auto found = tree.search_nearest(queries[i], config.tree.tau);
    scanned += found.leaf_scanned;
    traversed += found.depth_traversed;
    if (found.best) tree_distance[i] = found.best->distance;
  }
  result.tree_seconds = std::chrono::duration<double>(Clock::now() - start).count();

  detail::PackedDescriptors packed(config.dim_bits);
  packed.reserve(stored.size());
  for (const auto& entry : stored) packed.push_back(entry.descriptor);
  std::vector<std::uint32_t> bf_distance(queries.size(), ~std::uint32_t{0});
  start = Clock::now();
  for (std::size_t i = 0; i < queries.size(); ++i) {
    std::uint32_t best = ~std::uint32_t{0};
    packed.scan(queries[i].descriptor, 0, packed.size(), config.tree.tau,
                [&](std::size_t, std::uint32_t d) { best = std::min(best, d); });
    bf_distance[i] = best;
  }
  result.brute_force_seconds = std::chrono::duration<double>(Clock::now() - start).count();

  std::size_t agree = 0;
  for (std::size_t i = 0; i < queries.size(); ++i) agree += tree_distance[i] == bf_distance[i];

  const auto n = static_cast<double>(queries.size());
  result.mean_leaf_scanned = static_cast<double>(scanned) / n;
  result.mean_depth_traversed = static_cast<double>(traversed) / n;
  result.mean_tree_work = result.mean_leaf_scanned + result.mean_depth_traversed;
  result.brute_force_work = static_cast<double>(stored.size());
  result.agreement = static_cast<double>(agree) / n;
  result.speedup = result.tree_seconds > 0.0 ? result.brute_force_seconds / result.tree_seconds : 0.0;
  return result;
}

}  // namespace hbst
