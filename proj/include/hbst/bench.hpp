#pragma once

#include <cstddef>
#include <cstdint>

#include "hbst/tree.hpp"

namespace hbst {

struct BenchmarkConfig {
  std::size_t stored = 100000;
  std::size_t queries = 1000;
  std::size_t dim_bits = 256;
  std::size_t max_noise = 15;  // queries are stored descriptors with up to this many flips
  TreeConfig tree{.tau = 25, .delta_max = 0.1, .n_max = 100, .max_depth = std::nullopt};
  std::uint64_t seed = 7;
};

struct BenchmarkResult {
  double insert_seconds = 0.0;
  double tree_seconds = 0.0;         // all tree queries
  double brute_force_seconds = 0.0;  // all exhaustive queries
  double speedup = 0.0;
  double mean_leaf_scanned = 0.0;
  double mean_depth_traversed = 0.0;
  double mean_tree_work = 0.0;       // depth_traversed + leaf_scanned
  double brute_force_work = 0.0;     // comparisons per exhaustive query
  double agreement = 0.0;            // queries where tree and brute force find the same distance
  DepthStats depth;
};

// Incrementally builds a tree of random descriptors, then times nearest
// neighbour queries against it and against a packed linear scan.
BenchmarkResult run_benchmark(const BenchmarkConfig& config);

}  // namespace hbst
