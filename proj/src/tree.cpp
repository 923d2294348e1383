#include "hbst/tree.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace hbst {

namespace {

using Node = Tree::Node;

std::unique_ptr<Node> clone_node(const Node& node) {
  auto copy = std::make_unique<Node>();
  copy->bit_index = node.bit_index;
  copy->entries = node.entries;
  if (!node.is_leaf()) {
    copy->left = clone_node(*node.left);
    copy->right = clone_node(*node.right);
  }
  return copy;
}

bool nodes_equal(const Node& a, const Node& b) {
  if (a.is_leaf() != b.is_leaf()) return false;
  if (a.is_leaf()) return a.entries == b.entries;
  return a.bit_index == b.bit_index && nodes_equal(*a.left, *b.left) &&
         nodes_equal(*a.right, *b.right);
}

// Turns a leaf into an internal node on `bit`, keeping entry order per side.
void split_leaf(Node& leaf, std::size_t bit) {
  auto left = std::make_unique<Node>();
  auto right = std::make_unique<Node>();
  for (auto& entry : leaf.entries) {
    (entry.descriptor.bit(bit) ? right : left)->entries.push_back(std::move(entry));
  }
  leaf.entries.clear();
  leaf.entries.shrink_to_fit();
  leaf.bit_index = static_cast<std::uint32_t>(bit);
  leaf.left = std::move(left);
  leaf.right = std::move(right);
}

std::optional<std::size_t> split_bit_for(const std::vector<DescriptorEntry>& entries,
                                         const std::vector<std::size_t>& path,
                                         double delta_max) {
  return select_split_bit(bit_statistics(entries), path, delta_max);
}

void build_recursive(Node& node, std::size_t depth, std::vector<std::size_t>& path,
                     const TreeConfig& config, std::size_t depth_limit) {
  if (node.entries.size() <= config.n_max || depth >= depth_limit) return;
  const auto bit = split_bit_for(node.entries, path, config.delta_max);
  if (!bit) return;
  split_leaf(node, *bit);
  path.push_back(*bit);
  build_recursive(*node.left, depth + 1, path, config, depth_limit);
  build_recursive(*node.right, depth + 1, path, config, depth_limit);
  path.pop_back();
}

void validate_node(const Node& node, std::size_t dim_bits, std::vector<bool>& used,
                   std::vector<std::pair<std::size_t, bool>>& branches) {
  if (node.is_leaf()) {
    for (const auto& entry : node.entries) {
      if (entry.descriptor.bits() != dim_bits) {
        throw ConsistencyError("leaf entry width differs from tree width");
      }
      for (const auto& [bit, value] : branches) {
        if (entry.descriptor.bit(bit) != value) {
          throw ConsistencyError("leaf entry disagrees with branch on bit " + std::to_string(bit));
        }
      }
    }
    return;
  }
  if (node.right == nullptr) {
    throw ConsistencyError("internal node without right child");
  }
  const std::size_t bit = node.bit_index;
  if (bit >= dim_bits) {
    throw ConsistencyError("bit index " + std::to_string(bit) + " out of range");
  }
  if (used[bit]) {
    throw ConsistencyError("bit index " + std::to_string(bit) + " repeats on a path");
  }
  used[bit] = true;
  branches.emplace_back(bit, false);
  validate_node(*node.left, dim_bits, used, branches);
  branches.back().second = true;
  validate_node(*node.right, dim_bits, used, branches);
  branches.pop_back();
  used[bit] = false;
}

}  // namespace

void TreeConfig::validate(std::size_t dim_bits) const {
  if (n_max < 1) throw UsageError("n_max must be at least 1");
  if (!(delta_max >= 0.0 && delta_max <= 0.5)) {
    throw UsageError("delta_max must lie in [0, 0.5]");
  }
  if (dim_bits != 0) {
    if (tau > dim_bits) {
      throw UsageError("tau " + std::to_string(tau) + " exceeds descriptor width " +
                       std::to_string(dim_bits));
    }
    if (max_depth && *max_depth > dim_bits) {
      throw UsageError("max_depth exceeds descriptor width");
    }
  }
}

std::optional<std::size_t> select_split_bit(const BitStatistics& stats,
                                            std::span<const std::size_t> forbidden,
                                            double delta_max) {
  if (stats.total == 0) {
    throw UsageError("select_split_bit: statistics over zero descriptors");
  }
  std::vector<bool> excluded(stats.bits(), false);
  for (const std::size_t k : forbidden) {
    if (k < excluded.size()) excluded[k] = true;
  }
  // |0.5 - mean| scaled by 2 * total, so equal gaps tie exactly
  std::optional<std::size_t> best;
  std::uint64_t best_gap = 0;
  const std::uint64_t total = stats.total;
  for (std::size_t k = 0; k < stats.bits(); ++k) {
    if (excluded[k] || stats.counts[k] == 0 || stats.counts[k] == stats.total) continue;
    const std::uint64_t twice = 2 * static_cast<std::uint64_t>(stats.counts[k]);
    const std::uint64_t gap = twice > total ? twice - total : total - twice;
    if (!best || gap < best_gap) {
      best = k;
      best_gap = gap;
    }
  }
  if (best && static_cast<double>(best_gap) / (2.0 * static_cast<double>(total)) > delta_max) return std::nullopt;
  return best;
}

Tree::Tree() : root_(std::make_unique<Node>()) {}
Tree::~Tree() = default;

Tree Tree::clone() const {
  Tree copy;
  copy.root_ = clone_node(*root_);
  copy.dim_bits_ = dim_bits_;
  copy.size_ = size_;
  return copy;
}

void Tree::adopt_width(std::size_t bits, const char* what) {
  if (dim_bits_ == 0) {
    dim_bits_ = bits;
  } else {
    require_same_width(dim_bits_, bits, what);
  }
}

Tree Tree::build_balanced(std::vector<DescriptorEntry> entries, const TreeConfig& config) {
  const std::size_t width = uniform_width(entries);
  config.validate(width);
  Tree tree;
  tree.dim_bits_ = width;
  tree.size_ = entries.size();
  tree.root_->entries = std::move(entries);
  std::vector<std::size_t> path;
  build_recursive(*tree.root_, 0, path, config, config.depth_limit(width));
  return tree;
}

Tree Tree::split_on_bit(std::vector<DescriptorEntry> entries, std::size_t bit) {
  const std::size_t width = uniform_width(entries);
  if (width != 0 && bit >= width) {
    throw UsageError("split bit " + std::to_string(bit) + " out of range");
  }
  Tree tree;
  tree.dim_bits_ = width;
  tree.size_ = entries.size();
  tree.root_->entries = std::move(entries);
  const auto& stored = tree.root_->entries;
  const bool varies = std::any_of(stored.begin(), stored.end(), [&](const DescriptorEntry& e) {
    return e.descriptor.bit(bit) != stored.front().descriptor.bit(bit);
  });
  if (varies) split_leaf(*tree.root_, bit);
  return tree;
}

void Tree::insert(DescriptorEntry entry, const TreeConfig& config) {
  adopt_width(entry.descriptor.bits(), "insert");
  config.validate(dim_bits_);
  std::vector<std::size_t> path;
  Node* node = root_.get();
  while (!node->is_leaf()) {
    path.push_back(node->bit_index);
    node = entry.descriptor.bit(node->bit_index) ? node->right.get() : node->left.get();
  }
  node->entries.push_back(std::move(entry));
  ++size_;
  if (node->entries.size() <= config.n_max || path.size() >= config.depth_limit(dim_bits_)) return;
  if (const auto bit = split_bit_for(node->entries, path, config.delta_max)) {
    split_leaf(*node, *bit);
  }
}

const Tree::Node& Tree::find_leaf(const BinaryDescriptor& query, std::size_t* depth) const {
  const Node* node = root_.get();
  std::size_t steps = 0;
  while (!node->is_leaf()) {
    node = query.bit(node->bit_index) ? node->right.get() : node->left.get();
    ++steps;
  }
  if (depth) *depth = steps;
  return *node;
}

SearchResult Tree::search_nearest(const DescriptorEntry& query, std::uint32_t tau) const {
  SearchResult result;
  if (size_ == 0) return result;
  require_same_width(dim_bits_, query.descriptor.bits(), "search_nearest");
  const Node& leaf = find_leaf(query.descriptor, &result.depth_traversed);
  result.leaf_scanned = leaf.entries.size();
  const DescriptorEntry* best = nullptr;
  std::uint32_t best_distance = 0;
  for (const auto& entry : leaf.entries) {
    const std::uint32_t d = hamming_unchecked(query.descriptor, entry.descriptor);
    if (best == nullptr || d < best_distance) {
      best = &entry;
      best_distance = d;
    }
  }
  if (best != nullptr && best_distance <= tau) {
    result.best = MatchRecord{query, *best, best_distance};
  }
  return result;
}

std::vector<MatchRecord> Tree::search_all(const DescriptorEntry& query, std::uint32_t tau) const {
  std::vector<MatchRecord> matches;
  if (size_ == 0) return matches;
  require_same_width(dim_bits_, query.descriptor.bits(), "search_all");
  for (const auto& entry : find_leaf(query.descriptor).entries) {
    const std::uint32_t d = hamming_unchecked(query.descriptor, entry.descriptor);
    if (d <= tau) matches.push_back(MatchRecord{query, entry, d});
  }
  return matches;
}

std::vector<SearchResult> Tree::search_and_insert(std::span<const DescriptorEntry> entries,
                                                  const TreeConfig& config) {
  for (const auto& entry : entries) {
    if (entry.image_id != entries.front().image_id) {
      throw UsageError("search_and_insert: entries span more than one image");
    }
  }
  const std::size_t width = uniform_width(entries);
  if (width != 0 && dim_bits_ != 0) require_same_width(dim_bits_, width, "search_and_insert");
  config.validate(width != 0 ? width : dim_bits_);

  std::vector<SearchResult> results;
  results.reserve(entries.size());
  for (const auto& entry : entries) {
    results.push_back(search_nearest(entry, config.tau));
  }
  for (const auto& entry : entries) {
    insert(entry, config);
  }
  return results;
}

DepthStats Tree::depth_stats() const {
  DepthStats stats;
  double sum = 0.0;
  double sum_sq = 0.0;
  for_each_leaf([&](const Node& leaf, std::size_t depth) {
    ++stats.leaf_count;
    sum += static_cast<double>(depth);
    sum_sq += static_cast<double>(depth) * static_cast<double>(depth);
    stats.max_depth = std::max(stats.max_depth, depth);
    ++stats.leaf_size_histogram[leaf.entries.size()];
  });
  const auto n = static_cast<double>(stats.leaf_count);
  stats.mean_depth = sum / n;
  stats.stddev_depth = std::sqrt(std::max(0.0, sum_sq / n - stats.mean_depth * stats.mean_depth));
  return stats;
}

void Tree::validate() const {
  std::vector<bool> used(dim_bits_, false);
  std::vector<std::pair<std::size_t, bool>> branches;
  validate_node(*root_, dim_bits_, used, branches);
  std::size_t stored = 0;
  for_each_leaf([&](const Node& leaf, std::size_t) { stored += leaf.entries.size(); });
  if (stored != size_) throw ConsistencyError("entry count does not match leaf contents");
}

bool operator==(const Tree& a, const Tree& b) {
  return a.dim_bits_ == b.dim_bits_ && a.size_ == b.size_ && nodes_equal(*a.root_, *b.root_);
}

}  // namespace hbst
