#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hbst/descriptor.hpp"

namespace hbst {

struct TreeConfig {
  std::uint32_t tau = 25;        // matching threshold, inclusive
  double delta_max = 0.1;        // max |0.5 - mean| for an admissible split bit
  std::size_t n_max = 10;        // leaves larger than this are split
  std::optional<std::size_t> max_depth;  // unset: descriptor width

  std::size_t depth_limit(std::size_t dim_bits) const noexcept {
    return max_depth ? std::min(*max_depth, dim_bits) : dim_bits;
  }

  // Throws UsageError. dim_bits == 0 skips the width-dependent checks.
  void validate(std::size_t dim_bits) const;
};

struct MatchRecord {
  DescriptorEntry query;
  DescriptorEntry reference;
  std::uint32_t distance = 0;

  friend bool operator==(const MatchRecord&, const MatchRecord&) = default;
};

struct SearchResult {
  std::optional<MatchRecord> best;
  std::size_t leaf_scanned = 0;
  std::size_t depth_traversed = 0;
};

struct DepthStats {
  double mean_depth = 0.0;
  double stddev_depth = 0.0;
  std::size_t max_depth = 0;
  std::size_t leaf_count = 0;
  std::map<std::size_t, std::size_t> leaf_size_histogram;  // leaf size -> number of leaves
};

// Split bit for a node: the admissible index whose mean is closest to 0.5.
// Indices in `forbidden` (ancestors) and bits constant over the node are not
// admissible. Returns nothing if the best |0.5 - mean| exceeds delta_max.
// Ties go to the smallest index.
std::optional<std::size_t> select_split_bit(const BitStatistics& stats,
                                            std::span<const std::size_t> forbidden,
                                            double delta_max);

// Binary search tree over descriptor bits. Internal nodes test one bit
// (0 -> left, 1 -> right); leaves hold entries in insertion order.
//
// Readers may share a const Tree freely. insert() and search_and_insert()
// need exclusive access.
class Tree {
 public:
  struct Node {
    std::uint32_t bit_index = 0;  // meaningful for internal nodes only
    std::unique_ptr<Node> left;
    std::unique_ptr<Node> right;
    std::vector<DescriptorEntry> entries;  // leaves only

    bool is_leaf() const noexcept { return left == nullptr; }
  };

  Tree();
  Tree(Tree&&) noexcept = default;
  Tree& operator=(Tree&&) noexcept = default;
  ~Tree();

  Tree clone() const;

  // Recursive even split: a node becomes internal when it holds more than
  // n_max entries, is shallower than the depth limit and has an admissible
  // split bit. O(N * h).
  static Tree build_balanced(std::vector<DescriptorEntry> entries, const TreeConfig& config);

  // Depth-1 tree splitting on `bit` regardless of balance. A bit that is
  // constant over the entries partitions nothing and leaves a single leaf.
  static Tree split_on_bit(std::vector<DescriptorEntry> entries, std::size_t bit);

  // Appends to the leaf reached by greedy descent, then splits that leaf once
  // if it outgrew n_max and a split is admissible.
  void insert(DescriptorEntry entry, const TreeConfig& config);

  // Greedy descent plus a linear scan of the reached leaf. First entry wins
  // on equal distance.
  SearchResult search_nearest(const DescriptorEntry& query, std::uint32_t tau) const;

  // Every entry in the reached leaf within tau, in leaf order.
  std::vector<MatchRecord> search_all(const DescriptorEntry& query, std::uint32_t tau) const;

  // Searches every entry of one image against the tree as it was on entry,
  // then inserts them all. Throws UsageError on mixed image ids.
  std::vector<SearchResult> search_and_insert(std::span<const DescriptorEntry> entries,
                                              const TreeConfig& config);

  DepthStats depth_stats() const;

  // Leaf reached by `query`; depth receives the path length.
  const Node& find_leaf(const BinaryDescriptor& query, std::size_t* depth = nullptr) const;

  // Throws ConsistencyError if an index repeats on a path, a bit index is out
  // of range, or a stored entry disagrees with the branches above it.
  void validate() const;

  const Node& root() const noexcept { return *root_; }
  std::size_t dim_bits() const noexcept { return dim_bits_; }
  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }

  // visitor(const Node& leaf, std::size_t depth)
  template <typename Visitor>
  void for_each_leaf(Visitor&& visitor) const {
    visit_leaves(*root_, 0, visitor);
  }

  friend bool operator==(const Tree& a, const Tree& b);

 private:
  friend Tree deserialize_tree(std::span<const std::uint8_t> bytes);

  template <typename Visitor>
  static void visit_leaves(const Node& node, std::size_t depth, Visitor& visitor) {
    if (node.is_leaf()) {
      visitor(node, depth);
      return;
    }
    visit_leaves(*node.left, depth + 1, visitor);
    visit_leaves(*node.right, depth + 1, visitor);
  }

  void adopt_width(std::size_t bits, const char* what);

  std::unique_ptr<Node> root_;
  std::size_t dim_bits_ = 0;
  std::size_t size_ = 0;
};

// "HBT1" tree stream. Throws FormatError on bad magic/version, truncation,
// trailing bytes or structurally invalid content.
std::vector<std::uint8_t> serialize_tree(const Tree& tree);
Tree deserialize_tree(std::span<const std::uint8_t> bytes);

void write_tree_file(const std::string& path, const Tree& tree);
Tree read_tree_file(const std::string& path);

}  // namespace hbst
