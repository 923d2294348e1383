#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "hbst/descriptor.hpp"
#include "hbst/synthetic.hpp"
#include "hbst/tree.hpp"

namespace test {

inline hbst::DescriptorEntry entry(std::string_view bits, std::uint32_t image = 0, std::uint32_t kp = 0) {
  hbst::DescriptorEntry e;
  e.descriptor = hbst::BinaryDescriptor::from_string(bits);
  e.image_id = image;
  e.keypoint_id = kp;
  return e;
}

inline hbst::DescriptorEntry entry(const hbst::BinaryDescriptor& d, std::uint32_t image = 0,
                                   std::uint32_t kp = 0) {
  hbst::DescriptorEntry e;
  e.descriptor = d;
  e.image_id = image;
  e.keypoint_id = kp;
  return e;
}

// Reference distance: compares the bit characters one by one.
inline std::uint32_t naive_hamming(const hbst::BinaryDescriptor& a, const hbst::BinaryDescriptor& b) {
  const auto sa = a.to_string();
  const auto sb = b.to_string();
  std::uint32_t d = 0;
  for (std::size_t i = 0; i < sa.size(); ++i) d += sa[i] != sb[i] ? 1u : 0u;
  return d;
}

using KeySet = std::set<std::pair<std::uint32_t, std::uint32_t>>;

inline KeySet reference_keys(std::span<const hbst::MatchRecord> records) {
  KeySet keys;
  for (const auto& r : records) keys.insert(hbst::entry_key(r.reference));
  return keys;
}

// Every leaf entry agrees with the branches above it; no bit repeats on a path.
inline bool paths_consistent(const hbst::Tree& tree) {
  bool ok = true;
  std::vector<std::pair<std::uint32_t, bool>> path;
  auto walk = [&](auto&& self, const hbst::Tree::Node& node) -> void {
    if (node.is_leaf()) {
      for (const auto& e : node.entries) {
        for (const auto& [bit, right] : path) {
          if (e.descriptor.bit(bit) != right) ok = false;
        }
      }
      return;
    }
    for (const auto& [bit, right] : path) {
      if (bit == node.bit_index) ok = false;
    }
    path.emplace_back(node.bit_index, false);
    self(self, *node.left);
    path.back().second = true;
    self(self, *node.right);
    path.pop_back();
  };
  walk(walk, tree.root());
  return ok;
}

inline std::size_t count_entries(const hbst::Tree& tree) {
  std::size_t n = 0;
  tree.for_each_leaf([&](const hbst::Tree::Node& leaf, std::size_t) { n += leaf.entries.size(); });
  return n;
}

}  // namespace test
