#include <string>

#include "hbst/detail/bytes.hpp"
#include "hbst/detail/records.hpp"
#include "hbst/tree.hpp"

namespace hbst {

namespace {

constexpr std::string_view kTreeMagic = "HBT1";
constexpr std::uint8_t kTreeVersion = 1;
constexpr std::uint8_t kLeafTag = 0;
constexpr std::uint8_t kInternalTag = 1;

void write_node(detail::ByteWriter& out, const Tree::Node& node) {
  if (node.is_leaf()) {
    out.put_u8(kLeafTag);
    out.put_u32(static_cast<std::uint32_t>(node.entries.size()));
    for (const auto& entry : node.entries) detail::write_entry_record(out, entry);
    return;
  }
  out.put_u8(kInternalTag);
  out.put_u16(static_cast<std::uint16_t>(node.bit_index));
  write_node(out, *node.left);
  write_node(out, *node.right);
}

std::unique_ptr<Tree::Node> read_node(detail::ByteReader& in, std::size_t dim_bits,
                                      std::size_t depth, std::size_t& stored) {
  auto node = std::make_unique<Tree::Node>();
  const std::uint8_t tag = in.u8();
  if (tag == kLeafTag) {
    const std::uint32_t count = in.u32();
    const std::size_t record_size = 16 + (dim_bits + 7) / 8;
    if (count > 0 && (dim_bits == 0 || in.remaining() / record_size < count)) {
      throw FormatError(in.context() + ": truncated leaf of " + std::to_string(count) + " entries");
    }
    node->entries.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
      node->entries.push_back(detail::read_entry_record(in, dim_bits));
    }
    stored += count;
    return node;
  }
  if (tag != kInternalTag) {
    throw FormatError(in.context() + ": unknown node tag " + std::to_string(tag));
  }
  if (depth >= dim_bits) {
    throw FormatError(in.context() + ": tree deeper than descriptor width");
  }
  node->bit_index = in.u16();
  node->left = read_node(in, dim_bits, depth + 1, stored);
  node->right = read_node(in, dim_bits, depth + 1, stored);
  return node;
}

}  // namespace

std::vector<std::uint8_t> serialize_tree(const Tree& tree) {
  detail::ByteWriter out;
  out.put_magic(kTreeMagic);
  out.put_u8(kTreeVersion);
  out.put_u32(static_cast<std::uint32_t>(tree.dim_bits()));
  write_node(out, tree.root());
  return std::move(out.buffer());
}

Tree deserialize_tree(std::span<const std::uint8_t> bytes) {
  detail::ByteReader in(bytes, "tree stream");
  in.expect_magic(kTreeMagic);
  const std::uint8_t version = in.u8();
  if (version != kTreeVersion) {
    throw FormatError("tree stream: unsupported version " + std::to_string(version));
  }
  const std::uint32_t dim_bits = in.u32();
  if (dim_bits > kMaxDescriptorBits) {
    throw FormatError("tree stream: descriptor width " + std::to_string(dim_bits) + " unsupported");
  }
  Tree tree;
  std::size_t stored = 0;
  tree.root_ = read_node(in, dim_bits, 0, stored);
  tree.dim_bits_ = dim_bits;
  tree.size_ = stored;
  if (in.remaining() != 0) {
    throw FormatError("tree stream: " + std::to_string(in.remaining()) + " trailing bytes");
  }
  try {
    tree.validate();
  } catch (const ConsistencyError& e) {
    throw FormatError(std::string("tree stream: ") + e.what());
  }
  return tree;
}

void write_tree_file(const std::string& path, const Tree& tree) {
  detail::write_file_bytes(path, serialize_tree(tree));
}

Tree read_tree_file(const std::string& path) {
  return deserialize_tree(detail::read_file_bytes(path));
}

}  // namespace hbst
