#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hbst/descriptor.hpp"

namespace hbst {

// "HBSTD001" file: u32 dim_bits, u64 record_count, then records of
// {u32 image_id, u32 keypoint_id, f32 x, f32 y, dim_bits/8 payload bytes}.
// Little-endian throughout.
struct DescriptorSet {
  std::size_t dim_bits = 0;
  std::vector<DescriptorEntry> entries;

  friend bool operator==(const DescriptorSet&, const DescriptorSet&) = default;
};

// Throws UsageError if dim_bits is not a multiple of 8 in [8, 512] or an entry
// has another width.
std::vector<std::uint8_t> encode_descriptor_set(const DescriptorSet& set);

// Throws FormatError on bad magic, unsupported width, truncation or trailing
// bytes.
DescriptorSet decode_descriptor_set(std::span<const std::uint8_t> bytes);

void write_descriptor_file(const std::string& path, const DescriptorSet& set);
DescriptorSet read_descriptor_file(const std::string& path);

}  // namespace hbst
