#pragma once

#include "hbst/descriptor.hpp"
#include "hbst/detail/bytes.hpp"

namespace hbst::detail {

// {u32 image_id, u32 keypoint_id, f32 x, f32 y, ceil(bits/8) payload bytes}
inline void write_entry_record(ByteWriter& out, const DescriptorEntry& entry) {
  out.put_u32(entry.image_id);
  out.put_u32(entry.keypoint_id);
  out.put_f32(entry.keypoint.x);
  out.put_f32(entry.keypoint.y);
  const auto start = out.buffer().size();
  out.buffer().resize(start + entry.descriptor.byte_count());
  entry.descriptor.write_bytes(std::span(out.buffer()).subspan(start));
}

inline DescriptorEntry read_entry_record(ByteReader& in, std::size_t dim_bits) {
  DescriptorEntry entry;
  entry.image_id = in.u32();
  entry.keypoint_id = in.u32();
  entry.keypoint.x = in.f32();
  entry.keypoint.y = in.f32();
  entry.descriptor = BinaryDescriptor::from_bytes(dim_bits, in.take((dim_bits + 7) / 8));
  return entry;
}

}  // namespace hbst::detail
