#include "hbst/descriptor_file.hpp"

#include "hbst/detail/bytes.hpp"
#include "hbst/detail/records.hpp"

namespace hbst {

namespace {

constexpr std::string_view kFileMagic = "HBSTD001";
constexpr std::size_t kRecordHeaderBytes = 16;

bool valid_file_width(std::size_t bits) {
  return bits != 0 && bits % 8 == 0 && bits <= kMaxDescriptorBits;
}

}  // namespace

std::vector<std::uint8_t> encode_descriptor_set(const DescriptorSet& set) {
  if (!valid_file_width(set.dim_bits)) {
    throw UsageError("descriptor files need a width that is a multiple of 8 in [8, 512], got " +
                     std::to_string(set.dim_bits));
  }
  detail::ByteWriter out;
  out.buffer().reserve(20 + set.entries.size() * (kRecordHeaderBytes + set.dim_bits / 8));
  out.put_magic(kFileMagic);
  out.put_u32(static_cast<std::uint32_t>(set.dim_bits));
  out.put_u64(set.entries.size());
  for (const auto& entry : set.entries) {
    require_same_width(set.dim_bits, entry.descriptor.bits(), "descriptor file");
    detail::write_entry_record(out, entry);
  }
  return std::move(out.buffer());
}

DescriptorSet decode_descriptor_set(std::span<const std::uint8_t> bytes) {
  detail::ByteReader in(bytes, "descriptor file");
  in.expect_magic(kFileMagic);
  DescriptorSet set;
  set.dim_bits = in.u32();
  if (!valid_file_width(set.dim_bits)) {
    throw FormatError("descriptor file: unsupported width " + std::to_string(set.dim_bits));
  }
  const std::uint64_t count = in.u64();
  const std::size_t record_size = kRecordHeaderBytes + set.dim_bits / 8;
  if (in.remaining() / record_size < count) {
    throw FormatError("descriptor file: header announces " + std::to_string(count) +
                      " records but the file is truncated");
  }
  set.entries.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    set.entries.push_back(detail::read_entry_record(in, set.dim_bits));
  }
  if (in.remaining() != 0) {
    throw FormatError("descriptor file: " + std::to_string(in.remaining()) +
                      " bytes beyond the announced record count");
  }
  return set;
}

void write_descriptor_file(const std::string& path, const DescriptorSet& set) {
  detail::write_file_bytes(path, encode_descriptor_set(set));
}

DescriptorSet read_descriptor_file(const std::string& path) {
  return decode_descriptor_set(detail::read_file_bytes(path));
}

}  // namespace hbst
