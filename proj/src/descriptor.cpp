#include "hbst/descriptor.hpp"

#include <string>

namespace hbst {

BinaryDescriptor::BinaryDescriptor(std::size_t bits) {
  if (bits == 0 || bits > kMaxDescriptorBits) {
    throw UsageError("descriptor width must be in [1, " + std::to_string(kMaxDescriptorBits) +
                     "], got " + std::to_string(bits));
  }
  bits_ = static_cast<std::uint32_t>(bits);
}

BinaryDescriptor BinaryDescriptor::from_bytes(std::size_t bits, std::span<const std::uint8_t> bytes) {
  BinaryDescriptor d(bits);
  if (bytes.size() != d.byte_count()) {
    throw UsageError("expected " + std::to_string(d.byte_count()) + " descriptor bytes, got " +
                     std::to_string(bytes.size()));
  }
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    d.words_[i / 8] |= std::uint64_t{bytes[i]} << (8 * (i % 8));
  }
  if (bits % 64 != 0) {
    d.words_[bits / 64] &= (std::uint64_t{1} << (bits % 64)) - 1;
  }
  return d;
}

BinaryDescriptor BinaryDescriptor::from_string(std::string_view bit_chars) {
  BinaryDescriptor d(bit_chars.size());
  for (std::size_t k = 0; k < bit_chars.size(); ++k) {
    const char c = bit_chars[k];
    if (c != '0' && c != '1') {
      throw UsageError("descriptor string may contain only '0' and '1'");
    }
    d.set_bit(k, c == '1');
  }
  return d;
}

void BinaryDescriptor::write_bytes(std::span<std::uint8_t> out) const {
  if (out.size() != byte_count()) {
    throw UsageError("output buffer does not match descriptor byte count");
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(words_[i / 8] >> (8 * (i % 8)));
  }
}

std::vector<std::uint8_t> BinaryDescriptor::to_bytes() const {
  std::vector<std::uint8_t> out(byte_count());
  write_bytes(out);
  return out;
}

std::string BinaryDescriptor::to_string() const {
  std::string s(bits_, '0');
  for (std::size_t k = 0; k < bits_; ++k) {
    if (bit(k)) s[k] = '1';
  }
  return s;
}

void BitStatistics::add(const BinaryDescriptor& d) {
  const auto words = d.words();
  for (std::size_t w = 0; w < words.size(); ++w) {
    std::uint64_t word = words[w];
    while (word != 0) {
      const int offset = std::countr_zero(word);
      ++counts[w * 64 + static_cast<std::size_t>(offset)];
      word &= word - 1;
    }
  }
  ++total;
}

void require_same_width(std::size_t expected, std::size_t actual, std::string_view what) {
  if (expected != actual) {
    throw UsageError(std::string(what) + ": descriptor width mismatch (" + std::to_string(expected) +
                     " vs " + std::to_string(actual) + " bits)");
  }
}

std::uint32_t hamming(const BinaryDescriptor& a, const BinaryDescriptor& b) {
  require_same_width(a.bits(), b.bits(), "hamming");
  return hamming_unchecked(a, b);
}

BitStatistics bit_statistics(std::span<const BinaryDescriptor> descriptors) {
  if (descriptors.empty()) {
    throw UsageError("bit_statistics: empty descriptor sequence");
  }
  BitStatistics stats;
  stats.counts.assign(descriptors.front().bits(), 0);
  for (const auto& d : descriptors) {
    require_same_width(stats.bits(), d.bits(), "bit_statistics");
    stats.add(d);
  }
  return stats;
}

BitStatistics bit_statistics(std::span<const DescriptorEntry> entries) {
  if (entries.empty()) {
    throw UsageError("bit_statistics: empty descriptor sequence");
  }
  BitStatistics stats;
  stats.counts.assign(entries.front().descriptor.bits(), 0);
  for (const auto& e : entries) {
    require_same_width(stats.bits(), e.descriptor.bits(), "bit_statistics");
    stats.add(e.descriptor);
  }
  return stats;
}

std::size_t uniform_width(std::span<const DescriptorEntry> entries) {
  if (entries.empty()) return 0;
  const std::size_t width = entries.front().descriptor.bits();
  for (const auto& e : entries) {
    require_same_width(width, e.descriptor.bits(), "corpus");
  }
  return width;
}

}  // namespace hbst
