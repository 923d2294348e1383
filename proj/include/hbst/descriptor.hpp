#pragma once

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hbst/error.hpp"

namespace hbst {

inline constexpr std::size_t kMaxDescriptorBits = 512;
inline constexpr std::size_t kMaxDescriptorWords = kMaxDescriptorBits / 64;

// Fixed-width bit vector stored inline. Bit k lives in bit (k % 8) of byte
// (k / 8), least significant bit first; words are the little-endian packing
// of those bytes, so bit k is also bit (k % 64) of word (k / 64).
//
// Widths of 1..512 bits are representable. File formats additionally require
// a multiple of 8.
class BinaryDescriptor {
 public:
  BinaryDescriptor() = default;

  // All-zero descriptor of the given width.
  explicit BinaryDescriptor(std::size_t bits);

  // Packed bytes, ceil(bits / 8) of them. Padding bits of the last byte are
  // ignored.
  static BinaryDescriptor from_bytes(std::size_t bits, std::span<const std::uint8_t> bytes);

  // "0110..." where character k is bit k.
  static BinaryDescriptor from_string(std::string_view bit_chars);

  std::size_t bits() const noexcept { return bits_; }
  std::size_t byte_count() const noexcept { return (bits_ + 7) / 8; }
  std::size_t word_count() const noexcept { return (bits_ + 63) / 64; }
  bool empty() const noexcept { return bits_ == 0; }

  bool bit(std::size_t k) const noexcept { return (words_[k >> 6] >> (k & 63)) & 1u; }
  void set_bit(std::size_t k, bool value) noexcept {
    const std::uint64_t mask = std::uint64_t{1} << (k & 63);
    if (value) {
      words_[k >> 6] |= mask;
    } else {
      words_[k >> 6] &= ~mask;
    }
  }
  void flip_bit(std::size_t k) noexcept { words_[k >> 6] ^= std::uint64_t{1} << (k & 63); }

  std::span<const std::uint64_t> words() const noexcept { return {words_.data(), word_count()}; }

  void write_bytes(std::span<std::uint8_t> out) const;
  std::vector<std::uint8_t> to_bytes() const;
  std::string to_string() const;

  friend bool operator==(const BinaryDescriptor&, const BinaryDescriptor&) = default;

 private:
  std::array<std::uint64_t, kMaxDescriptorWords> words_{};
  std::uint32_t bits_ = 0;
};

struct KeypointXY {
  float x = 0.0F;
  float y = 0.0F;
  friend bool operator==(const KeypointXY&, const KeypointXY&) = default;
};

// A descriptor together with where it came from.
struct DescriptorEntry {
  BinaryDescriptor descriptor;
  std::uint32_t image_id = 0;
  std::uint32_t keypoint_id = 0;
  KeypointXY keypoint;

  friend bool operator==(const DescriptorEntry&, const DescriptorEntry&) = default;
};

// Identity of an entry inside a corpus.
inline std::pair<std::uint32_t, std::uint32_t> entry_key(const DescriptorEntry& e) noexcept {
  return {e.image_id, e.keypoint_id};
}

struct BitStatistics {
  std::vector<std::uint32_t> counts;  // per-bit number of set bits
  std::size_t total = 0;

  std::size_t bits() const noexcept { return counts.size(); }
  double mean(std::size_t k) const noexcept {
    return static_cast<double>(counts[k]) / static_cast<double>(total);
  }
  void add(const BinaryDescriptor& d);
};

// Number of differing bits, without the width check.
inline std::uint32_t hamming_unchecked(const BinaryDescriptor& a, const BinaryDescriptor& b) noexcept {
  const auto wa = a.words();
  const auto wb = b.words();
  std::uint32_t distance = 0;
  for (std::size_t i = 0; i < wa.size(); ++i) {
    distance += static_cast<std::uint32_t>(std::popcount(wa[i] ^ wb[i]));
  }
  return distance;
}

// Throws UsageError on width mismatch.
std::uint32_t hamming(const BinaryDescriptor& a, const BinaryDescriptor& b);

// Throws UsageError on an empty sequence or mixed widths.
BitStatistics bit_statistics(std::span<const BinaryDescriptor> descriptors);
BitStatistics bit_statistics(std::span<const DescriptorEntry> entries);

// Common width of all entries, 0 when empty. Throws UsageError on mixed widths.
std::size_t uniform_width(std::span<const DescriptorEntry> entries);

void require_same_width(std::size_t expected, std::size_t actual, std::string_view what);

}  // namespace hbst
