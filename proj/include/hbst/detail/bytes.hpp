#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hbst/error.hpp"

namespace hbst::detail {

class ByteWriter {
 public:
  void put_bytes(std::span<const std::uint8_t> bytes) { out_.insert(out_.end(), bytes.begin(), bytes.end()); }
  void put_magic(std::string_view magic) { out_.insert(out_.end(), magic.begin(), magic.end()); }
  void put_u8(std::uint8_t v) { out_.push_back(v); }
  void put_u16(std::uint16_t v) { put_le(v); }
  void put_u32(std::uint32_t v) { put_le(v); }
  void put_u64(std::uint64_t v) { put_le(v); }
  void put_f32(float v) { put_le(std::bit_cast<std::uint32_t>(v)); }

  std::vector<std::uint8_t>& buffer() noexcept { return out_; }

 private:
  template <typename T>
  void put_le(T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
  }

  std::vector<std::uint8_t> out_;
};

// Bounds-checked little-endian reader; every overrun is a FormatError.
class ByteReader {
 public:
  ByteReader(std::span<const std::uint8_t> bytes, std::string context)
      : bytes_(bytes), context_(std::move(context)) {}

  std::span<const std::uint8_t> take(std::size_t n) {
    if (remaining() < n) {
      throw FormatError(context_ + ": truncated stream (need " + std::to_string(n) +
                        " bytes at offset " + std::to_string(pos_) + ")");
    }
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }
  void expect_magic(std::string_view magic) {
    auto got = take(magic.size());
    if (std::memcmp(got.data(), magic.data(), magic.size()) != 0) {
      throw FormatError(context_ + ": bad magic, expected \"" + std::string(magic) + "\"");
    }
  }
  std::uint8_t u8() { return take(1)[0]; }
  std::uint16_t u16() { return get_le<std::uint16_t>(); }
  std::uint32_t u32() { return get_le<std::uint32_t>(); }
  std::uint64_t u64() { return get_le<std::uint64_t>(); }
  float f32() { return std::bit_cast<float>(get_le<std::uint32_t>()); }

  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }
  std::size_t offset() const noexcept { return pos_; }
  const std::string& context() const noexcept { return context_; }

 private:
  template <typename T>
  T get_le() {
    auto raw = take(sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<T>(static_cast<T>(raw[i]) << (8 * i));
    }
    return v;
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
  std::string context_;
};

std::vector<std::uint8_t> read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path, std::span<const std::uint8_t> bytes);

}  // namespace hbst::detail
