#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

#if defined(__AVX512F__) && defined(__AVX512VPOPCNTDQ__)
#include <immintrin.h>
#define HBST_PACKED_AVX512 1
#endif

#include "hbst/descriptor.hpp"

namespace hbst::detail {

// Descriptors stored row-major for linear scans, padded to whole blocks of
// kBlock rows so block kernels never read past the end.
class PackedDescriptors {
 public:
  static constexpr std::size_t kBlock = 8;

  explicit PackedDescriptors(std::size_t bits) : bits_(bits), words_per_((bits + 63) / 64) {}

  void reserve(std::size_t n) { words_.reserve((n / kBlock + 1) * kBlock * words_per_); }

  void push_back(const BinaryDescriptor& d) {
    require_same_width(bits_, d.bits(), "packed scan");
    if (size_ % kBlock == 0) words_.resize(words_.size() + kBlock * words_per_, 0);
    const auto w = d.words();
    std::copy_n(w.begin(), words_per_, words_.begin() + size_ * words_per_);
    ++size_;
  }

  std::size_t size() const noexcept { return size_; }
  std::size_t bits() const noexcept { return bits_; }

  std::uint32_t distance(std::size_t row, const BinaryDescriptor& query) const noexcept {
    const std::uint64_t* p = words_.data() + row * words_per_;
    const auto q = query.words();
    std::uint32_t d = 0;
    for (std::size_t w = 0; w < words_per_; ++w) {
      d += static_cast<std::uint32_t>(std::popcount(p[w] ^ q[w]));
    }
    return d;
  }

  // visit(row, distance) for every row in [begin, end) within tau, in order.
  template <typename Visit>
  void scan(const BinaryDescriptor& query, std::size_t begin, std::size_t end, std::uint32_t tau,
            Visit&& visit) const {
    std::uint64_t d[kBlock];
    std::size_t row = begin;
    while (row < end) {
      const std::size_t block = row / kBlock;
      const unsigned hits = block_within(query, block, tau, d);
      const std::size_t stop = std::min(end, (block + 1) * kBlock);
      if (hits != 0) {
        for (; row < stop; ++row) {
          if ((hits >> (row % kBlock)) & 1u) visit(row, static_cast<std::uint32_t>(d[row % kBlock]));
        }
      }
      row = stop;
    }
  }

  // True if some row in [begin, end) is within tau.
  bool any_within(const BinaryDescriptor& query, std::size_t begin, std::size_t end,
                  std::uint32_t tau) const noexcept {
    std::uint64_t d[kBlock];
    std::size_t row = begin;
    while (row < end) {
      const std::size_t block = row / kBlock;
      unsigned hits = block_within(query, block, tau, d);
      const std::size_t stop = std::min(end, (block + 1) * kBlock);
      // drop lanes outside [row, stop)
      hits &= (0xffu << (row % kBlock)) & (0xffu >> ((block + 1) * kBlock - stop));
      if (hits != 0) return true;
      row = stop;
    }
    return false;
  }

 private:
  // Distances of the kBlock rows of a block into d; returns the lane mask of
  // rows within tau. Padding rows are zero and may be reported, callers clip.
  unsigned block_within(const BinaryDescriptor& query, std::size_t block, std::uint32_t tau,
                        std::uint64_t (&d)[kBlock]) const noexcept {
    const std::uint64_t* base = words_.data() + block * kBlock * words_per_;
    const auto q = query.words();
#ifdef HBST_PACKED_AVX512
    if (words_per_ == 4) {
      const __m512i qv = _mm512_broadcast_i64x4(_mm256_loadu_si256(reinterpret_cast<const __m256i*>(q.data())));
      __m512i c[4];
      for (int k = 0; k < 4; ++k) {
        c[k] = _mm512_popcnt_epi64(_mm512_xor_si512(_mm512_loadu_si512(base + 8 * k), qv));
      }
      // three rounds of pairwise lane sums turn 4 words x 8 rows into 8 rows
      const __m512i even = _mm512_set_epi64(14, 12, 10, 8, 6, 4, 2, 0);
      const __m512i odd = _mm512_set_epi64(15, 13, 11, 9, 7, 5, 3, 1);
      const __m512i ab = _mm512_add_epi64(_mm512_permutex2var_epi64(c[0], even, c[1]),
                                          _mm512_permutex2var_epi64(c[0], odd, c[1]));
      const __m512i ce = _mm512_add_epi64(_mm512_permutex2var_epi64(c[2], even, c[3]),
                                          _mm512_permutex2var_epi64(c[2], odd, c[3]));
      const __m512i sum = _mm512_add_epi64(_mm512_permutex2var_epi64(ab, even, ce),
                                           _mm512_permutex2var_epi64(ab, odd, ce));
      _mm512_storeu_si512(d, sum);
      return _mm512_cmple_epu64_mask(sum, _mm512_set1_epi64(tau));
    }
#endif
    unsigned hits = 0;
    for (std::size_t j = 0; j < kBlock; ++j) {
      const std::uint64_t* p = base + j * words_per_;
      std::uint64_t s = 0;
      for (std::size_t w = 0; w < words_per_; ++w) s += std::popcount(p[w] ^ q[w]);
      d[j] = s;
      if (s <= tau) hits |= 1u << j;
    }
    return hits;
  }

  std::size_t bits_;
  std::size_t words_per_;
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace hbst::detail
