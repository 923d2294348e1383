#include <doctest.h>

#include <algorithm>
#include <vector>

#include "hbst/descriptor.hpp"
#include "hbst/synthetic.hpp"
#include "support.hpp"

using hbst::BinaryDescriptor;

TEST_CASE("hamming of a descriptor with itself is zero") {
  hbst::Rng rng(3);
  const auto x = hbst::random_descriptor(256, rng);
  CHECK(hbst::hamming(x, x) == 0);
}

TEST_CASE("hamming of complementary 4-bit descriptors") {
  CHECK(hbst::hamming(BinaryDescriptor::from_string("0000"), BinaryDescriptor::from_string("1111")) == 4);
}

TEST_CASE("hamming of 10110010 and 10011010") {
  // XOR is 00101000: two differing positions.
  const auto a = BinaryDescriptor::from_string("10110010");
  const auto b = BinaryDescriptor::from_string("10011010");
  CHECK(test::naive_hamming(a, b) == 2);
  CHECK(hbst::hamming(a, b) == 2);
}

TEST_CASE("hamming rejects mixed widths") {
  CHECK_THROWS_AS(hbst::hamming(BinaryDescriptor(128), BinaryDescriptor(256)), hbst::UsageError);
}

TEST_CASE("hamming agrees with a bit-by-bit loop on random pairs") {
  hbst::Rng rng(11);
  for (const std::size_t bits : {8u, 128u, 200u, 256u, 512u}) {
    for (int i = 0; i < 500; ++i) {
      const auto a = hbst::random_descriptor(bits, rng);
      const auto b = hbst::random_descriptor(bits, rng);
      const auto d = hbst::hamming(a, b);
      REQUIRE(d == test::naive_hamming(a, b));
      REQUIRE(d == hbst::hamming(b, a));
      REQUIRE(d <= bits);
      REQUIRE((d == 0) == (a == b));
    }
  }
}

TEST_CASE("hamming satisfies the triangle inequality") {
  hbst::Rng rng(5);
  for (int i = 0; i < 2000; ++i) {
    const auto a = hbst::random_descriptor(256, rng);
    // near neighbours make the bound tight more often than independent draws
    const auto b = hbst::flip_random_bits(a, rng() % 40, rng);
    const auto c = hbst::flip_random_bits(b, rng() % 40, rng);
    REQUIRE(hbst::hamming(a, c) <= hbst::hamming(a, b) + hbst::hamming(b, c));
  }
}

TEST_CASE("bit order: character k is bit k, LSB first within bytes") {
  const auto d = BinaryDescriptor::from_string("1000000001000000");
  CHECK(d.bit(0));
  CHECK(d.bit(9));
  CHECK_FALSE(d.bit(1));
  const auto bytes = d.to_bytes();
  REQUIRE(bytes.size() == 2);
  CHECK(bytes[0] == 0x01);
  CHECK(bytes[1] == 0x02);
  CHECK(BinaryDescriptor::from_bytes(16, bytes) == d);
  CHECK(d.to_string() == "1000000001000000");
}

TEST_CASE("from_bytes ignores padding bits") {
  const std::vector<std::uint8_t> bytes{0xff};
  const auto d = BinaryDescriptor::from_bytes(4, bytes);
  CHECK(d == BinaryDescriptor::from_string("1111"));
}

TEST_CASE("from_string rejects other characters") {
  CHECK_THROWS_AS(BinaryDescriptor::from_string("01x1"), hbst::UsageError);
}

TEST_CASE("bit_statistics of a complement pair") {
  const std::vector<BinaryDescriptor> ds{BinaryDescriptor::from_string("0000"),
                                         BinaryDescriptor::from_string("1111")};
  const auto s = hbst::bit_statistics(ds);
  CHECK(s.counts == std::vector<std::uint32_t>{1, 1, 1, 1});
  CHECK(s.total == 2);
}

TEST_CASE("bit_statistics of duplicates") {
  const std::vector<BinaryDescriptor> ds{BinaryDescriptor::from_string("1000"),
                                         BinaryDescriptor::from_string("1000")};
  const auto s = hbst::bit_statistics(ds);
  CHECK(s.counts == std::vector<std::uint32_t>{2, 0, 0, 0});
  CHECK(s.total == 2);
}

TEST_CASE("bit_statistics of 1010, 0110, 0011") {
  // columns: bit0 {1,0,0}, bit1 {0,1,0}, bit2 {1,1,1}, bit3 {0,0,1}
  const std::vector<BinaryDescriptor> ds{BinaryDescriptor::from_string("1010"),
                                         BinaryDescriptor::from_string("0110"),
                                         BinaryDescriptor::from_string("0011")};
  const auto s = hbst::bit_statistics(ds);
  CHECK(s.counts == std::vector<std::uint32_t>{1, 1, 3, 1});
  CHECK(s.total == 3);
}

TEST_CASE("bit_statistics errors") {
  CHECK_THROWS_AS(hbst::bit_statistics(std::vector<BinaryDescriptor>{}), hbst::UsageError);
  const std::vector<BinaryDescriptor> mixed{BinaryDescriptor(8), BinaryDescriptor(16)};
  CHECK_THROWS_AS(hbst::bit_statistics(mixed), hbst::UsageError);
}

TEST_CASE("bit_statistics is permutation invariant and bounded") {
  hbst::Rng rng(21);
  std::vector<BinaryDescriptor> ds;
  for (int i = 0; i < 200; ++i) ds.push_back(hbst::random_descriptor(128, rng));
  const auto s = hbst::bit_statistics(ds);
  for (int round = 0; round < 20; ++round) {
    std::shuffle(ds.begin(), ds.end(), rng);
    const auto p = hbst::bit_statistics(ds);
    REQUIRE(p.counts == s.counts);
    REQUIRE(p.total == s.total);
  }
  for (std::size_t k = 0; k < 128; ++k) {
    std::uint32_t expected = 0;
    for (const auto& d : ds) expected += d.bit(k) ? 1u : 0u;
    REQUIRE(s.counts[k] == expected);
    REQUIRE(s.counts[k] <= s.total);
  }
}
