#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "hbst/descriptor.hpp"
#include "hbst/descriptor_file.hpp"
#include "hbst/oracle.hpp"

namespace hbst {

using Rng = std::mt19937_64;

BinaryDescriptor random_descriptor(std::size_t bits, Rng& rng);

// Copy of `d` with exactly `flips` distinct bits inverted.
BinaryDescriptor flip_random_bits(BinaryDescriptor d, std::size_t flips, Rng& rng);

// `count` uniform descriptors with keypoint ids 0..count-1.
std::vector<DescriptorEntry> random_entries(std::size_t count, std::size_t bits,
                                            std::uint32_t image_id, Rng& rng);

// Each query is its reference with a uniform number of flips in
// [0, max_noise]. Query image ids are offset past the reference ids.
CompletenessCorpus noisy_query_corpus(std::vector<DescriptorEntry> references,
                                      std::size_t max_noise, std::uint64_t seed);

struct CompletenessCorpusSpec {
  std::size_t num_images = 10;
  std::size_t per_image = 1000;
  std::size_t dim_bits = 256;
  std::size_t max_noise = 15;
  std::uint64_t seed = 1;
};

// Uniform references plus one noisy query per reference.
CompletenessCorpus make_completeness_corpus(const CompletenessCorpusSpec& spec);

struct LoopPair {
  std::uint32_t query = 0;
  std::uint32_t reference = 0;
  double overlap = 0.0;  // fraction of the query's descriptors copied from the reference
};

struct SyntheticSpec {
  std::size_t num_images = 2;
  std::size_t descriptors_per_image = 1000;
  std::size_t dim_bits = 256;
  std::vector<LoopPair> loop_pairs;
  std::size_t noise_bits = 0;      // each copy gets a uniform number of flips in [0, noise_bits]
  std::uint64_t seed = 0;
  double truth_min_overlap = 0.10;  // planted pairs whose copied fraction exceeds this form the truth

  // Throws UsageError with a message naming the bad field.
  void validate() const;
};

struct SyntheticSequence {
  DescriptorSet descriptors;  // image-major, ids 0..num_images-1
  std::vector<std::pair<std::uint32_t, std::uint32_t>> truth;  // sorted (query, reference)
};

// Images are uniform random except for the planted overlaps: for each loop
// pair, round(overlap * descriptors_per_image) of the query's keypoints are
// noisy copies of distinct keypoints of the reference. Deterministic in seed.
SyntheticSequence generate_sequence(const SyntheticSpec& spec);

}  // namespace hbst
