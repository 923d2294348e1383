#include "hbst/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace hbst {

BinaryDescriptor random_descriptor(std::size_t bits, Rng& rng) {
  BinaryDescriptor d(bits);
  for (std::size_t k = 0; k < bits; k += 64) {
    std::uint64_t word = rng();
    for (std::size_t b = 0; b < 64 && k + b < bits; ++b) {
      d.set_bit(k + b, (word >> b) & 1u);
    }
  }
  return d;
}

BinaryDescriptor flip_random_bits(BinaryDescriptor d, std::size_t flips, Rng& rng) {
  if (flips > d.bits()) throw UsageError("cannot flip more bits than the descriptor has");
  std::vector<std::size_t> positions(d.bits());
  std::iota(positions.begin(), positions.end(), std::size_t{0});
  // Partial Fisher-Yates: the first `flips` positions are a uniform sample.
  for (std::size_t i = 0; i < flips; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, positions.size() - 1);
    std::swap(positions[i], positions[pick(rng)]);
    d.flip_bit(positions[i]);
  }
  return d;
}

std::vector<DescriptorEntry> random_entries(std::size_t count, std::size_t bits,
                                            std::uint32_t image_id, Rng& rng) {
  std::vector<DescriptorEntry> entries(count);
  for (std::size_t i = 0; i < count; ++i) {
    entries[i].descriptor = random_descriptor(bits, rng);
    entries[i].image_id = image_id;
    entries[i].keypoint_id = static_cast<std::uint32_t>(i);
  }
  return entries;
}

CompletenessCorpus noisy_query_corpus(std::vector<DescriptorEntry> references,
                                      std::size_t max_noise, std::uint64_t seed) {
  Rng rng(seed);
  std::uint32_t id_offset = 0;
  for (const auto& r : references) id_offset = std::max(id_offset, r.image_id + 1);
  std::uniform_int_distribution<std::size_t> noise(0, max_noise);

  CompletenessCorpus corpus;
  corpus.queries.reserve(references.size());
  for (const auto& r : references) {
    DescriptorEntry q = r;
    q.image_id = r.image_id + id_offset;
    q.descriptor = flip_random_bits(r.descriptor, std::min(noise(rng), r.descriptor.bits()), rng);
    corpus.queries.push_back(std::move(q));
  }
  corpus.references = std::move(references);
  return corpus;
}

CompletenessCorpus make_completeness_corpus(const CompletenessCorpusSpec& spec) {
  Rng rng(spec.seed);
  std::vector<DescriptorEntry> references;
  references.reserve(spec.num_images * spec.per_image);
  for (std::size_t i = 0; i < spec.num_images; ++i) {
    auto image = random_entries(spec.per_image, spec.dim_bits, static_cast<std::uint32_t>(i), rng);
    references.insert(references.end(), image.begin(), image.end());
  }
  return noisy_query_corpus(std::move(references), spec.max_noise, rng());
}

void SyntheticSpec::validate() const {
  if (num_images == 0) throw UsageError("num_images must be positive");
  if (descriptors_per_image == 0) throw UsageError("descriptors_per_image must be positive");
  if (dim_bits == 0 || dim_bits % 8 != 0 || dim_bits > kMaxDescriptorBits) {
    throw UsageError("dim_bits must be a multiple of 8 in [8, 512]");
  }
  if (noise_bits > dim_bits) throw UsageError("noise_bits exceeds dim_bits");
  std::vector<double> planted(num_images, 0.0);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> seen;
  for (const auto& pair : loop_pairs) {
    if (pair.query >= num_images || pair.reference >= num_images) {
      throw UsageError("loop pair " + std::to_string(pair.query) + "," +
                       std::to_string(pair.reference) + " names an image out of range");
    }
    if (pair.reference >= pair.query) {
      throw UsageError("loop pair query must come after its reference");
    }
    if (!(pair.overlap >= 0.0 && pair.overlap <= 1.0)) {
      throw UsageError("loop pair overlap must lie in [0, 1]");
    }
    if (std::find(seen.begin(), seen.end(), std::pair{pair.query, pair.reference}) != seen.end()) {
      throw UsageError("duplicate loop pair");
    }
    seen.emplace_back(pair.query, pair.reference);
    planted[pair.query] += std::round(pair.overlap * static_cast<double>(descriptors_per_image));
  }
  for (std::size_t i = 0; i < num_images; ++i) {
    if (planted[i] > static_cast<double>(descriptors_per_image)) {
      throw UsageError("loop pairs of image " + std::to_string(i) + " overlap more than 100%");
    }
  }
}

SyntheticSequence generate_sequence(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  std::uniform_int_distribution<std::size_t> noise(0, spec.noise_bits);
  const std::size_t n = spec.descriptors_per_image;

  SyntheticSequence out;
  out.descriptors.dim_bits = spec.dim_bits;
  out.descriptors.entries.reserve(spec.num_images * n);
  for (std::size_t image = 0; image < spec.num_images; ++image) {
    const auto id = static_cast<std::uint32_t>(image);
    auto entries = random_entries(n, spec.dim_bits, id, rng);
    std::size_t slot = 0;
    for (const auto& pair : spec.loop_pairs) {
      if (pair.query != id) continue;
      const auto copies = static_cast<std::size_t>(std::round(pair.overlap * static_cast<double>(n)));
      std::vector<std::size_t> source(n);
      std::iota(source.begin(), source.end(), std::size_t{0});
      std::shuffle(source.begin(), source.end(), rng);
      const std::size_t base = pair.reference * n;
      for (std::size_t c = 0; c < copies; ++c, ++slot) {
        entries[slot].descriptor = flip_random_bits(
            out.descriptors.entries[base + source[c]].descriptor, noise(rng), rng);
      }
      if (static_cast<double>(copies) / static_cast<double>(n) > spec.truth_min_overlap) {
        out.truth.emplace_back(pair.query, pair.reference);
      }
    }
    out.descriptors.entries.insert(out.descriptors.entries.end(), entries.begin(), entries.end());
  }
  std::sort(out.truth.begin(), out.truth.end());
  return out;
}

}  // namespace hbst
