#pragma once

#include <cstdint>
#include <span>

#include "ggmlrt/matrix.hpp"

namespace ggmlrt {

// SplitMix64 finalizer (Steele, Lea & Flood). Bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t z) noexcept;

// Immutable, counter-based descriptor of a uniform stream. Draw `i` is a pure
// function of (stream_id, offset + i), so any consumer can reproduce it
// regardless of scheduling. Consuming draws yields a new descriptor.
class RandomSource {
 public:
  RandomSource(std::uint64_t master_seed, std::uint64_t stream_id,
               std::uint64_t offset = 0) noexcept
      : master_seed_(master_seed), stream_id_(stream_id), offset_(offset) {}

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  std::uint64_t offset() const noexcept { return offset_; }

  // 64 raw bits / a uniform on the open interval (0, 1) at position offset + i.
  std::uint64_t bits(std::uint64_t i) const noexcept;
  double uniform(std::uint64_t i) const noexcept;

  // Standard normal pair from uniforms 2i and 2i+1 (Box-Muller).
  void normal_pair(std::uint64_t i, double& z0, double& z1) const noexcept;

  RandomSource advanced(std::uint64_t count) const noexcept {
    return RandomSource(master_seed_, stream_id_, offset_ + count);
  }

  bool operator==(const RandomSource&) const = default;

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
  std::uint64_t offset_;
};

// stream_id = mix64(master_seed ^ mix64(replicate_index + golden)):
// injective in replicate_index for a fixed master seed.
RandomSource derive_stream(std::uint64_t master_seed, std::uint64_t replicate_index) noexcept;

struct MvnDraw {
  DenseMatrix x;
  RandomSource next;  // source positioned after the consumed uniforms
};

// n rows of mean + L z, z standard normal.
MvnDraw mvn_sample(const RandomSource& rng, std::span<const double> mean,
                   const SpdFactor& chol_sigma, std::size_t n);

}  // namespace ggmlrt
