#include "ggmlrt/random.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "ggmlrt/error.hpp"

namespace ggmlrt {
namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t RandomSource::bits(std::uint64_t i) const noexcept {
  // SplitMix64 output at state stream_id + (counter + 1) * golden.
  return mix64(stream_id_ + (offset_ + i + 1) * kGolden);
}

double RandomSource::uniform(std::uint64_t i) const noexcept {
  return (static_cast<double>(bits(i) >> 11) + 0.5) * 0x1.0p-53;
}

void RandomSource::normal_pair(std::uint64_t i, double& z0, double& z1) const noexcept {
  const double u1 = uniform(2 * i);
  const double u2 = uniform(2 * i + 1);
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  z0 = radius * std::cos(angle);
  z1 = radius * std::sin(angle);
}

RandomSource derive_stream(std::uint64_t master_seed, std::uint64_t replicate_index) noexcept {
  return RandomSource(master_seed, mix64(master_seed ^ mix64(replicate_index + kGolden)));
}

MvnDraw mvn_sample(const RandomSource& rng, std::span<const double> mean,
                   const SpdFactor& chol_sigma, std::size_t n) {
  const std::size_t p = chol_sigma.dim();
  if (mean.size() != p) throw DomainError("mean length does not match covariance dimension");
  if (n == 0) throw DomainError("mvn_sample requires n >= 1");

  const std::size_t count = n * p;
  const std::size_t pairs = (count + 1) / 2;
  std::vector<double> z(2 * pairs);
  for (std::size_t i = 0; i < pairs; ++i) rng.normal_pair(i, z[2 * i], z[2 * i + 1]);

  const DenseMatrix& l = chol_sigma.lower();
  DenseMatrix x(n, p);
  for (std::size_t r = 0; r < n; ++r) {
    const double* zr = z.data() + r * p;
    for (std::size_t i = 0; i < p; ++i) {
      double v = mean[i];
      for (std::size_t k = 0; k <= i; ++k) v += l(i, k) * zr[k];
      x(r, i) = v;
    }
  }
  return {std::move(x), rng.advanced(2 * pairs)};
}

}  // namespace ggmlrt
