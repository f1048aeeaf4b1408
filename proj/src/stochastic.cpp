#include "mfpe/stochastic.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mfpe {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t splitmix_finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t mix(std::uint64_t seed, std::uint64_t stream_id) {
  return splitmix_finalize(seed ^ splitmix_finalize(stream_id + kGolden));
}

// Largest intensity handled by a single inversion pass; larger ones are split
// into equal chunks (a sum of independent Poissons is Poisson).
constexpr double kPoissonChunk = 30.0;

std::uint64_t poisson_inversion(Rng& rng, double intensity) {
  const double u = uniform(rng);
  double p = std::exp(-intensity);
  double cdf = p;
  std::uint64_t k = 0;
  while (u > cdf) {
    ++k;
    p *= intensity / static_cast<double>(k);
    cdf += p;
    // cdf saturates below 1 when u sits in the last ulp; nothing is left to add.
    if (p == 0.0 && static_cast<double>(k) > intensity) break;
  }
  return k;
}

}  // namespace

RngStream RngStream::substream(std::uint64_t index) const { return RngStream(mix(seed_, stream_id_), index); }

Rng RngStream::engine() const {
  std::uint64_t x = mix(seed_, stream_id_);
  std::array<std::uint64_t, 4> state{};
  for (auto& word : state) {
    x += kGolden;
    word = splitmix_finalize(x);
  }
  return Rng(state);
}

double uniform(Rng& rng) {
  constexpr double kScale = 0x1.0p-53;
  return (static_cast<double>(rng() >> 11) + 0.5) * kScale;
}

double std_normal(Rng& rng) { return norm_quantile(uniform(rng)); }

std::uint64_t poisson(Rng& rng, double intensity) {
  if (!(intensity >= 0.0) || !std::isfinite(intensity)) {
    throw std::invalid_argument("poisson: intensity must be finite and >= 0, got " + std::to_string(intensity));
  }
  if (intensity == 0.0) return 0;
  if (intensity <= kPoissonChunk) return poisson_inversion(rng, intensity);

  const auto chunks = static_cast<std::uint64_t>(std::ceil(intensity / kPoissonChunk));
  const double part = intensity / static_cast<double>(chunks);
  std::uint64_t total = 0;
  for (std::uint64_t i = 0; i < chunks; ++i) total += poisson_inversion(rng, part);
  return total;
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("norm_quantile: p must lie in (0,1), got " + std::to_string(p));
  }
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

}  // namespace mfpe
