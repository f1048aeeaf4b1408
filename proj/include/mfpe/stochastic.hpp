#pragma once

// Seeded, splittable random streams and the primitive samplers used by every
// Monte Carlo routine in the library.
//
// An RngStream is an immutable (seed, stream_id) descriptor. Generators are
// derived from it on demand, so a simulation path only depends on the
// descriptor it was handed, never on which thread consumed it.

#include <array>
#include <cstdint>
#include <limits>

namespace mfpe {

/// xoshiro256** engine. Satisfies UniformRandomBitGenerator.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::array<std::uint64_t, 4> state) : s_(state) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::array<std::uint64_t, 4> s_;
};

class RngStream {
 public:
  constexpr explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
      : seed_(seed), stream_id_(stream_id) {}

  constexpr std::uint64_t seed() const { return seed_; }
  constexpr std::uint64_t stream_id() const { return stream_id_; }

  /// Child stream `index` of this stream. Children of distinct parents, or
  /// distinct children of one parent, get unrelated generator states.
  RngStream substream(std::uint64_t index) const;

  /// A fresh generator positioned at the start of this stream.
  Rng engine() const;

  friend constexpr bool operator==(const RngStream&, const RngStream&) = default;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
};

/// Uniform draw strictly inside (0,1), 53 bits of resolution.
double uniform(Rng& rng);

/// Standard normal draw by inversion of one uniform.
double std_normal(Rng& rng);

/// Poisson(intensity) draw by sequential inversion. Throws on negative intensity.
std::uint64_t poisson(Rng& rng, double intensity);

/// Standard normal CDF.
double norm_cdf(double x);

/// Inverse of norm_cdf. Throws std::domain_error unless 0 < p < 1.
double norm_quantile(double p);

}  // namespace mfpe
