#pragma once

/**
 * @file random.hpp
 * @brief Counter-based random streams keyed by (seed, stream id).
 *
 * Every random draw in the engine goes through a RandomStream. A stream is a
 * SplitMix64-style counter generator: the n-th output is a bijective mix of
 * `origin + n * gamma`, where both the origin and the (odd) gamma are derived
 * from the key. Two streams with different keys therefore do not share a
 * prefix, and any stream can be re-created from its key alone, which makes
 * sample k reproducible regardless of generation order or thread count.
 */

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace synthts {

namespace detail {

/// Stafford "Mix13" finalizer (the SplitMix64 output function).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Odd increment with enough bit transitions to avoid weak gammas.
constexpr std::uint64_t mix_gamma(std::uint64_t z) noexcept {
  z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdULL;
  z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ULL;
  z = (z ^ (z >> 33)) | 1ULL;
  if (std::popcount(z ^ (z >> 1)) < 24) z ^= 0xaaaaaaaaaaaaaaaaULL;
  return z;
}

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

}  // namespace detail

/// Combine two 64-bit values into one well-mixed key.
constexpr std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) noexcept {
  return detail::mix64(detail::mix64(a + detail::kGolden) ^ (b * detail::kGolden + 0x632be59bd9b4e019ULL));
}

/// Satisfies UniformRandomBitGenerator, so it plugs into <random> distributions.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
      : state_(detail::mix64(hash_combine(seed, stream_id))),
        gamma_(detail::mix_gamma(hash_combine(stream_id ^ 0x5851f42d4c957f2dULL, seed))) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    state_ += gamma_;
    return detail::mix64(state_);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform on [lo, hi). Never returns hi.
  double uniform(double lo, double hi) noexcept {
    double v = lo + (hi - lo) * uniform01();
    return v < hi ? v : std::nextafter(hi, lo);
  }

  /// Uniform on (lo, hi]. Used where the lower end is excluded, e.g. multipliers > 1.
  double uniform_open_closed(double lo, double hi) noexcept {
    double v = hi - (hi - lo) * uniform01();
    return v > lo ? v : std::nextafter(lo, hi);
  }

  /// Uniform integer on [lo, hi], unbiased (rejection sampling).
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) noexcept {
    const std::uint64_t span = hi - lo;
    if (span == std::numeric_limits<std::uint64_t>::max()) return (*this)();
    const std::uint64_t range = span + 1;
    const std::uint64_t limit = max() - max() % range;
    std::uint64_t x;
    do {
      x = (*this)();
    } while (x >= limit);
    return lo + x % range;
  }

  bool bernoulli(double p) noexcept { return uniform01() < p; }

 private:
  std::uint64_t state_;
  std::uint64_t gamma_;
};

inline RandomStream seeded_rng(std::uint64_t seed, std::uint64_t stream_id) noexcept {
  return RandomStream(seed, stream_id);
}

/// Sub-stream tags for the independent random decisions made per sample.
enum class StreamTag : std::uint64_t {
  RhythmSpec = 1,
  NoiseSpec = 2,
  NoiseRender = 3,
  TrendSpec = 4,
  TrendRender = 5,
  Ratios = 6,
};

/// Stream id for one component of one sample.
constexpr std::uint64_t component_stream_id(std::uint64_t sample_key, StreamTag tag) noexcept {
  return hash_combine(sample_key, static_cast<std::uint64_t>(tag));
}

/// Sample key for sample `index` of streaming epoch `epoch`. Lives in a hashed
/// domain, disjoint in practice from the small raw indices used by batch datasets.
constexpr std::uint64_t epoch_sample_key(std::uint64_t epoch, std::uint64_t index) noexcept {
  return hash_combine(hash_combine(0x65706f6368ULL /* "epoch" */, epoch), index);
}

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace synthts
