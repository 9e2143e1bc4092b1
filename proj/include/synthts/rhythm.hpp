#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "synthts/core_types.hpp"
#include "synthts/random.hpp"

namespace synthts {

/// Parameters of a multi-sine rhythm. The three vectors share one length, the
/// sine count.
struct RhythmParams {
  std::vector<double> frequencies;  // cycles per sample
  std::vector<double> amplitudes;   // [0, 1]
  std::vector<double> phases;       // [0, 2*pi)

  std::size_t sine_count() const noexcept { return frequencies.size(); }
  bool operator==(const RhythmParams&) const = default;
};

struct FrequencyBand {
  double min;
  double max;
};

struct CountRange {
  std::size_t min;
  std::size_t max;
};

/// Admissible rhythm band: [1/N, 1/(2t)]. The upper end is Nyquist.
inline FrequencyBand frequency_bounds(std::size_t window_len, double sample_period = kSamplePeriod) {
  if (!(sample_period > 0.0)) throw InvalidWindow("sample period must be positive");
  const double f_min = 1.0 / static_cast<double>(window_len);
  const double f_max = 1.0 / (2.0 * sample_period);
  if (window_len < kMinWindowLen || !(f_min < f_max))
    throw InvalidWindow("window length " + std::to_string(window_len) + " leaves no usable frequency band");
  return {f_min, f_max};
}

inline RhythmParams sample_rhythm_params(std::size_t window_len, RandomStream& rng,
                                         CountRange k_range = {3, 10}) {
  if (k_range.min < 1 || k_range.min > k_range.max || k_range.max > kEngineMaxSines)
    throw ConfigError("sine count range must lie within [1, 32]");
  const auto band = frequency_bounds(window_len);
  const auto k = static_cast<std::size_t>(rng.uniform_int(k_range.min, k_range.max));

  RhythmParams p;
  p.frequencies.reserve(k);
  p.amplitudes.reserve(k);
  p.phases.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    // Closed band: both endpoints are admissible frequencies.
    p.frequencies.push_back(std::min(band.min + (band.max - band.min) * rng.uniform01(), band.max));
    p.amplitudes.push_back(rng.uniform01());
    p.phases.push_back(rng.uniform(0.0, kTwoPi));
  }
  return p;
}

/// Raw superposition sum_i a_i sin(2 pi f_i n + phi_i), n = 0..N-1.
inline SeriesWindow superpose_sines(const std::vector<double>& frequencies,
                                    const std::vector<double>& amplitudes,
                                    const std::vector<double>& phases, std::size_t window_len) {
  if (frequencies.size() != amplitudes.size() || frequencies.size() != phases.size())
    throw ShapeMismatch("sine parameter vectors differ in length");
  SeriesWindow s(window_len, 0.0);
  for (std::size_t i = 0; i < frequencies.size(); ++i) {
    const double w = kTwoPi * frequencies[i];
    for (std::size_t n = 0; n < window_len; ++n)
      s[n] += amplitudes[i] * std::sin(w * static_cast<double>(n) + phases[i]);
  }
  return s;
}

/// Superposed rhythm min-max normalized to [0, 1].
inline SeriesWindow render_rhythm(const RhythmParams& params, std::size_t window_len) {
  return normalize_unit(superpose_sines(params.frequencies, params.amplitudes, params.phases, window_len));
}

}  // namespace synthts
