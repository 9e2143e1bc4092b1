#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <variant>
#include <vector>

#include "synthts/core_types.hpp"
#include "synthts/noise.hpp"
#include "synthts/random.hpp"
#include "synthts/rhythm.hpp"

namespace synthts {

enum class TrendMethod : std::uint8_t { MultiSine = 0, SmoothedNoise = 1 };

/// Few slow sines; every frequency is below 1/N so no component completes a
/// full cycle inside the window.
struct MultiSineTrend {
  std::vector<double> frequencies;
  std::vector<double> amplitudes;
  std::vector<double> phases;
  double period_multiplier = 2.0;  // > 1; frequencies were divided by it

  std::size_t sine_count() const noexcept { return frequencies.size(); }
  bool operator==(const MultiSineTrend&) const = default;
};

/// Noise pipeline with a kernel far wider than any noise kernel.
struct SmoothedNoiseTrend {
  NoiseSpec inner;
  bool operator==(const SmoothedNoiseTrend&) const = default;
};

struct TrendSpec {
  std::variant<MultiSineTrend, SmoothedNoiseTrend> shape;

  TrendMethod method() const noexcept {
    return std::holds_alternative<MultiSineTrend>(shape) ? TrendMethod::MultiSine : TrendMethod::SmoothedNoise;
  }
  bool operator==(const TrendSpec&) const = default;
};

struct KernelRange {
  std::size_t min;
  std::size_t max;
};

/// [ceil(min_frac * N), ceil(max_frac * N)], capped at N.
inline KernelRange trend_kernel_range(std::size_t window_len, double min_frac = 0.2, double max_frac = 0.5) {
  auto up = [&](double frac) {
    const auto k = static_cast<std::size_t>(std::ceil(frac * static_cast<double>(window_len) - 1e-9));
    return std::clamp<std::size_t>(k, 1, window_len);
  };
  return {up(min_frac), up(max_frac)};
}

inline TrendSpec sample_trend_spec(std::size_t window_len, RandomStream& rng, const EngineConfig& config = {}) {
  require_window(window_len);
  const double n = static_cast<double>(window_len);
  if (rng.bernoulli(0.5)) {
    MultiSineTrend t;
    const auto k = static_cast<std::size_t>(rng.uniform_int(config.trend_k_min, config.trend_k_max));
    t.period_multiplier = rng.uniform_open_closed(1.0, config.trend_multiplier_max);
    for (std::size_t i = 0; i < k; ++i) {
      const double base = rng.uniform(1.0 / (4.0 * n), 1.0 / n);
      t.frequencies.push_back(base / t.period_multiplier);
      t.amplitudes.push_back(rng.uniform01());
      t.phases.push_back(rng.uniform(0.0, kTwoPi));
    }
    return {std::move(t)};
  }
  SmoothedNoiseTrend t{sample_noise_shape(rng)};
  const auto range = trend_kernel_range(window_len, config.trend_kernel_min_frac, config.trend_kernel_max_frac);
  t.inner.smooth_kernel = static_cast<std::size_t>(rng.uniform_int(range.min, range.max));
  return {std::move(t)};
}

/// Trend window in [0, 1]. `rng` is consumed only by the smoothed-noise branch.
inline SeriesWindow render_trend(const TrendSpec& spec, std::size_t window_len, RandomStream& rng) {
  if (const auto* ms = std::get_if<MultiSineTrend>(&spec.shape))
    return normalize_unit(superpose_sines(ms->frequencies, ms->amplitudes, ms->phases, window_len));
  return render_noise(std::get<SmoothedNoiseTrend>(spec.shape).inner, window_len, rng);
}

}  // namespace synthts
