#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>

#include "synthts/core_types.hpp"
#include "synthts/labels.hpp"
#include "synthts/noise.hpp"
#include "synthts/random.hpp"
#include "synthts/rhythm.hpp"
#include "synthts/synthesis_params.hpp"
#include "synthts/trend.hpp"

namespace synthts {

/// Flat Dirichlet draw: uniform over the 2-simplex.
inline MixRatios sample_ratios(RandomStream& rng) {
  const double e0 = -std::log1p(-rng.uniform01());
  const double e1 = -std::log1p(-rng.uniform01());
  const double e2 = -std::log1p(-rng.uniform01());
  const double s = e0 + e1 + e2;
  if (!(s > 0.0)) return {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  return {e0 / s, e1 / s, e2 / s};
}

/// r_rhythm * rhythm + r_noise * noise + r_trend * trend, elementwise. Inputs
/// are standardized, so the result is clamped to [-1, 1] to absorb the ulp-level
/// excess of ratios whose rounded sum exceeds 1.
inline SeriesWindow compose(std::span<const double> rhythm, std::span<const double> noise,
                            std::span<const double> trend, const MixRatios& ratios) {
  if (rhythm.size() != noise.size() || rhythm.size() != trend.size())
    throw ShapeMismatch("component lengths differ");
  SeriesWindow out(rhythm.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = std::clamp(ratios.rhythm * rhythm[i] + ratios.noise * noise[i] + ratios.trend * trend[i], -1.0, 1.0);
  return out;
}

/// One generated window with its standardized components and exact labels.
struct SyntheticSample {
  SeriesWindow composite;
  SeriesWindow rhythm;  // standardized to [-1, 1]
  SeriesWindow noise;
  SeriesWindow trend;
  SynthesisParams params;
  LabelMatrix labels;

  bool operator==(const SyntheticSample&) const = default;
};

/// Draws every parameter from sub-streams of (seed, sample_key) only.
inline SynthesisParams sample_params(std::uint64_t seed, std::uint64_t sample_key, std::size_t window_len,
                                     const EngineConfig& config) {
  auto stream = [&](StreamTag tag) { return RandomStream(seed, component_stream_id(sample_key, tag)); };
  SynthesisParams p;
  p.window_len = window_len;
  p.seed = seed;
  p.sample_key = sample_key;
  auto rs = stream(StreamTag::RhythmSpec);
  p.rhythm = sample_rhythm_params(window_len, rs, {config.k_min, config.k_max});
  auto ns = stream(StreamTag::NoiseSpec);
  p.noise = sample_noise_spec(window_len, ns, config.max_noise_kernel_frac);
  auto ts = stream(StreamTag::TrendSpec);
  p.trend = sample_trend_spec(window_len, ts, config);
  auto ratio_stream = stream(StreamTag::Ratios);
  p.ratios = sample_ratios(ratio_stream);
  return p;
}

/// Renders a sample from explicit parameters. Noise and trend draws come from
/// the render sub-streams of (params.seed, params.sample_key).
inline SyntheticSample render_sample(const SynthesisParams& params, const LabelSchema& schema) {
  const std::size_t n = params.window_len;
  SyntheticSample s;
  s.rhythm = standardize(render_rhythm(params.rhythm, n));
  RandomStream noise_rng(params.seed, component_stream_id(params.sample_key, StreamTag::NoiseRender));
  s.noise = standardize(render_noise(params.noise, n, noise_rng));
  RandomStream trend_rng(params.seed, component_stream_id(params.sample_key, StreamTag::TrendRender));
  s.trend = standardize(render_trend(params.trend, n, trend_rng));
  s.composite = compose(s.rhythm, s.noise, s.trend, params.ratios);
  s.labels = normalize_params(params, n, schema);
  s.params = params;
  return s;
}

inline SyntheticSample synthesize(std::uint64_t seed, std::uint64_t sample_key, std::size_t window_len,
                                  const EngineConfig& config = {}) {
  validate(config);
  require_window(window_len);
  return render_sample(sample_params(seed, sample_key, window_len, config), LabelSchema(config));
}

}  // namespace synthts
