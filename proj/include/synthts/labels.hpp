#pragma once

/**
 * @file labels.hpp
 * @brief Multi-channel label matrix: generative parameters normalized and
 * broadcast along the time axis.
 *
 * Channel layout for K sine slots (schema version 1, C = 3K + 13):
 *
 *   0                sine count, (k - k_min) / (k_max - k_min)
 *   1 .. K           frequency slot i, (f - f_min) / (f_max - f_min)
 *   K+1 .. 2K        amplitude slot i
 *   2K+1 .. 3K       phase slot i, phi / (2 pi)
 *   3K+1             noise category / 4
 *   3K+2             noise distribution / 14
 *   3K+3 .. 3K+5     noise parameters, affine from their prior range
 *   3K+6             invert flag
 *   3K+7             noise kernel / N
 *   3K+8             trend method (0 multi-sine, 1 smoothed noise)
 *   3K+9             trend multiplier or trend kernel, affine from its range
 *   3K+10 .. 3K+12   r_rhythm, r_noise, r_trend
 *
 * Unused slots hold -1, which is outside every slot's valid [0, 1] range.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "synthts/core_types.hpp"
#include "synthts/noise.hpp"
#include "synthts/rhythm.hpp"
#include "synthts/synthesis_params.hpp"
#include "synthts/trend.hpp"

namespace synthts {

inline constexpr int kLabelSchemaVersion = 1;
inline constexpr double kUnusedSlot = -1.0;

/// Channel indices and the ranges needed to map parameters onto [0, 1].
class LabelSchema {
 public:
  explicit LabelSchema(const EngineConfig& config = {}) : config_(config) {}

  const EngineConfig& config() const noexcept { return config_; }
  std::size_t slots() const noexcept { return config_.label_k_max; }
  std::size_t channels() const noexcept { return 3 * slots() + 13; }

  std::size_t sine_count() const noexcept { return 0; }
  std::size_t frequency(std::size_t i) const noexcept { return 1 + i; }
  std::size_t amplitude(std::size_t i) const noexcept { return 1 + slots() + i; }
  std::size_t phase(std::size_t i) const noexcept { return 1 + 2 * slots() + i; }
  std::size_t noise_category() const noexcept { return base(); }
  std::size_t noise_distribution() const noexcept { return base() + 1; }
  std::size_t noise_param(std::size_t j) const noexcept { return base() + 2 + j; }
  std::size_t noise_invert() const noexcept { return base() + 5; }
  std::size_t noise_kernel() const noexcept { return base() + 6; }
  std::size_t trend_method() const noexcept { return base() + 7; }
  std::size_t trend_shape() const noexcept { return base() + 8; }
  std::size_t ratio_rhythm() const noexcept { return base() + 9; }
  std::size_t ratio_noise() const noexcept { return base() + 10; }
  std::size_t ratio_trend() const noexcept { return base() + 11; }

  std::vector<std::string> channel_names() const {
    std::vector<std::string> names;
    names.reserve(channels());
    names.emplace_back("sine_count");
    for (const char* group : {"frequency", "amplitude", "phase"})
      for (std::size_t i = 0; i < slots(); ++i) names.push_back(std::string(group) + "_" + std::to_string(i));
    for (const char* n : {"noise_category", "noise_distribution", "noise_param_0", "noise_param_1", "noise_param_2",
                          "noise_invert", "noise_kernel", "trend_method", "trend_shape", "ratio_rhythm",
                          "ratio_noise", "ratio_trend"})
      names.emplace_back(n);
    return names;
  }

 private:
  std::size_t base() const noexcept { return 3 * slots() + 1; }

  EngineConfig config_;
};

/// C x N row-major matrix.
struct LabelMatrix {
  std::size_t channels = 0;
  std::size_t length = 0;
  int schema_version = kLabelSchemaVersion;
  std::vector<double> values;

  LabelMatrix() = default;
  LabelMatrix(std::size_t c, std::size_t n, double fill = 0.0)
      : channels(c), length(n), values(c * n, fill) {}

  double& at(std::size_t c, std::size_t n) { return values[c * length + n]; }
  double at(std::size_t c, std::size_t n) const { return values[c * length + n]; }
  std::span<double> row(std::size_t c) { return {values.data() + c * length, length}; }
  std::span<const double> row(std::size_t c) const { return {values.data() + c * length, length}; }

  bool operator==(const LabelMatrix&) const = default;
};

namespace detail {

inline double unit_affine(double v, double lo, double hi) { return hi > lo ? (v - lo) / (hi - lo) : 0.0; }
inline double unit_affine_inverse(double u, double lo, double hi) { return lo + u * (hi - lo); }

}  // namespace detail

/// Subset of SynthesisParams carried by the label schema; what decoding yields.
struct DecodedParams {
  std::size_t sine_count = 0;
  RhythmParams rhythm;  // only slots whose frequency channel is not the sentinel
  NoiseCategory noise_category = NoiseCategory::CommonContinuous;
  NoiseDistribution noise_distribution = NoiseDistribution::Uniform;
  std::array<std::optional<double>, kMaxNoiseParams> noise_params{};
  bool noise_invert = false;
  std::size_t noise_kernel = 1;
  TrendMethod trend_method = TrendMethod::MultiSine;
  std::optional<double> trend_multiplier;
  std::optional<std::size_t> trend_kernel;
  MixRatios ratios;
};

/// The fields of `p` a label matrix can represent.
inline DecodedParams label_fields(const SynthesisParams& p) {
  DecodedParams d;
  d.sine_count = p.rhythm.sine_count();
  d.rhythm = p.rhythm;
  d.noise_category = p.noise.category();
  d.noise_distribution = p.noise.distribution;
  for (std::size_t j = 0; j < p.noise.param_count(); ++j) d.noise_params[j] = p.noise.params[j];
  d.noise_invert = p.noise.invert;
  d.noise_kernel = p.noise.smooth_kernel;
  d.trend_method = p.trend.method();
  if (const auto* ms = std::get_if<MultiSineTrend>(&p.trend.shape))
    d.trend_multiplier = ms->period_multiplier;
  else
    d.trend_kernel = std::get<SmoothedNoiseTrend>(p.trend.shape).inner.smooth_kernel;
  d.ratios = p.ratios;
  return d;
}

/// Encodes `params` as a C x N label matrix. Throws SchemaViolation when a
/// parameter lies outside the range the schema can encode.
inline LabelMatrix normalize_params(const SynthesisParams& params, std::size_t window_len,
                                    const LabelSchema& schema = LabelSchema{}) {
  const auto& cfg = schema.config();
  const auto band = frequency_bounds(window_len);
  const auto& rh = params.rhythm;
  const std::size_t k = rh.sine_count();
  if (rh.amplitudes.size() != k || rh.phases.size() != k) throw SchemaViolation("ragged rhythm parameters");
  if (k < cfg.k_min || k > cfg.k_max || k > schema.slots())
    throw SchemaViolation("sine count " + std::to_string(k) + " outside schema range");

  std::vector<double> scalar(schema.channels(), kUnusedSlot);
  scalar[schema.sine_count()] =
      detail::unit_affine(static_cast<double>(k), static_cast<double>(cfg.k_min), static_cast<double>(cfg.k_max));
  for (std::size_t i = 0; i < k; ++i) {
    const double f = rh.frequencies[i], a = rh.amplitudes[i], ph = rh.phases[i];
    if (!(f >= band.min && f <= band.max)) throw SchemaViolation("frequency outside [f_min, f_max]");
    if (!(a >= 0.0 && a <= 1.0)) throw SchemaViolation("amplitude outside [0, 1]");
    if (!(ph >= 0.0 && ph < kTwoPi)) throw SchemaViolation("phase outside [0, 2pi)");
    scalar[schema.frequency(i)] = detail::unit_affine(f, band.min, band.max);
    scalar[schema.amplitude(i)] = a;
    scalar[schema.phase(i)] = ph / kTwoPi;
  }

  const auto& noise = params.noise;
  if (static_cast<std::size_t>(noise.distribution) >= kNoiseDistributionCount)
    throw SchemaViolation("unknown noise distribution");
  if (!params_in_domain(noise)) throw SchemaViolation("noise parameters outside their prior range");
  const std::size_t noise_cap = max_noise_kernel(window_len, cfg.max_noise_kernel_frac);
  if (noise.smooth_kernel < 1 || noise.smooth_kernel > noise_cap) throw SchemaViolation("noise kernel out of range");
  scalar[schema.noise_category()] = static_cast<double>(noise.category()) / (kNoiseCategoryCount - 1);
  scalar[schema.noise_distribution()] = static_cast<double>(noise.distribution) / (kNoiseDistributionCount - 1);
  const auto& dist = info(noise.distribution);
  for (std::size_t j = 0; j < dist.param_count; ++j)
    scalar[schema.noise_param(j)] = detail::unit_affine(noise.params[j], dist.priors[j].lo, dist.priors[j].hi);
  scalar[schema.noise_invert()] = noise.invert ? 1.0 : 0.0;
  scalar[schema.noise_kernel()] = static_cast<double>(noise.smooth_kernel) / static_cast<double>(window_len);

  scalar[schema.trend_method()] = params.trend.method() == TrendMethod::MultiSine ? 0.0 : 1.0;
  if (const auto* ms = std::get_if<MultiSineTrend>(&params.trend.shape)) {
    const double m = ms->period_multiplier;
    if (!(m > 1.0 && m <= cfg.trend_multiplier_max)) throw SchemaViolation("trend multiplier out of range");
    scalar[schema.trend_shape()] = detail::unit_affine(m, 1.0, cfg.trend_multiplier_max);
  } else {
    const auto kernel = std::get<SmoothedNoiseTrend>(params.trend.shape).inner.smooth_kernel;
    const auto range = trend_kernel_range(window_len, cfg.trend_kernel_min_frac, cfg.trend_kernel_max_frac);
    if (kernel < range.min || kernel > range.max) throw SchemaViolation("trend kernel out of range");
    scalar[schema.trend_shape()] = detail::unit_affine(static_cast<double>(kernel), static_cast<double>(range.min),
                                                       static_cast<double>(range.max));
  }

  const auto& r = params.ratios;
  for (double v : {r.rhythm, r.noise, r.trend})
    if (!(v >= 0.0 && v <= 1.0)) throw SchemaViolation("mixing ratio outside [0, 1]");
  if (std::abs(r.sum() - 1.0) > 1e-9) throw SchemaViolation("mixing ratios do not sum to 1");
  scalar[schema.ratio_rhythm()] = r.rhythm;
  scalar[schema.ratio_noise()] = r.noise;
  scalar[schema.ratio_trend()] = r.trend;

  LabelMatrix m(schema.channels(), window_len);
  for (std::size_t c = 0; c < schema.channels(); ++c) std::fill_n(m.row(c).begin(), window_len, scalar[c]);
  return m;
}

namespace detail {

/// Median of the finite entries; nullopt when there are none.
inline std::optional<double> finite_median(std::span<const double> xs) {
  std::vector<double> v;
  v.reserve(xs.size());
  for (double x : xs)
    if (std::isfinite(x)) v.push_back(x);
  if (v.empty()) return std::nullopt;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  if (v.size() % 2 == 1) return v[mid];
  const double upper = v[mid];
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

inline bool is_sentinel(double v) { return v < -0.5; }

inline std::size_t round_index(double scaled, std::size_t max_index) {
  const double r = std::round(scaled);
  if (!(r > 0.0)) return 0;
  return std::min(static_cast<std::size_t>(r), max_index);
}

}  // namespace detail

/// Inverse of normalize_params. Each channel is reduced to its time-axis median,
/// so noisy or interpolated predictions still decode.
inline DecodedParams denormalize_params(const LabelMatrix& matrix, std::size_t window_len,
                                        const LabelSchema& schema = LabelSchema{}) {
  if (matrix.schema_version != kLabelSchemaVersion)
    throw DecodeError("unsupported schema version " + std::to_string(matrix.schema_version));
  if (matrix.channels != schema.channels() || matrix.length == 0 ||
      matrix.values.size() != matrix.channels * matrix.length)
    throw DecodeError("matrix shape does not match the label schema");

  const auto& cfg = schema.config();
  std::vector<double> med(schema.channels());
  for (std::size_t c = 0; c < schema.channels(); ++c) {
    const auto m = detail::finite_median(matrix.row(c));
    if (!m) throw DecodeError("channel " + std::to_string(c) + " has no finite values");
    med[c] = *m;
  }

  const auto band = frequency_bounds(window_len);
  DecodedParams d;
  d.sine_count = cfg.k_min + detail::round_index(med[schema.sine_count()] * static_cast<double>(cfg.k_max - cfg.k_min),
                                                 cfg.k_max - cfg.k_min);
  for (std::size_t i = 0; i < schema.slots(); ++i) {
    if (detail::is_sentinel(med[schema.frequency(i)])) continue;
    d.rhythm.frequencies.push_back(detail::unit_affine_inverse(med[schema.frequency(i)], band.min, band.max));
    d.rhythm.amplitudes.push_back(std::max(med[schema.amplitude(i)], 0.0));
    d.rhythm.phases.push_back(std::max(med[schema.phase(i)], 0.0) * kTwoPi);
  }

  d.noise_category = static_cast<NoiseCategory>(
      detail::round_index(med[schema.noise_category()] * (kNoiseCategoryCount - 1), kNoiseCategoryCount - 1));
  d.noise_distribution = static_cast<NoiseDistribution>(detail::round_index(
      med[schema.noise_distribution()] * (kNoiseDistributionCount - 1), kNoiseDistributionCount - 1));
  const auto& dist = info(d.noise_distribution);
  for (std::size_t j = 0; j < kMaxNoiseParams; ++j) {
    const double v = med[schema.noise_param(j)];
    if (j < dist.param_count && !detail::is_sentinel(v))
      d.noise_params[j] = detail::unit_affine_inverse(v, dist.priors[j].lo, dist.priors[j].hi);
  }
  d.noise_invert = med[schema.noise_invert()] >= 0.5;
  const std::size_t noise_cap = max_noise_kernel(window_len, cfg.max_noise_kernel_frac);
  d.noise_kernel =
      std::max<std::size_t>(1, detail::round_index(med[schema.noise_kernel()] * static_cast<double>(window_len),
                                                   noise_cap));

  d.trend_method = med[schema.trend_method()] >= 0.5 ? TrendMethod::SmoothedNoise : TrendMethod::MultiSine;
  const double shape = med[schema.trend_shape()];
  if (d.trend_method == TrendMethod::MultiSine) {
    d.trend_multiplier = detail::unit_affine_inverse(shape, 1.0, cfg.trend_multiplier_max);
  } else {
    const auto range = trend_kernel_range(window_len, cfg.trend_kernel_min_frac, cfg.trend_kernel_max_frac);
    d.trend_kernel = range.min + detail::round_index(shape * static_cast<double>(range.max - range.min),
                                                     range.max - range.min);
  }

  d.ratios = {med[schema.ratio_rhythm()], med[schema.ratio_noise()], med[schema.ratio_trend()]};
  return d;
}

}  // namespace synthts
