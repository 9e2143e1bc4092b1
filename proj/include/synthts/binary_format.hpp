#pragma once

/**
 * @file binary_format.hpp
 * @brief Little-endian shard layout.
 *
 * A shard is a 64-byte header followed by `count` fixed-size records:
 *
 *   offset  size  field
 *        0     8  magic "STSSHARD"
 *        8     4  format version (1)
 *       12     4  channels C
 *       16     4  window length N
 *       20     4  series per record (4: composite, rhythm, noise, trend)
 *       24     8  record count
 *       32     8  index of the first sample in this shard
 *       40     8  dataset seed
 *       48     4  label schema version
 *       52     4  shard index
 *       56     8  reserved, zero
 *
 * Each record is (4 + C) * N float32 values, row-major: the four series, then
 * the C x N label matrix.
 */

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <span>
#include <string_view>
#include <vector>

#include "synthts/errors.hpp"
#include "synthts/mixer.hpp"

namespace synthts {

inline constexpr std::size_t kShardHeaderBytes = 64;
inline constexpr std::string_view kShardMagic{"STSSHARD", 8};
inline constexpr std::uint32_t kShardFormatVersion = 1;
inline constexpr std::uint32_t kSeriesPerRecord = 4;

namespace le {

inline void put_u32(std::byte* p, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) p[i] = static_cast<std::byte>((v >> (8 * i)) & 0xffU);
}
inline void put_u64(std::byte* p, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) p[i] = static_cast<std::byte>((v >> (8 * i)) & 0xffU);
}
inline void put_f32(std::byte* p, float v) { put_u32(p, std::bit_cast<std::uint32_t>(v)); }

inline std::uint32_t get_u32(const std::byte* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return v;
}
inline std::uint64_t get_u64(const std::byte* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}
inline float get_f32(const std::byte* p) { return std::bit_cast<float>(get_u32(p)); }

}  // namespace le

struct ShardHeader {
  std::uint32_t format_version = kShardFormatVersion;
  std::uint32_t channels = 0;
  std::uint32_t window_len = 0;
  std::uint32_t series_per_record = kSeriesPerRecord;
  std::uint64_t count = 0;
  std::uint64_t first_sample = 0;
  std::uint64_t seed = 0;
  std::uint32_t schema_version = 0;
  std::uint32_t shard_index = 0;

  std::size_t record_floats() const noexcept {
    return static_cast<std::size_t>(series_per_record + channels) * window_len;
  }
  std::size_t record_bytes() const noexcept { return record_floats() * sizeof(float); }

  bool operator==(const ShardHeader&) const = default;
};

inline std::array<std::byte, kShardHeaderBytes> encode_header(const ShardHeader& h) {
  std::array<std::byte, kShardHeaderBytes> out{};
  std::memcpy(out.data(), kShardMagic.data(), kShardMagic.size());
  le::put_u32(out.data() + 8, h.format_version);
  le::put_u32(out.data() + 12, h.channels);
  le::put_u32(out.data() + 16, h.window_len);
  le::put_u32(out.data() + 20, h.series_per_record);
  le::put_u64(out.data() + 24, h.count);
  le::put_u64(out.data() + 32, h.first_sample);
  le::put_u64(out.data() + 40, h.seed);
  le::put_u32(out.data() + 48, h.schema_version);
  le::put_u32(out.data() + 52, h.shard_index);
  return out;
}

inline bool has_shard_magic(std::span<const std::byte> bytes) {
  return bytes.size() >= kShardMagic.size() && std::memcmp(bytes.data(), kShardMagic.data(), kShardMagic.size()) == 0;
}

inline ShardHeader decode_header(std::span<const std::byte> bytes) {
  if (bytes.size() < kShardHeaderBytes || !has_shard_magic(bytes)) throw ReadError("not a shard header");
  ShardHeader h;
  h.format_version = le::get_u32(bytes.data() + 8);
  if (h.format_version != kShardFormatVersion)
    throw ReadError("unsupported shard format version " + std::to_string(h.format_version));
  h.channels = le::get_u32(bytes.data() + 12);
  h.window_len = le::get_u32(bytes.data() + 16);
  h.series_per_record = le::get_u32(bytes.data() + 20);
  h.count = le::get_u64(bytes.data() + 24);
  h.first_sample = le::get_u64(bytes.data() + 32);
  h.seed = le::get_u64(bytes.data() + 40);
  h.schema_version = le::get_u32(bytes.data() + 48);
  h.shard_index = le::get_u32(bytes.data() + 52);
  return h;
}

/// Serializes one sample as a record into `out`, which must hold
/// (4 + C) * N * 4 bytes.
inline void encode_record(const SyntheticSample& s, std::span<std::byte> out) {
  const std::size_t n = s.composite.size();
  const std::size_t need = (kSeriesPerRecord * n + s.labels.values.size()) * sizeof(float);
  if (out.size() < need) throw ShapeMismatch("record buffer too small");
  std::byte* p = out.data();
  for (const SeriesWindow* series : {&s.composite, &s.rhythm, &s.noise, &s.trend})
    for (double v : *series) {
      le::put_f32(p, static_cast<float>(v));
      p += sizeof(float);
    }
  for (double v : s.labels.values) {
    le::put_f32(p, static_cast<float>(v));
    p += sizeof(float);
  }
}

inline void decode_floats(std::span<const std::byte> bytes, std::span<float> out) {
  if (bytes.size() < out.size() * sizeof(float)) throw ReadError("truncated float block");
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = le::get_f32(bytes.data() + i * sizeof(float));
}

}  // namespace synthts
