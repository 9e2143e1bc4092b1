#pragma once

/**
 * @file dataset.hpp
 * @brief Batch dataset emission (binary shards or CSV), manifests and readers.
 *
 * Sample i of a dataset is synthesize(seed, i, N, config); workers fill
 * disjoint slices of a chunk buffer and chunks are written in index order, so
 * the bytes on disk do not depend on the worker count.
 */

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <system_error>
#include <thread>
#include <vector>

#include <boost/crc.hpp>

#include "json.hpp"
#include "synthts/binary_format.hpp"
#include "synthts/core_types.hpp"
#include "synthts/errors.hpp"
#include "synthts/labels.hpp"
#include "synthts/metrics.hpp"
#include "synthts/mixer.hpp"
#include "synthts/noise.hpp"

namespace synthts {

enum class DatasetFormat { Csv, Binary };

inline std::string to_string(DatasetFormat f) { return f == DatasetFormat::Csv ? "csv" : "bin"; }

inline DatasetFormat parse_format(const std::string& s) {
  if (s == "csv") return DatasetFormat::Csv;
  if (s == "bin") return DatasetFormat::Binary;
  throw ConfigError("unknown dataset format '" + s + "'");
}

inline constexpr std::size_t kDefaultShardBytes = std::size_t{512} << 20;

struct DatasetRequest {
  EngineConfig config;
  std::uint64_t seed = 0;
  std::size_t count = 0;
  std::size_t window_len = 256;
  std::filesystem::path out_dir;
  DatasetFormat format = DatasetFormat::Binary;
  std::size_t workers = 1;
  std::size_t shard_bytes_cap = kDefaultShardBytes;
};

struct ManifestFile {
  std::string path;  // relative to the dataset directory
  std::uint64_t first_sample = 0;
  std::uint64_t count = 0;
  std::string crc32;
};

struct DatasetManifest {
  std::string engine_version = kEngineVersion;
  int schema_version = kLabelSchemaVersion;
  int noise_roster_version = kNoiseRosterVersion;
  DatasetFormat format = DatasetFormat::Binary;
  std::uint64_t seed = 0;
  std::size_t count = 0;
  std::size_t window_len = 0;
  std::size_t channels = 0;
  EngineConfig config;
  MetricConfig metric_defaults;
  std::vector<std::string> channel_names;
  std::string created_utc;
  std::vector<ManifestFile> files;
};

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

inline nlohmann::json config_to_json(const EngineConfig& c) {
  return {{"k_min", c.k_min},
          {"k_max", c.k_max},
          {"max_noise_kernel_frac", c.max_noise_kernel_frac},
          {"trend_kernel_min_frac", c.trend_kernel_min_frac},
          {"trend_kernel_max_frac", c.trend_kernel_max_frac},
          {"trend_k_min", c.trend_k_min},
          {"trend_k_max", c.trend_k_max},
          {"trend_multiplier_max", c.trend_multiplier_max},
          {"label_k_max", c.label_k_max}};
}

inline EngineConfig config_from_json(const nlohmann::json& j) {
  EngineConfig c;
  try {
    c.k_min = j.at("k_min").get<std::size_t>();
    c.k_max = j.at("k_max").get<std::size_t>();
    c.max_noise_kernel_frac = j.at("max_noise_kernel_frac").get<double>();
    c.trend_kernel_min_frac = j.at("trend_kernel_min_frac").get<double>();
    c.trend_kernel_max_frac = j.at("trend_kernel_max_frac").get<double>();
    c.trend_k_min = j.at("trend_k_min").get<std::size_t>();
    c.trend_k_max = j.at("trend_k_max").get<std::size_t>();
    c.trend_multiplier_max = j.at("trend_multiplier_max").get<double>();
    c.label_k_max = j.at("label_k_max").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad engine config: ") + e.what());
  }
  return c;
}

inline nlohmann::json metric_config_to_json(const MetricConfig& m) {
  nlohmann::json j{{"bins", m.bins}, {"win", m.win}, {"dynamic_range", m.dynamic_range}, {"dtw_cost", "abs"},
                   {"dtw_normalized", false}, {"histogram_distance", "l1"}, {"ssim_weighting", "uniform"}};
  j["band"] = m.band ? nlohmann::json(*m.band) : nlohmann::json(nullptr);
  return j;
}

inline nlohmann::json noise_roster_json() {
  nlohmann::json roster = nlohmann::json::array();
  for (const auto& d : kNoiseRoster) {
    nlohmann::json params = nlohmann::json::array();
    for (std::size_t i = 0; i < d.param_count; ++i)
      params.push_back({{"name", d.priors[i].name}, {"lo", d.priors[i].lo}, {"hi", d.priors[i].hi}});
    roster.push_back({{"name", d.name},
                      {"category", kNoiseCategoryNames[static_cast<std::size_t>(d.category)]},
                      {"params", params}});
  }
  return roster;
}

inline nlohmann::json to_json(const DatasetManifest& m) {
  nlohmann::json files = nlohmann::json::array();
  for (const auto& f : m.files)
    files.push_back({{"path", f.path}, {"first_sample", f.first_sample}, {"count", f.count}, {"crc32", f.crc32}});
  return {{"engine_version", m.engine_version},
          {"schema_version", m.schema_version},
          {"noise_roster_version", m.noise_roster_version},
          {"format", to_string(m.format)},
          {"shard_format_version", kShardFormatVersion},
          {"seed", m.seed},
          {"count", m.count},
          {"window_len", m.window_len},
          {"channels", m.channels},
          {"record_layout", {"composite", "rhythm", "noise", "trend", "labels"}},
          {"config", config_to_json(m.config)},
          {"noise_roster", noise_roster_json()},
          {"metric_defaults", metric_config_to_json(m.metric_defaults)},
          {"channel_names", m.channel_names},
          {"created_utc", m.created_utc},
          {"files", files}};
}

inline DatasetManifest manifest_from_json(const nlohmann::json& j) {
  DatasetManifest m;
  try {
    m.engine_version = j.at("engine_version").get<std::string>();
    m.schema_version = j.at("schema_version").get<int>();
    m.noise_roster_version = j.at("noise_roster_version").get<int>();
    m.format = parse_format(j.at("format").get<std::string>());
    m.seed = j.at("seed").get<std::uint64_t>();
    m.count = j.at("count").get<std::size_t>();
    m.window_len = j.at("window_len").get<std::size_t>();
    m.channels = j.at("channels").get<std::size_t>();
    m.config = config_from_json(j.at("config"));
    m.channel_names = j.at("channel_names").get<std::vector<std::string>>();
    m.created_utc = j.value("created_utc", "");
    for (const auto& f : j.at("files"))
      m.files.push_back({f.at("path").get<std::string>(), f.at("first_sample").get<std::uint64_t>(),
                         f.at("count").get<std::uint64_t>(), f.at("crc32").get<std::string>()});
  } catch (const nlohmann::json::exception& e) {
    throw ReadError(std::string("bad manifest: ") + e.what());
  }
  return m;
}

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

inline std::size_t record_bytes(std::size_t channels, std::size_t window_len) {
  return (kSeriesPerRecord + channels) * window_len * sizeof(float);
}

/// Generates records [first, first + count) into consecutive chunks and hands
/// each chunk to `sink(first_index, n_records, bytes)` in index order.
/// `key(i)` maps a position to the sample key passed to synthesize.
template <class KeyFn, class ChunkSink>
void generate_chunks(const EngineConfig& config, std::uint64_t seed, std::size_t window_len, std::uint64_t first,
                     std::uint64_t count, std::size_t workers, KeyFn&& key, ChunkSink&& sink,
                     std::size_t chunk_records = 1024) {
  validate(config);
  require_window(window_len);
  const LabelSchema schema(config);
  const std::size_t rec = record_bytes(schema.channels(), window_len);
  workers = std::max<std::size_t>(workers, 1);
  chunk_records = std::max<std::size_t>(chunk_records, 1);
  std::vector<std::byte> buffer;

  for (std::uint64_t start = 0; start < count; start += chunk_records) {
    const auto n = static_cast<std::size_t>(std::min<std::uint64_t>(chunk_records, count - start));
    buffer.resize(n * rec);
    auto fill = [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        const SyntheticSample s =
            render_sample(sample_params(seed, key(first + start + i), window_len, config), schema);
        encode_record(s, std::span(buffer).subspan(i * rec, rec));
      }
    };
    const std::size_t used = std::min(workers, n);
    if (used == 1) {
      fill(0, n);
    } else {
      std::vector<std::exception_ptr> errors(used);
      {
        std::vector<std::jthread> pool;
        pool.reserve(used);
        for (std::size_t w = 0; w < used; ++w) {
          pool.emplace_back([&, w] {
            try {
              fill(n * w / used, n * (w + 1) / used);
            } catch (...) {
              errors[w] = std::current_exception();
            }
          });
        }
      }
      for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    }
    sink(first + start, n, std::span<const std::byte>(buffer));
  }
}

namespace detail {

inline std::string crc_hex(std::uint32_t v) {
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08x", v);
  return buf;
}

inline std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Output file that deletes itself unless committed.
class PendingFile {
 public:
  explicit PendingFile(std::filesystem::path path) : path_(std::move(path)) {
    out_.open(path_, std::ios::binary | std::ios::trunc);
    if (!out_) throw WriteError("cannot open " + path_.string());
  }
  PendingFile(const PendingFile&) = delete;
  PendingFile& operator=(const PendingFile&) = delete;
  ~PendingFile() {
    if (!committed_) {
      out_.close();
      std::error_code ec;
      std::filesystem::remove(path_, ec);
    }
  }

  void write(std::span<const std::byte> bytes) {
    out_.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out_) throw WriteError("write failed on " + path_.string());
    crc_.process_bytes(bytes.data(), bytes.size());
  }
  void write(std::string_view text) { write(std::as_bytes(std::span(text.data(), text.size()))); }

  std::string commit() {
    out_.flush();
    out_.close();
    if (out_.fail()) throw WriteError("close failed on " + path_.string());
    committed_ = true;
    return crc_hex(crc_.checksum());
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  boost::crc_32_type crc_;
  bool committed_ = false;
};

inline void append_float(std::string& line, float v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  line.append(buf, res.ptr);
}

inline const std::vector<std::string>& csv_series_files() {
  static const std::vector<std::string> names{"composite.csv", "rhythm.csv", "noise.csv", "trend.csv"};
  return names;
}

struct LabelBlock {
  std::string file;
  std::size_t first_channel;
  std::size_t last_channel;  // inclusive
};

inline std::vector<LabelBlock> csv_label_blocks(const LabelSchema& s) {
  return {{"labels_rhythm.csv", s.sine_count(), s.phase(s.slots() - 1)},
          {"labels_noise.csv", s.noise_category(), s.noise_kernel()},
          {"labels_trend.csv", s.trend_method(), s.trend_shape()},
          {"labels_ratios.csv", s.ratio_rhythm(), s.ratio_trend()}};
}

}  // namespace detail

/// Writes the dataset and its manifest.json. Throws ConfigError before touching
/// the filesystem if the request is invalid, WriteError on I/O failure (the
/// file being written is removed).
inline DatasetManifest generate_dataset(const DatasetRequest& req) {
  try {
    validate(req.config);
    require_window(req.window_len);
  } catch (const InvalidWindow& e) {
    throw ConfigError(e.what());
  }
  if (req.count < 1) throw ConfigError("count must be at least 1");
  if (req.out_dir.empty()) throw ConfigError("output path is empty");

  std::error_code ec;
  std::filesystem::create_directories(req.out_dir, ec);
  if (ec || !std::filesystem::is_directory(req.out_dir))
    throw WriteError("cannot create output directory " + req.out_dir.string());

  const LabelSchema schema(req.config);
  DatasetManifest manifest;
  manifest.format = req.format;
  manifest.seed = req.seed;
  manifest.count = req.count;
  manifest.window_len = req.window_len;
  manifest.channels = schema.channels();
  manifest.config = req.config;
  manifest.channel_names = schema.channel_names();
  manifest.created_utc = detail::utc_now();

  const std::size_t n = req.window_len;
  const std::size_t rec = record_bytes(schema.channels(), n);
  const auto identity = [](std::uint64_t i) { return i; };

  if (req.format == DatasetFormat::Binary) {
    const std::size_t per_shard = std::max<std::size_t>(1, req.shard_bytes_cap / rec);
    std::uint32_t shard = 0;
    for (std::uint64_t first = 0; first < req.count; first += per_shard, ++shard) {
      const std::uint64_t cnt = std::min<std::uint64_t>(per_shard, req.count - first);
      char name[32];
      std::snprintf(name, sizeof name, "shard-%05u.bin", shard);
      detail::PendingFile file(req.out_dir / name);
      ShardHeader h;
      h.channels = static_cast<std::uint32_t>(schema.channels());
      h.window_len = static_cast<std::uint32_t>(n);
      h.count = cnt;
      h.first_sample = first;
      h.seed = req.seed;
      h.schema_version = kLabelSchemaVersion;
      h.shard_index = shard;
      file.write(encode_header(h));
      generate_chunks(req.config, req.seed, n, first, cnt, req.workers, identity,
                      [&](std::uint64_t, std::size_t, std::span<const std::byte> bytes) { file.write(bytes); });
      manifest.files.push_back({name, first, cnt, file.commit()});
    }
  } else {
    const auto& series_files = detail::csv_series_files();
    const auto blocks = detail::csv_label_blocks(schema);
    std::vector<std::unique_ptr<detail::PendingFile>> files;
    for (const auto& f : series_files) files.push_back(std::make_unique<detail::PendingFile>(req.out_dir / f));
    for (const auto& b : blocks) files.push_back(std::make_unique<detail::PendingFile>(req.out_dir / b.file));

    std::string line;
    std::vector<float> rec_floats(rec / sizeof(float));
    generate_chunks(req.config, req.seed, n, 0, req.count, req.workers, identity,
                    [&](std::uint64_t, std::size_t cnt, std::span<const std::byte> bytes) {
                      for (std::size_t r = 0; r < cnt; ++r) {
                        decode_floats(bytes.subspan(r * rec, rec), rec_floats);
                        for (std::size_t s = 0; s < series_files.size(); ++s) {
                          line.clear();
                          for (std::size_t i = 0; i < n; ++i) {
                            if (i) line.push_back(',');
                            detail::append_float(line, rec_floats[s * n + i]);
                          }
                          line.push_back('\n');
                          files[s]->write(line);
                        }
                        const float* labels = rec_floats.data() + kSeriesPerRecord * n;
                        for (std::size_t b = 0; b < blocks.size(); ++b) {
                          line.clear();
                          bool first_value = true;
                          for (std::size_t c = blocks[b].first_channel; c <= blocks[b].last_channel; ++c)
                            for (std::size_t i = 0; i < n; ++i) {
                              if (!first_value) line.push_back(',');
                              first_value = false;
                              detail::append_float(line, labels[c * n + i]);
                            }
                          line.push_back('\n');
                          files[series_files.size() + b]->write(line);
                        }
                      }
                    });
    std::vector<std::string> names(series_files);
    for (const auto& b : blocks) names.push_back(b.file);
    for (std::size_t i = 0; i < files.size(); ++i) manifest.files.push_back({names[i], 0, req.count, files[i]->commit()});
  }

  detail::PendingFile mf(req.out_dir / "manifest.json");
  mf.write(to_json(manifest).dump(2) + "\n");
  mf.commit();
  return manifest;
}

// ---------------------------------------------------------------------------
// Reading
// ---------------------------------------------------------------------------

/// Decoded records, record-major, in the shard layout.
struct DatasetRecords {
  std::size_t channels = 0;
  std::size_t window_len = 0;
  std::size_t count = 0;
  std::vector<float> data;

  std::size_t record_floats() const noexcept { return (kSeriesPerRecord + channels) * window_len; }
  std::span<const float> record(std::size_t i) const { return {data.data() + i * record_floats(), record_floats()}; }
  /// series: 0 composite, 1 rhythm, 2 noise, 3 trend.
  std::span<const float> series(std::size_t i, std::size_t which) const {
    return record(i).subspan(which * window_len, window_len);
  }
  std::span<const float> labels(std::size_t i) const {
    return record(i).subspan(kSeriesPerRecord * window_len, channels * window_len);
  }
};

inline std::vector<std::byte> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ReadError("cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0);
  std::vector<std::byte> bytes(size);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size));
  if (!in) throw ReadError("short read on " + path.string());
  return bytes;
}

inline std::string file_crc32(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  boost::crc_32_type crc;
  crc.process_bytes(bytes.data(), bytes.size());
  return detail::crc_hex(crc.checksum());
}

struct Shard {
  ShardHeader header;
  DatasetRecords records;
};

inline Shard read_shard(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  Shard s;
  s.header = decode_header(bytes);
  s.records.channels = s.header.channels;
  s.records.window_len = s.header.window_len;
  s.records.count = static_cast<std::size_t>(s.header.count);
  if (s.header.series_per_record != kSeriesPerRecord) throw ReadError("unexpected series per record");
  const std::size_t need = s.header.record_bytes() * s.records.count;
  if (bytes.size() != kShardHeaderBytes + need) throw ReadError("shard size does not match its header");
  s.records.data.resize(s.records.record_floats() * s.records.count);
  decode_floats(std::span(bytes).subspan(kShardHeaderBytes), s.records.data);
  return s;
}

inline DatasetManifest read_manifest(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw ReadError("cannot open manifest in " + dir.string());
  try {
    return manifest_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ReadError(std::string("manifest is not valid JSON: ") + e.what());
  }
}

namespace detail {

inline std::vector<float> parse_float_row(std::string_view line, std::size_t line_no) {
  std::vector<float> out;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    const std::size_t end = std::min(line.find(',', pos), line.size());
    std::string_view field = line.substr(pos, end - pos);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r'))
      field.remove_suffix(1);
    float v{};
    const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || res.ec != std::errc{} || res.ptr != field.data() + field.size())
      throw ParseError(line_no, "non-numeric field '" + std::string(field) + "'");
    out.push_back(v);
    pos = end + 1;
  }
  return out;
}

}  // namespace detail

/// Loads a dataset written by generate_dataset in either format.
inline DatasetRecords load_dataset(const std::filesystem::path& dir) {
  const DatasetManifest m = read_manifest(dir);
  DatasetRecords out;
  out.channels = m.channels;
  out.window_len = m.window_len;
  out.count = m.count;
  out.data.resize(out.record_floats() * out.count);

  if (m.format == DatasetFormat::Binary) {
    for (const auto& f : m.files) {
      const Shard s = read_shard(dir / f.path);
      if (s.records.channels != m.channels || s.records.window_len != m.window_len)
        throw ReadError("shard " + f.path + " disagrees with manifest");
      std::copy(s.records.data.begin(), s.records.data.end(),
                out.data.begin() + static_cast<std::ptrdiff_t>(f.first_sample * out.record_floats()));
    }
    return out;
  }

  const LabelSchema schema(m.config);
  const std::size_t n = m.window_len;
  auto read_rows = [&](const std::string& name, auto&& place) {
    std::ifstream in(dir / name);
    if (!in) throw ReadError("cannot open " + (dir / name).string());
    std::string line;
    std::size_t row = 0, line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      if (row >= m.count) throw ReadError(name + " has more rows than the manifest count");
      place(row++, detail::parse_float_row(line, line_no));
    }
    if (row != m.count) throw ReadError(name + " has fewer rows than the manifest count");
  };
  const auto& series_files = detail::csv_series_files();
  for (std::size_t s = 0; s < series_files.size(); ++s)
    read_rows(series_files[s], [&](std::size_t r, const std::vector<float>& v) {
      if (v.size() != n) throw ReadError(series_files[s] + ": row width mismatch");
      std::copy(v.begin(), v.end(), out.data.begin() + static_cast<std::ptrdiff_t>(r * out.record_floats() + s * n));
    });
  for (const auto& b : detail::csv_label_blocks(schema))
    read_rows(b.file, [&](std::size_t r, const std::vector<float>& v) {
      if (v.size() != (b.last_channel - b.first_channel + 1) * n) throw ReadError(b.file + ": row width mismatch");
      const std::size_t off = r * out.record_floats() + (kSeriesPerRecord + b.first_channel) * n;
      std::copy(v.begin(), v.end(), out.data.begin() + static_cast<std::ptrdiff_t>(off));
    });
  return out;
}

/// Names of manifest files whose checksum no longer matches.
inline std::vector<std::string> verify_checksums(const std::filesystem::path& dir) {
  const DatasetManifest m = read_manifest(dir);
  std::vector<std::string> bad;
  for (const auto& f : m.files)
    if (file_crc32(dir / f.path) != f.crc32) bad.push_back(f.path);
  return bad;
}

}  // namespace synthts
