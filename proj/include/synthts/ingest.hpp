#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "synthts/binary_format.hpp"
#include "synthts/core_types.hpp"
#include "synthts/dataset.hpp"
#include "synthts/errors.hpp"

namespace synthts {

/// Numeric CSV rows; blank lines are skipped. Throws ParseError with the 1-based
/// line number of the first non-numeric field.
inline std::vector<std::vector<double>> read_numeric_rows(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ReadError("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const std::size_t end = std::min(line.find(',', pos), line.size());
      std::string_view field(line.data() + pos, end - pos);
      while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
      while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r'))
        field.remove_suffix(1);
      double v{};
      const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
      if (field.empty() || res.ec != std::errc{} || res.ptr != field.data() + field.size() || !std::isfinite(v))
        throw ParseError(line_no, "non-numeric field '" + std::string(field) + "'");
      row.push_back(v);
      pos = end + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Single-column numeric CSV as one series.
inline std::vector<double> read_series_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ReadError("cannot open " + path.string());
  std::vector<double> series;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view field(line);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r'))
      field.remove_suffix(1);
    if (field.empty()) continue;
    double v{};
    const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size() || !std::isfinite(v))
      throw ParseError(line_no, "expected one number, got '" + std::string(field) + "'");
    series.push_back(v);
  }
  return series;
}

/// Sliding windows of length N every `stride` samples; the tail that does not
/// fill a window is dropped. Each window is standardized to [-1, 1].
inline std::vector<SeriesWindow> window_series(std::span<const double> series, std::size_t window_len,
                                               std::size_t stride) {
  if (window_len == 0) throw ConfigError("window length must be positive");
  if (stride == 0) throw ConfigError("stride must be positive");
  std::vector<SeriesWindow> out;
  if (series.size() < window_len) return out;
  for (std::size_t start = 0; start + window_len <= series.size(); start += stride)
    out.push_back(standardize(series.subspan(start, window_len)));
  return out;
}

/// Windows a real series from a single-column CSV or a binary shard (each
/// record's composite is windowed separately). Throws EmptyIngest when no
/// window fits.
inline std::vector<SeriesWindow> ingest_real(const std::filesystem::path& path, std::size_t window_len,
                                             std::size_t stride) {
  std::vector<SeriesWindow> windows;
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw ReadError("cannot open " + path.string());
  char magic[8] = {};
  probe.read(magic, sizeof magic);
  const bool is_shard = probe.gcount() == sizeof magic && std::string_view(magic, 8) == kShardMagic;
  probe.close();

  if (is_shard) {
    const Shard shard = read_shard(path);
    for (std::size_t i = 0; i < shard.records.count; ++i) {
      const auto comp = shard.records.series(i, 0);
      const std::vector<double> series(comp.begin(), comp.end());
      auto w = window_series(series, window_len, stride);
      windows.insert(windows.end(), std::make_move_iterator(w.begin()), std::make_move_iterator(w.end()));
    }
  } else {
    windows = window_series(read_series_csv(path), window_len, stride);
  }
  if (windows.empty()) throw EmptyIngest("series shorter than window length " + std::to_string(window_len));
  return windows;
}

/// One row per window, comma separated, full double precision.
inline void write_rows_csv(const std::filesystem::path& path, const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw WriteError("cannot open " + path.string());
  std::string line;
  char buf[32];
  for (const auto& row : rows) {
    line.clear();
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) line.push_back(',');
      const auto res = std::to_chars(buf, buf + sizeof buf, row[i]);
      line.append(buf, res.ptr);
    }
    line.push_back('\n');
    out << line;
  }
  out.flush();
  if (!out) throw WriteError("write failed on " + path.string());
}

}  // namespace synthts
