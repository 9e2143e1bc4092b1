// Command-line front end: generate, stream, ingest, eval, spectrum.
//
// Exit codes: 0 success, 1 configuration error, 2 I/O error, 3 data error.

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "httplib.h"
#include "json.hpp"
#include "synthts/synthts.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;
constexpr int kExitData = 3;

int exit_code(synthts::ErrorCategory c) {
  switch (c) {
    case synthts::ErrorCategory::Config:
      return kExitConfig;
    case synthts::ErrorCategory::Io:
      return kExitIo;
    case synthts::ErrorCategory::Data:
      return kExitData;
  }
  return kExitData;
}

struct EngineOptions {
  synthts::EngineConfig config;

  void attach(CLI::App* cmd) {
    cmd->add_option("--k-min", config.k_min, "Minimum rhythm sine count")->capture_default_str();
    cmd->add_option("--k-max", config.k_max, "Maximum rhythm sine count")->capture_default_str();
    cmd->add_option("--max-noise-kernel-frac", config.max_noise_kernel_frac,
                    "Noise smoothing kernel cap as a fraction of N")
        ->capture_default_str();
    cmd->add_option("--trend-kernel-min", config.trend_kernel_min_frac, "Trend kernel lower fraction of N")
        ->capture_default_str();
    cmd->add_option("--trend-kernel-max", config.trend_kernel_max_frac, "Trend kernel upper fraction of N")
        ->capture_default_str();
  }
};

/// Rows of a numeric CSV; a file with one value per line is a single series.
std::vector<std::vector<double>> read_windows(const std::filesystem::path& path) {
  auto rows = synthts::read_numeric_rows(path);
  const bool column = rows.size() > 1 && std::all_of(rows.begin(), rows.end(), [](const auto& r) {
                        return r.size() == 1;
                      });
  if (!column) return rows;
  std::vector<double> series;
  series.reserve(rows.size());
  for (const auto& r : rows) series.push_back(r[0]);
  return {std::move(series)};
}

int run_generate(const synthts::DatasetRequest& req) {
  const auto manifest = synthts::generate_dataset(req);
  std::cout << "wrote " << manifest.count << " samples in " << manifest.files.size() << " file(s) to "
            << req.out_dir.string() << "\n";
  return kExitOk;
}

class HttpFrameSink final : public synthts::FrameSink {
 public:
  explicit HttpFrameSink(httplib::DataSink& sink) : sink_(sink) {}
  bool write(std::span<const std::byte> bytes) override {
    return sink_.is_writable() && sink_.write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  }

 private:
  httplib::DataSink& sink_;
};

int run_stream(const synthts::EpochStreamer& streamer, std::optional<int> port, const std::string& pipe,
               std::uint64_t first_epoch, std::optional<std::uint64_t> epochs) {
  if (port) {
    httplib::Server server;
    server.Get("/info", [&](const httplib::Request&, httplib::Response& res) {
      const synthts::LabelSchema schema(streamer.config());
      nlohmann::json j{{"engine_version", synthts::kEngineVersion},
                       {"schema_version", synthts::kLabelSchemaVersion},
                       {"seed", streamer.seed()},
                       {"epoch_size", streamer.epoch_size()},
                       {"window_len", streamer.window_len()},
                       {"channels", streamer.channels()},
                       {"config", synthts::config_to_json(streamer.config())},
                       {"channel_names", schema.channel_names()}};
      res.set_content(j.dump(), "application/json");
    });
    server.Get(R"(/epoch/(\d+))", [&](const httplib::Request& req, httplib::Response& res) {
      const std::uint64_t epoch = std::stoull(req.matches[1]);
      res.set_chunked_content_provider("application/octet-stream", [&streamer, epoch](std::size_t, httplib::DataSink& sink) {
        HttpFrameSink frames(sink);
        try {
          streamer.stream_epoch(epoch, frames);
        } catch (const synthts::StreamClosed&) {
          return false;
        }
        sink.done();
        return true;
      });
    });
    std::cerr << "streaming on http://127.0.0.1:" << *port << "/epoch/<n>\n";
    if (!server.listen("127.0.0.1", *port)) throw synthts::WriteError("cannot listen on port " + std::to_string(*port));
    return kExitOk;
  }

  std::FILE* out = stdout;
  if (pipe != "-") {
    out = std::fopen(pipe.c_str(), "wb");
    if (!out) throw synthts::WriteError("cannot open " + pipe);
  }
  synthts::FileSink sink(out);
  try {
    streamer.stream_unlimited(sink, first_epoch, epochs);
  } catch (...) {
    if (out != stdout) std::fclose(out);
    throw;
  }
  if (out != stdout && std::fclose(out) != 0) throw synthts::WriteError("close failed on " + pipe);
  return kExitOk;
}

int run_ingest(const std::filesystem::path& in, std::size_t window_len, std::size_t stride,
               const std::filesystem::path& out) {
  const auto windows = synthts::ingest_real(in, window_len, stride);
  synthts::write_rows_csv(out, windows);
  std::cout << "wrote " << windows.size() << " windows to " << out.string() << "\n";
  return kExitOk;
}

int run_eval(const std::filesystem::path& pred_path, const std::filesystem::path& truth_path,
             const std::vector<std::string>& metrics, const synthts::MetricConfig& mc,
             const std::optional<std::filesystem::path>& out) {
  const auto pred = read_windows(pred_path);
  const auto truth = read_windows(truth_path);
  if (pred.size() != truth.size())
    throw synthts::ShapeMismatch(std::to_string(pred.size()) + " predicted windows vs " +
                                 std::to_string(truth.size()) + " truth windows");
  if (pred.empty()) throw synthts::InvalidSeries("no windows to evaluate");

  auto wants = [&](const char* m) { return std::find(metrics.begin(), metrics.end(), m) != metrics.end(); };
  nlohmann::json per_pair = nlohmann::json::array();
  nlohmann::json mean = nlohmann::json::object();
  for (const auto* m : {"sdl", "dtw", "dh", "mse"})
    if (wants(m)) mean[m] = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    nlohmann::json row;
    if (wants("sdl")) row["sdl"] = synthts::structural_dissimilarity(pred[i], truth[i], mc.win, mc.dynamic_range);
    if (wants("dtw")) row["dtw"] = synthts::dtw(pred[i], truth[i], mc.band);
    if (wants("dh")) row["dh"] = synthts::histogram_distance(pred[i], truth[i], mc.bins);
    if (wants("mse")) row["mse"] = synthts::mse(pred[i], truth[i]);
    for (auto& [k, v] : row.items()) mean[k] = mean[k].get<double>() + v.get<double>() / static_cast<double>(pred.size());
    per_pair.push_back(std::move(row));
  }
  const nlohmann::json report{{"config", synthts::metric_config_to_json(mc)},
                              {"metrics", metrics},
                              {"pairs", pred.size()},
                              {"mean", mean},
                              {"per_pair", per_pair}};
  if (out) {
    std::ofstream f(*out);
    if (!f) throw synthts::WriteError("cannot open " + out->string());
    f << report.dump(2) << "\n";
    if (!f) throw synthts::WriteError("write failed on " + out->string());
  } else {
    std::cout << report.dump(2) << "\n";
  }
  return kExitOk;
}

int run_spectrum(const std::filesystem::path& in, const std::filesystem::path& out) {
  const auto windows = read_windows(in);
  if (windows.empty()) throw synthts::InvalidSeries("no series in " + in.string());
  std::vector<std::vector<double>> mags;
  for (const auto& w : windows) mags.push_back(synthts::dft_magnitude(w));

  std::ofstream f(out);
  if (!f) throw synthts::WriteError("cannot open " + out.string());
  f << "bin,frequency";
  for (std::size_t i = 0; i < mags.size(); ++i) f << ",magnitude_" << i;
  f << "\n";
  std::size_t bins = 0;
  for (const auto& m : mags) bins = std::max(bins, m.size());
  f.precision(17);
  for (std::size_t k = 0; k < bins; ++k) {
    // Frequency uses the first window's length; mixed lengths share bin indices only.
    f << k << "," << static_cast<double>(k) / static_cast<double>(windows[0].size());
    for (const auto& m : mags) {
      f << ",";
      if (k < m.size()) f << m[k];
    }
    f << "\n";
  }
  if (!f) throw synthts::WriteError("write failed on " + out.string());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGPIPE, SIG_IGN);

  CLI::App app{"Synthetic time-series windows with exact generative labels"};
  app.require_subcommand(1);

  // generate
  synthts::DatasetRequest gen;
  EngineOptions gen_engine;
  std::string gen_format = "bin";
  std::string gen_out;
  auto* generate = app.add_subcommand("generate", "Write a labelled synthetic dataset");
  generate->add_option("--seed", gen.seed, "Dataset seed")->required();
  generate->add_option("--count", gen.count, "Number of samples")->required();
  generate->add_option("--window-len", gen.window_len, "Window length N")->capture_default_str();
  generate->add_option("--out", gen_out, "Output directory")->required();
  generate->add_option("--format", gen_format, "csv or bin")->check(CLI::IsMember({"csv", "bin"}))->capture_default_str();
  generate->add_option("--workers", gen.workers, "Worker threads")->capture_default_str();
  gen_engine.attach(generate);

  // stream
  EngineOptions stream_engine;
  std::uint64_t stream_seed = 0;
  std::size_t epoch_size = 0;
  std::size_t stream_window = 256;
  std::optional<int> port;
  std::string pipe;
  std::uint64_t first_epoch = 0;
  std::optional<std::uint64_t> epochs;
  std::size_t queue_capacity = 64;
  auto* stream = app.add_subcommand("stream", "Serve freshly generated epochs as framed binary records");
  stream->add_option("--seed", stream_seed, "Base seed")->required();
  stream->add_option("--epoch-size", epoch_size, "Samples per epoch")->required();
  stream->add_option("--window-len", stream_window, "Window length N")->capture_default_str();
  auto* port_opt = stream->add_option("--port", port, "Serve over HTTP on 127.0.0.1:<port>");
  auto* pipe_opt = stream->add_option("--pipe", pipe, "Write frames to a file or FIFO ('-' for stdout)");
  port_opt->excludes(pipe_opt);
  stream->add_option("--first-epoch", first_epoch, "First epoch for --pipe")->capture_default_str();
  stream->add_option("--epochs", epochs, "Number of epochs for --pipe (default: until the reader closes)");
  stream->add_option("--queue", queue_capacity, "Bounded queue capacity in frames")->capture_default_str();
  stream_engine.attach(stream);

  // ingest
  std::string ingest_in, ingest_out;
  std::size_t ingest_window = 256, ingest_stride = 256;
  auto* ingest = app.add_subcommand("ingest", "Slice a real series into standardized windows");
  ingest->add_option("--in", ingest_in, "Single-column CSV or binary shard")->required();
  ingest->add_option("--window-len", ingest_window, "Window length N")->required();
  ingest->add_option("--stride", ingest_stride, "Stride between windows")->required();
  ingest->add_option("--out", ingest_out, "Output CSV, one window per row")->required();

  // eval
  std::string pred_path, truth_path;
  std::optional<std::string> eval_out;
  std::vector<std::string> metrics{"sdl", "dtw", "dh", "mse"};
  synthts::MetricConfig mc;
  std::optional<std::size_t> band;
  auto* eval = app.add_subcommand("eval", "Compare predicted and true windows");
  eval->add_option("--pred", pred_path, "Predicted windows CSV")->required();
  eval->add_option("--truth", truth_path, "True windows CSV")->required();
  eval->add_option("--metrics", metrics, "Subset of sdl,dtw,dh,mse")
      ->delimiter(',')
      ->check(CLI::IsMember({"sdl", "dtw", "dh", "mse"}));
  eval->add_option("--bins", mc.bins, "Histogram bins")->capture_default_str();
  eval->add_option("--win", mc.win, "SSIM window (odd)")->capture_default_str();
  eval->add_option("--band", band, "Sakoe-Chiba half-width for DTW");
  eval->add_option("--out", eval_out, "Write the report here instead of stdout");

  // spectrum
  std::string spec_in, spec_out;
  auto* spectrum = app.add_subcommand("spectrum", "One-sided DFT magnitudes as CSV");
  spectrum->add_option("--in", spec_in, "Series CSV (one column, or one window per row)")->required();
  spectrum->add_option("--out", spec_out, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*generate) {
      gen.config = gen_engine.config;
      gen.format = synthts::parse_format(gen_format);
      gen.out_dir = gen_out;
      return run_generate(gen);
    }
    if (*stream) {
      if (!port && pipe.empty()) throw synthts::ConfigError("one of --port or --pipe is required");
      const synthts::EpochStreamer streamer(stream_engine.config, stream_seed, epoch_size, stream_window,
                                            queue_capacity);
      return run_stream(streamer, port, pipe, first_epoch, epochs);
    }
    if (*ingest) return run_ingest(ingest_in, ingest_window, ingest_stride, ingest_out);
    if (*eval) {
      mc.band = band;
      if (eval_out) return run_eval(pred_path, truth_path, metrics, mc, std::filesystem::path(*eval_out));
      return run_eval(pred_path, truth_path, metrics, mc, std::nullopt);
    }
    if (*spectrum) return run_spectrum(spec_in, spec_out);
  } catch (const synthts::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.category());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}
