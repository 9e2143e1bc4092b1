#include <gtest/gtest.h>

#include <csignal>
#include <cstdio>
#include <fstream>
#include <sys/wait.h>
#include <thread>
#include <unistd.h>

#include "httplib.h"
#include "json.hpp"
#include "synthts/synthts.hpp"
#include "test_util.hpp"

using namespace synthts;
using testutil::TempDir;

namespace {

const std::string kCli = SYNTHTS_CLI_PATH;

struct Result {
  int code;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = kCli + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

void write_column(const std::filesystem::path& p, const std::vector<double>& xs) {
  std::ofstream out(p);
  out.precision(17);
  for (double v : xs) out << v << "\n";
}

}  // namespace

TEST(Cli, GenerateBinary) {
  TempDir dir;
  const auto r = run("generate --seed 7 --count 12 --window-len 64 --out " + q(dir / "ds") + " --format bin");
  ASSERT_EQ(r.code, 0);
  const auto data = load_dataset(dir / "ds");
  EXPECT_EQ(data.count, 12u);
  EXPECT_EQ(data.series(11, 0)[3], static_cast<float>(synthesize(7, 11, 64).composite[3]));
}

TEST(Cli, GenerateCsvWithEngineOptions) {
  TempDir dir;
  const auto r = run("generate --seed 1 --count 5 --window-len 100 --out " + q(dir / "ds") +
                     " --format csv --k-min 4 --k-max 6 --max-noise-kernel-frac 0.03 --trend-kernel-min 0.25"
                     " --trend-kernel-max 0.4 --workers 2");
  ASSERT_EQ(r.code, 0);
  const auto m = read_manifest(dir / "ds");
  EXPECT_EQ(m.format, DatasetFormat::Csv);
  EXPECT_EQ(m.config.k_min, 4u);
  EXPECT_EQ(m.config.k_max, 6u);
  EXPECT_DOUBLE_EQ(m.config.max_noise_kernel_frac, 0.03);
  EXPECT_DOUBLE_EQ(m.config.trend_kernel_min_frac, 0.25);
  EXPECT_DOUBLE_EQ(m.config.trend_kernel_max_frac, 0.4);
}

TEST(Cli, ConfigErrorsExitOne) {
  TempDir dir;
  EXPECT_EQ(run("generate --seed 1 --count 0 --out " + q(dir / "a")).code, 1);
  EXPECT_EQ(run("generate --seed 1 --count 3 --window-len 4 --out " + q(dir / "a")).code, 1);
  EXPECT_EQ(run("generate --seed 1 --count 3 --k-min 9 --k-max 3 --out " + q(dir / "a")).code, 1);
  EXPECT_EQ(run("generate --seed 1 --count 3 --format xml --out " + q(dir / "a")).code, 1);
  EXPECT_EQ(run("generate --count 3 --out " + q(dir / "a")).code, 1);
  EXPECT_EQ(run("frobnicate").code, 1);
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("stream --seed 1 --epoch-size 2").code, 1);
  EXPECT_EQ(run("eval --pred a --truth b --metrics sdl,foo").code, 1);
  EXPECT_FALSE(std::filesystem::exists(dir / "a"));
  EXPECT_EQ(run("--help").code, 0);
}

TEST(Cli, IoErrorsExitTwo) {
  TempDir dir;
  std::ofstream(dir / "file") << "x";
  EXPECT_EQ(run("generate --seed 1 --count 3 --out " + q(dir / "file" / "sub")).code, 2);
  EXPECT_EQ(run("ingest --in " + q(dir / "missing.csv") + " --window-len 8 --stride 1 --out " + q(dir / "o.csv")).code,
            2);
  EXPECT_EQ(run("eval --pred " + q(dir / "nope") + " --truth " + q(dir / "nope")).code, 2);
}

TEST(Cli, DataErrorsExitThree) {
  TempDir dir;
  write_column(dir / "short.csv", {1, 2, 3});
  EXPECT_EQ(run("ingest --in " + q(dir / "short.csv") + " --window-len 8 --stride 1 --out " + q(dir / "o.csv")).code,
            3);
  std::ofstream(dir / "bad.csv") << "1\n2\nx\n";
  EXPECT_EQ(run("ingest --in " + q(dir / "bad.csv") + " --window-len 2 --stride 1 --out " + q(dir / "o.csv")).code, 3);
  write_column(dir / "a.csv", std::vector<double>(20, 0.5));
  write_column(dir / "b.csv", std::vector<double>(21, 0.5));
  EXPECT_EQ(run("eval --pred " + q(dir / "a.csv") + " --truth " + q(dir / "b.csv") + " --metrics mse").code, 3);
  std::ofstream(dir / "two.csv") << "1,2,3,4,5,6,7,8,9,10\n1,2,3,4,5,6,7,8,9,10\n";
  std::ofstream(dir / "one.csv") << "1,2,3,4,5,6,7,8,9,10\n";
  EXPECT_EQ(run("eval --pred " + q(dir / "two.csv") + " --truth " + q(dir / "one.csv")).code, 3);
  std::ofstream(dir / "long.csv") << "1,2,3,4,5,6,7,8,9,10,11,12\n";
  EXPECT_EQ(run("eval --pred " + q(dir / "long.csv") + " --truth " + q(dir / "one.csv") + " --metrics dtw --band 1")
                .code,
            3);
}

TEST(Cli, IngestWritesStandardizedWindows) {
  TempDir dir;
  std::vector<double> xs(1000);
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = std::sin(0.05 * static_cast<double>(i)) * 3 + 2;
  write_column(dir / "s.csv", xs);
  ASSERT_EQ(run("ingest --in " + q(dir / "s.csv") + " --window-len 256 --stride 256 --out " + q(dir / "w.csv")).code,
            0);
  const auto rows = read_numeric_rows(dir / "w.csv");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1], standardize(std::span(xs).subspan(256, 256)));
}

TEST(Cli, EvalReport) {
  TempDir dir;
  std::ofstream(dir / "p.csv") << "0,0,1\n0,0\n";
  std::ofstream(dir / "t.csv") << "0,1,1\n1,1\n";
  const auto r = run("eval --pred " + q(dir / "p.csv") + " --truth " + q(dir / "t.csv") + " --metrics mse,dtw,dh --bins 4");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("pairs"), 2);
  EXPECT_EQ(j.at("config").at("bins"), 4);
  EXPECT_EQ(j.at("config").at("win"), 11);
  EXPECT_TRUE(j.at("config").at("band").is_null());
  EXPECT_EQ(j.at("config").at("dtw_cost"), "abs");
  EXPECT_DOUBLE_EQ(j.at("per_pair")[0].at("mse"), 1.0 / 3);
  EXPECT_DOUBLE_EQ(j.at("per_pair")[1].at("mse"), 1.0);
  EXPECT_DOUBLE_EQ(j.at("per_pair")[0].at("dtw"), 0.0);
  EXPECT_DOUBLE_EQ(j.at("per_pair")[1].at("dtw"), 2.0);
  EXPECT_DOUBLE_EQ(j.at("mean").at("mse"), (1.0 / 3 + 1.0) / 2);
  EXPECT_FALSE(j.at("mean").contains("sdl"));
}

TEST(Cli, EvalAllMetricsOnColumns) {
  TempDir dir;
  std::vector<double> a(64), b(64);
  for (std::size_t i = 0; i < 64; ++i) a[i] = std::sin(0.2 * i), b[i] = std::cos(0.2 * i);
  write_column(dir / "a.csv", a);
  write_column(dir / "b.csv", b);
  const auto r = run("eval --pred " + q(dir / "a.csv") + " --truth " + q(dir / "b.csv") + " --band 5 --win 7 --out " +
                     q(dir / "r.json"));
  ASSERT_EQ(r.code, 0);
  std::ifstream in(dir / "r.json");
  const auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j.at("pairs"), 1);
  EXPECT_EQ(j.at("config").at("band"), 5);
  EXPECT_NEAR(j.at("mean").at("sdl").get<double>(), structural_dissimilarity(a, b, 7), 1e-12);
  EXPECT_NEAR(j.at("mean").at("dtw").get<double>(), dtw(a, b, 5), 1e-12);
  EXPECT_NEAR(j.at("mean").at("dh").get<double>(), histogram_distance(a, b), 1e-12);
  EXPECT_NEAR(j.at("mean").at("mse").get<double>(), mse(a, b), 1e-12);
}

TEST(Cli, SpectrumCsv) {
  TempDir dir;
  std::vector<double> x(64);
  for (std::size_t n = 0; n < 64; ++n) x[n] = std::sin(2 * 3.141592653589793 * 8 * n / 64.0);
  write_column(dir / "x.csv", x);
  ASSERT_EQ(run("spectrum --in " + q(dir / "x.csv") + " --out " + q(dir / "s.csv")).code, 0);
  std::ifstream in(dir / "s.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "bin,frequency,magnitude_0");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) row.push_back(std::stod(f));
    rows.push_back(row);
  }
  ASSERT_EQ(rows.size(), 33u);
  EXPECT_DOUBLE_EQ(rows[8][1], 0.125);
  EXPECT_NEAR(rows[8][2], 32.0, 1e-9);
}

TEST(Cli, StreamToPipeMatchesLibrary) {
  const auto r = run("stream --seed 5 --epoch-size 3 --window-len 32 --pipe - --first-epoch 2 --epochs 2");
  ASSERT_EQ(r.code, 0);
  const EpochStreamer s(EngineConfig{}, 5, 3, 32);
  MemorySink sink;
  s.stream_unlimited(sink, 2, 2);
  ASSERT_EQ(r.out.size(), sink.data.size());
  EXPECT_EQ(std::memcmp(r.out.data(), sink.data.data(), sink.data.size()), 0);
}

TEST(Cli, StreamStopsWhenReaderCloses) {
  const std::string cmd = kCli + " stream --seed 1 --epoch-size 100 --window-len 16 --pipe - 2>/dev/null | head -c 5000 >/dev/null";
  const int status = std::system(("bash -c '" + cmd + "; exit ${PIPESTATUS[0]}'").c_str());
  ASSERT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), 2);
}

TEST(Cli, StreamOverHttp) {
  const int port = 20000 + static_cast<int>(::getpid() % 20000);
  const pid_t pid = fork();
  ASSERT_GE(pid, 0);
  if (pid == 0) {
    const std::string port_s = std::to_string(port);
    execl(kCli.c_str(), kCli.c_str(), "stream", "--seed", "11", "--epoch-size", "4", "--window-len", "32", "--port",
          port_s.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  httplib::Client client("127.0.0.1", port);
  client.set_read_timeout(30, 0);
  httplib::Result info;
  for (int attempt = 0; attempt < 100 && !info; ++attempt) {
    info = client.Get("/info");
    if (!info) std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  ASSERT_TRUE(info);
  const auto j = nlohmann::json::parse(info->body);
  EXPECT_EQ(j.at("channels"), 43);
  EXPECT_EQ(j.at("epoch_size"), 4);
  EXPECT_EQ(j.at("channel_names").size(), 43u);

  const auto epoch = client.Get("/epoch/3");
  ASSERT_TRUE(epoch);
  EXPECT_EQ(epoch->status, 200);
  const EpochStreamer s(EngineConfig{}, 11, 4, 32);
  MemorySink sink;
  s.stream_epoch(3, sink);
  ASSERT_EQ(epoch->body.size(), sink.data.size());
  EXPECT_EQ(std::memcmp(epoch->body.data(), sink.data.data(), sink.data.size()), 0);

  kill(pid, SIGTERM);
  int status = 0;
  waitpid(pid, &status, 0);
}
