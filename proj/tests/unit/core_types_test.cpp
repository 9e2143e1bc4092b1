#include <gtest/gtest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "synthts/core_types.hpp"
#include "synthts/random.hpp"

using namespace synthts;

TEST(Standardize, MapsEndpoints) {
  const std::vector<double> x{0, 5, 10};
  EXPECT_EQ(standardize(x), (std::vector<double>{-1, 0, 1}));
}

TEST(Standardize, ConstantBecomesZeros) {
  const std::vector<double> x{3, 3, 3};
  EXPECT_EQ(standardize(x), (std::vector<double>{0, 0, 0}));
  EXPECT_EQ(normalize_unit(x), (std::vector<double>{0, 0, 0}));
}

TEST(Standardize, RandomVectorHitsBothEnds) {
  std::mt19937_64 g(1);
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = oracle::random_vec(g, 64, -50, 50);
    const auto y = standardize(x);
    EXPECT_EQ(*std::min_element(y.begin(), y.end()), -1.0);
    EXPECT_EQ(*std::max_element(y.begin(), y.end()), 1.0);
  }
}

TEST(Standardize, RejectsNonFinite) {
  const std::vector<double> x{0, std::nan(""), 1};
  EXPECT_THROW(standardize(x), InvalidSeries);
  const std::vector<double> y{0, INFINITY};
  EXPECT_THROW(normalize_unit(y), InvalidSeries);
}

TEST(Standardize, Idempotent) {
  std::mt19937_64 g(2);
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = oracle::random_vec(g, 64, -3, 7);
    const auto once = standardize(x);
    const auto twice = standardize(once);
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(once[i], twice[i], 1e-12);
  }
}

TEST(Standardize, InvariantUnderPositiveAffine) {
  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> scale(0.01, 100), shift(-100, 100);
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = oracle::random_vec(g, 64);
    const double a = scale(g), b = shift(g);
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = a * x[i] + b;
    const auto sx = standardize(x), sy = standardize(y);
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(sx[i], sy[i], 1e-12);
  }
}

TEST(Standardize, MatchesMinMaxOracle) {
  std::mt19937_64 g(4);
  const auto x = oracle::random_vec(g, 200, -2, 9);
  const auto want = oracle::min_max(x, -1, 1);
  const auto got = standardize(x);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-12);
}

TEST(SeededRng, SameKeySameDraws) {
  auto a = seeded_rng(42, 0), b = seeded_rng(42, 0);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
}

TEST(SeededRng, DifferentStreamsDiffer) {
  auto a = seeded_rng(42, 0), b = seeded_rng(42, 1);
  int equal = 0;
  for (int i = 0; i < 1000; ++i) equal += a() == b();
  EXPECT_EQ(equal, 0);
}

TEST(SeededRng, FirstDrawsPairwiseDistinct) {
  std::set<std::uint64_t> first;
  for (std::uint64_t k = 0; k < 1000; ++k) first.insert(seeded_rng(42, k)());
  EXPECT_GE(first.size(), 990u);
}

TEST(SeededRng, DifferentSeedsDiffer) {
  auto a = seeded_rng(1, 5), b = seeded_rng(2, 5);
  EXPECT_NE(a(), b());
}

TEST(SeededRng, UniformRanges) {
  auto r = seeded_rng(9, 9);
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double v = r.uniform(2.0, 3.0);
    ASSERT_GE(v, 2.0);
    ASSERT_LT(v, 3.0);
    const double w = r.uniform_open_closed(1.0, 8.0);
    ASSERT_GT(w, 1.0);
    ASSERT_LE(w, 8.0);
    const auto k = r.uniform_int(3, 10);
    ASSERT_GE(k, 3u);
    ASSERT_LE(k, 10u);
  }
}

TEST(SeededRng, UniformIntCoversRangeEvenly) {
  auto r = seeded_rng(11, 0);
  std::array<int, 8> counts{};
  const int draws = 80000;
  for (int i = 0; i < draws; ++i) ++counts[r.uniform_int(0, 7)];
  for (int c : counts) EXPECT_NEAR(c, draws / 8, 400);
}

TEST(SeededRng, Uniform01PassesKs) {
  auto r = seeded_rng(12, 0);
  std::vector<double> xs(50000);
  for (double& x : xs) x = r.uniform01();
  EXPECT_LT(oracle::ks_uniform(xs, 0, 1), 0.01);
}

TEST(StreamIds, ComponentsAndEpochsAreDistinct) {
  std::set<std::uint64_t> ids;
  for (std::uint64_t key = 0; key < 100; ++key)
    for (auto tag : {StreamTag::RhythmSpec, StreamTag::NoiseSpec, StreamTag::NoiseRender, StreamTag::TrendSpec,
                     StreamTag::TrendRender, StreamTag::Ratios})
      ids.insert(component_stream_id(key, tag));
  EXPECT_EQ(ids.size(), 600u);
  std::set<std::uint64_t> keys;
  for (std::uint64_t e = 0; e < 10; ++e)
    for (std::uint64_t i = 0; i < 100; ++i) keys.insert(epoch_sample_key(e, i));
  EXPECT_EQ(keys.size(), 1000u);
}

TEST(EngineConfig, DefaultsValidate) { EXPECT_NO_THROW(validate(EngineConfig{})); }

TEST(EngineConfig, RejectsBadRanges) {
  auto bad = [](auto mutate) {
    EngineConfig c;
    mutate(c);
    EXPECT_THROW(validate(c), ConfigError);
  };
  bad([](EngineConfig& c) { c.k_min = 0; });
  bad([](EngineConfig& c) { c.k_min = 5, c.k_max = 4; });
  bad([](EngineConfig& c) { c.k_max = 33, c.label_k_max = 40; });
  bad([](EngineConfig& c) { c.k_max = 11; });
  bad([](EngineConfig& c) { c.max_noise_kernel_frac = 0; });
  bad([](EngineConfig& c) { c.trend_kernel_min_frac = 0.6; });
  bad([](EngineConfig& c) { c.trend_kernel_max_frac = 1.5; });
  bad([](EngineConfig& c) { c.trend_kernel_min_frac = 0.04; });
  bad([](EngineConfig& c) { c.trend_multiplier_max = 1.0; });
  bad([](EngineConfig& c) { c.trend_k_min = 0; });
}

TEST(EngineConfig, WindowFloor) {
  EXPECT_THROW(require_window(7), InvalidWindow);
  EXPECT_NO_THROW(require_window(8));
}
