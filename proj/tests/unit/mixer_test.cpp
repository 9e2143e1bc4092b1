#include <gtest/gtest.h>

#include "oracles.hpp"
#include "synthts/mixer.hpp"

using namespace synthts;

TEST(Ratios, SumToOne) {
  auto rng = seeded_rng(1, 6);
  for (int i = 0; i < 100000; ++i) {
    const auto r = sample_ratios(rng);
    ASSERT_NEAR(r.sum(), 1.0, 1e-12);
    ASSERT_GE(r.rhythm, 0.0);
    ASSERT_GE(r.noise, 0.0);
    ASSERT_GE(r.trend, 0.0);
  }
}

TEST(Ratios, FlatDirichletMoments) {
  auto rng = seeded_rng(2, 6);
  const int draws = 100000;
  std::array<double, 3> sum{}, sq{};
  for (int i = 0; i < draws; ++i) {
    const auto r = sample_ratios(rng);
    const std::array<double, 3> v{r.rhythm, r.noise, r.trend};
    for (int j = 0; j < 3; ++j) sum[j] += v[j], sq[j] += v[j] * v[j];
  }
  for (int j = 0; j < 3; ++j) {
    const double mean = sum[j] / draws;
    const double var = sq[j] / draws - mean * mean;
    EXPECT_NEAR(mean, 1.0 / 3, 0.005);
    EXPECT_NEAR(var, 1.0 / 18, 0.002);
  }
}

TEST(Compose, PureRatiosSelectComponent) {
  std::mt19937_64 g(1);
  const auto a = oracle::random_vec(g, 64), b = oracle::random_vec(g, 64), c = oracle::random_vec(g, 64);
  EXPECT_EQ(compose(a, b, c, {1, 0, 0}), a);
  EXPECT_EQ(compose(a, b, c, {0, 0, 1}), c);
  EXPECT_EQ(compose(a, b, c, {0, 1, 0}), b);
}

TEST(Compose, MatchesWeightedSumOracle) {
  std::mt19937_64 g(2);
  const auto a = oracle::random_vec(g, 100), b = oracle::random_vec(g, 100), c = oracle::random_vec(g, 100);
  const auto out = compose(a, b, c, {0.2, 0.3, 0.5});
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(out[i], 0.2 * a[i] + 0.3 * b[i] + 0.5 * c[i], 1e-12);
}

TEST(Compose, LengthMismatch) {
  const std::vector<double> a(10), b(11), c(10);
  EXPECT_THROW(compose(a, b, c, {0.3, 0.3, 0.4}), ShapeMismatch);
  EXPECT_THROW(compose(a, a, b, {0.3, 0.3, 0.4}), ShapeMismatch);
}

TEST(Synthesize, BitIdenticalReplay) {
  for (std::uint64_t i = 0; i < 50; ++i) ASSERT_EQ(synthesize(7, i, 256), synthesize(7, i, 256));
}

TEST(Synthesize, IndexAndSeedMatter) {
  EXPECT_NE(synthesize(7, 0, 128).composite, synthesize(7, 1, 128).composite);
  EXPECT_NE(synthesize(7, 0, 128).composite, synthesize(8, 0, 128).composite);
}

TEST(Synthesize, CompositeReconstructsFromComponents) {
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const auto s = synthesize(3, i, 256);
    const auto& r = s.params.ratios;
    ASSERT_NEAR(r.sum(), 1.0, 1e-12);
    const auto again = compose(s.rhythm, s.noise, s.trend, r);
    for (std::size_t n = 0; n < s.composite.size(); ++n) {
      ASSERT_NEAR(again[n], s.composite[n], 1e-12);
      ASSERT_NEAR(r.rhythm * s.rhythm[n] + r.noise * s.noise[n] + r.trend * s.trend[n], s.composite[n], 1e-12);
    }
  }
}

TEST(Synthesize, CompositeBoundedByComponents) {
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const auto s = synthesize(4, i, 256);
    ASSERT_TRUE(all_finite(s.composite));
    for (std::size_t n = 0; n < s.composite.size(); ++n) {
      const double bound = std::max({std::abs(s.rhythm[n]), std::abs(s.noise[n]), std::abs(s.trend[n])});
      ASSERT_LE(std::abs(s.composite[n]), bound + 1e-15);
      ASSERT_LE(std::abs(s.composite[n]), 1.0);
    }
  }
}

TEST(Synthesize, ComponentsStandardized) {
  for (std::uint64_t i = 0; i < 200; ++i) {
    const auto s = synthesize(5, i, 128);
    for (const auto* c : {&s.rhythm, &s.noise, &s.trend}) {
      const auto [mn, mx] = std::minmax_element(c->begin(), c->end());
      if (*mn == *mx) {
        ASSERT_EQ(*mn, 0.0);
      } else {
        ASSERT_EQ(*mn, -1.0);
        ASSERT_EQ(*mx, 1.0);
      }
    }
  }
}

TEST(Synthesize, RenderFromParamsMatches) {
  const EngineConfig cfg;
  const auto p = sample_params(9, 42, 200, cfg);
  EXPECT_EQ(render_sample(p, LabelSchema(cfg)), synthesize(9, 42, 200, cfg));
}

TEST(Synthesize, RejectsInvalidInputs) {
  EXPECT_THROW(synthesize(1, 0, 7), InvalidWindow);
  EngineConfig bad;
  bad.k_min = 0;
  EXPECT_THROW(synthesize(1, 0, 64, bad), ConfigError);
}
