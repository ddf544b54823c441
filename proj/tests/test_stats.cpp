#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "levy_spde/errors.hpp"
#include "levy_spde/noise.hpp"
#include "levy_spde/rng.hpp"
#include "levy_spde/stats.hpp"

using namespace levy_spde;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> gaussian(std::size_t n, double sd, std::uint64_t seed) {
  rng::CounterRng r(seed, 0);
  std::vector<double> xs(n);
  for (auto& x : xs) {
    const double u1 = r.next_open01(), u2 = r.next_open01();
    x = sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }
  return xs;
}

}  // namespace

TEST(EmpiricalCf, AllZeroSamples) {
  const std::vector<double> xs(10, 0.0);
  const std::vector<double> u{0.5, 1.0, 7.0};
  for (const auto& z : empirical_cf(xs, u)) {
    EXPECT_EQ(z.real(), 1.0);
    EXPECT_EQ(z.imag(), 0.0);
  }
}

TEST(EmpiricalCf, OppositeHalfTurns) {
  const double u = 2.0;
  const std::vector<double> xs{kPi / u, -kPi / u};
  const std::vector<double> us{u};
  const auto z = empirical_cf(xs, us)[0];
  EXPECT_NEAR(z.real(), -1.0, 1e-15);
  EXPECT_NEAR(z.imag(), 0.0, 1e-15);
}

TEST(EmpiricalCf, RejectsEmptyInput) {
  const std::vector<double> xs;
  const std::vector<double> u{1.0};
  EXPECT_THROW(empirical_cf(xs, u), ParameterError);
}

TEST(EmpiricalCf, CauchyAtOne) {
  const auto xs = sample_sas({1.0, 1.0}, 1'000'000, 12);
  const std::vector<double> u{1.0};
  EXPECT_NEAR(empirical_cf(xs, u)[0].real(), std::exp(-1.0), 4e-3);
}

TEST(StableCf, ClosedForm) {
  EXPECT_DOUBLE_EQ(stable_cf(1.5, 1.0, 0.0), 1.0);
  EXPECT_NEAR(stable_cf(0.5, 2.0, -3.0), std::exp(-std::pow(6.0, 0.5)), 1e-15);
}

TEST(CfTest, StableSamplesPass) {
  const std::size_t n = 100'000;
  const auto xs = sample_sas({1.5, 1.0}, n, 21);
  const std::vector<double> u{0.5, 1.0, 2.0};
  const auto r = cf_test(xs, 1.5, 1.0, u);
  EXPECT_TRUE(r.passed);
  EXPECT_NEAR(r.band, 4.0 / std::sqrt(static_cast<double>(n)), 1e-15);
  EXPECT_EQ(r.n_samples, n);
}

TEST(CfTest, PassRateOverTrials) {
  const std::vector<double> u{0.5, 1.0, 2.0};
  int passes = 0;
  for (std::uint64_t k = 0; k < 100; ++k) {
    const auto xs = sample_sas({1.5, 1.0}, 100'000, rng::derive_seed(500, k));
    passes += cf_test(xs, 1.5, 1.0, u).passed;
  }
  EXPECT_GE(passes, 99);
}

TEST(CfTest, GaussianFailsAgainstHeavyTail) {
  const auto xs = gaussian(100'000, std::sqrt(2.0), 3);
  const std::vector<double> u{0.5, 1.0, 2.0};
  const auto r = cf_test(xs, 0.8, 1.0, u);
  EXPECT_FALSE(r.passed);
  // Gaussian with variance 2 has CF e^{-u^2}; it agrees with the alpha = 2 law.
  EXPECT_TRUE(cf_test(xs, 2.0, 1.0, u).passed);
}

TEST(CfTest, Deterministic) {
  const auto xs = sample_sas({0.9, 1.0}, 20'000, 8);
  const std::vector<double> u{1.0, 3.0};
  const auto a = cf_test(xs, 0.9, 1.0, u);
  const auto b = cf_test(xs, 0.9, 1.0, u);
  EXPECT_EQ(a.empirical, b.empirical);
  EXPECT_EQ(a.max_gap, b.max_gap);
}

TEST(CfTest, AgainstExplicitTheory) {
  const auto xs = sample_sas({1.0, 0.5}, 100'000, 30);
  const std::vector<double> u{1.0, 2.0};
  const std::vector<double> theory{std::exp(-0.5), std::exp(-1.0)};
  EXPECT_TRUE(cf_test_against(xs, theory, u).passed);
}

TEST(StableCdf, CauchyClosedForm) {
  for (double x : {-3.0, -1.0, 0.0, 0.4, 2.0}) {
    EXPECT_NEAR(stable_cdf(1.0, 1.0, x), 0.5 + std::atan(x) / kPi, 1e-12) << x;
  }
}

TEST(StableCdf, GaussianClosedForm) {
  for (double x : {-2.0, -0.5, 0.7, 1.5}) {
    EXPECT_NEAR(stable_cdf(2.0, 1.0, x), 0.5 * std::erfc(-x / 2.0), 1e-8) << x;
  }
}

TEST(StableCdf, SymmetryAndMonotonicity) {
  for (double a : {0.5, 1.3, 1.8}) {
    EXPECT_NEAR(stable_cdf(a, 1.0, 0.0), 0.5, 1e-10);
    EXPECT_NEAR(stable_cdf(a, 1.0, 1.2) + stable_cdf(a, 1.0, -1.2), 1.0, 1e-9);
    EXPECT_LT(stable_cdf(a, 1.0, 0.5), stable_cdf(a, 1.0, 0.6));
  }
}

TEST(StableQuantile, InvertsCdf) {
  EXPECT_NEAR(stable_quantile(1.0, 1.0, 0.75), 1.0, 1e-12);
  EXPECT_NEAR(stable_quantile(2.0, 1.0, 0.75), std::sqrt(2.0) * 0.6744897501960817, 1e-7);
  for (double a : {0.6, 1.5}) {
    const double q = stable_quantile(a, 2.0, 0.9);
    EXPECT_NEAR(stable_cdf(a, 2.0, q), 0.9, 1e-9);
  }
}

TEST(SampleQuantile, LinearInterpolation) {
  EXPECT_DOUBLE_EQ(sample_quantile({3.0, 1.0, 2.0, 4.0}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(sample_quantile({5.0}, 0.3), 5.0);
  EXPECT_DOUBLE_EQ(sample_quantile({0.0, 10.0}, 0.25), 2.5);
}

TEST(QuantileCheck, CauchyQuartiles) {
  const auto xs = sample_sas({1.0, 1.0}, 1'000'000, 40);
  const auto r = quantile_check(xs, 1.0);
  EXPECT_TRUE(r.passed);
  EXPECT_NEAR(r.empirical[1], -1.0, 0.02);
  EXPECT_NEAR(r.empirical[3], 1.0, 0.02);
  EXPECT_NEAR(r.empirical[2], 0.0, 0.02);
}

TEST(QuantileCheck, GaussianQuartiles) {
  const double sigma = 1.0;
  const auto xs = sample_sas({2.0, sigma}, 1'000'000, 41);
  const auto r = quantile_check(xs, 2.0, sigma);
  EXPECT_TRUE(r.passed);
  EXPECT_NEAR(r.empirical[3], sigma * std::sqrt(2.0) * 0.6745, 0.02);
}

TEST(QuantileCheck, WrongLawFails) {
  const auto xs = sample_sas({1.0, 1.0}, 100'000, 42);
  EXPECT_FALSE(quantile_check(xs, 1.8).passed);
}

TEST(QuantileCheck, RefusesSmallSamples) {
  const auto xs = sample_sas({1.0, 1.0}, 9'999, 43);
  EXPECT_THROW(quantile_check(xs, 1.0), RefusedError);
}
