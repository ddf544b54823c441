#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include "levy_spde/errors.hpp"
#include "levy_spde/grid.hpp"
#include "levy_spde/noise.hpp"
#include "levy_spde/rng.hpp"

using namespace levy_spde;

namespace {

double cf_real(const std::vector<double>& xs, double u) {
  double s = 0.0;
  for (double x : xs) s += std::cos(u * x);
  return s / static_cast<double>(xs.size());
}

double quantile(std::vector<double> xs, double p) {
  std::sort(xs.begin(), xs.end());
  const double pos = p * static_cast<double>(xs.size() - 1);
  const auto k = static_cast<std::size_t>(pos);
  const double f = pos - static_cast<double>(k);
  return k + 1 < xs.size() ? xs[k] * (1.0 - f) + xs[k + 1] * f : xs[k];
}

double mean(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double variance(const std::vector<double>& xs) {
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

}  // namespace

TEST(Rng, StreamsAreReproducibleAndDistinct) {
  rng::CounterRng a(7, 3), b(7, 3), c(7, 4);
  for (int k = 0; k < 10; ++k) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    EXPECT_NE(x, c.next_u64());
  }
  EXPECT_NE(rng::derive_seed(1, 0), rng::derive_seed(1, 1));
}

TEST(Rng, OpenUnitInterval) {
  rng::CounterRng r(11, 0);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  for (int k = 0; k < 100'000; ++k) {
    const double u = r.next_open01();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  EXPECT_GT(lo, 0.0);
  EXPECT_LT(hi, 1.0);
  EXPECT_NEAR(sum / 1e5, 0.5, 0.005);
}

TEST(Grid, IndexingAndMidpoints) {
  const auto g = make_grid({0.0, -1.0}, {1.0, 2.0}, {2, 4});
  EXPECT_EQ(g.total_cells(), 8u);
  EXPECT_DOUBLE_EQ(g.cell_volume(), 0.25);
  EXPECT_EQ(g.multi_index(5), (std::vector<std::int64_t>{1, 1}));
  const std::vector<std::int64_t> idx{1, 1};
  EXPECT_EQ(g.flat_index(idx), 5u);
  EXPECT_EQ(g.midpoint(5), (std::vector<double>{0.75, -0.25}));
  EXPECT_EQ(g.refined(2).cells, (std::vector<std::int64_t>{4, 8}));
  EXPECT_TRUE(g.contains(std::vector<double>{0.5, 0.0}));
  EXPECT_FALSE(g.contains(std::vector<double>{1.5, 0.0}));
}

TEST(Grid, Validation) {
  EXPECT_THROW(make_grid({0.0}, {-1.0}, {4}), ParameterError);
  EXPECT_THROW(make_grid({0.0}, {1.0}, {0}), ParameterError);
  EXPECT_THROW(make_grid({0.0, 0.0}, {1.0}, {4}), ParameterError);
  EXPECT_THROW(make_grid({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}, {1 << 11, 1 << 11, 1 << 11}), ResourceError);
}

TEST(SampleSas, ZeroScaleIsDegenerate) {
  EXPECT_EQ(sample_sas({1.5, 0.0}, 5, 7), std::vector<double>(5, 0.0));
}

TEST(SampleSas, RejectsBadParameters) {
  EXPECT_THROW(sample_sas({0.0, 1.0}, 5, 1), ParameterError);
  EXPECT_THROW(sample_sas({2.5, 1.0}, 5, 1), ParameterError);
  EXPECT_THROW(sample_sas({1.0, -1.0}, 5, 1), ParameterError);
}

TEST(SampleSas, DeterministicPrefix) {
  const auto a = sample_sas({1.3, 1.0}, 100, 99);
  const auto b = sample_sas({1.3, 1.0}, 50, 99);
  EXPECT_TRUE(std::equal(b.begin(), b.end(), a.begin()));
}

TEST(SampleSas, CauchyQuartiles) {
  const auto xs = sample_sas({1.0, 1.0}, 1'000'000, 1);
  EXPECT_NEAR(quantile(xs, 0.25), -1.0, 0.01);
  EXPECT_NEAR(quantile(xs, 0.75), 1.0, 0.01);
}

TEST(SampleSas, CharacteristicFunctionAtOne) {
  const std::size_t n = 1'000'000;
  const auto xs = sample_sas({1.5, 1.0}, n, 2);
  EXPECT_NEAR(cf_real(xs, 1.0), std::exp(-1.0), 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST(SampleSas, ScaleEntersAsPower) {
  const std::size_t n = 200'000;
  const auto xs = sample_sas({0.7, 2.0}, n, 3);
  EXPECT_NEAR(cf_real(xs, 0.25), std::exp(-std::pow(0.5, 0.7)), 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST(SampleSas, GaussianLimitHasVarianceTwo) {
  const auto xs = sample_sas({2.0, 1.0}, 200'000, 4);
  EXPECT_NEAR(variance(xs), 2.0, 0.03);
}

TEST(WhiteNoise, ReusedSeedGivesIdenticalIncrements) {
  const auto g = make_grid({0.0, 0.0}, {1.0, 1.0}, {8, 8});
  EXPECT_EQ(sample_white_noise(g, 1.4, 5).increments, sample_white_noise(g, 1.4, 5).increments);
  EXPECT_NE(sample_white_noise(g, 1.4, 5).increments, sample_white_noise(g, 1.4, 6).increments);
}

TEST(WhiteNoise, SingleUnitCellHasStandardLaw) {
  const auto g = make_grid({0.0}, {1.0}, {1});
  const std::size_t m = 100'000;
  std::vector<double> xs(m);
  for (std::size_t k = 0; k < m; ++k) xs[k] = sample_white_noise(g, 1.2, k).increments[0];
  for (double u : {0.5, 1.0, 2.0}) {
    EXPECT_NEAR(cf_real(xs, u), std::exp(-std::pow(u, 1.2)), 4.0 / std::sqrt(static_cast<double>(m))) << u;
  }
}

TEST(WhiteNoise, SubBoxSumHasVolumeScale) {
  // The left half of a 4x4 grid on the unit square has volume 0.5.
  const auto g = make_grid({0.0, 0.0}, {1.0, 1.0}, {4, 4});
  const double alpha = 1.5;
  const std::size_t m = 100'000;
  std::vector<double> sums(m);
  for (std::size_t k = 0; k < m; ++k) {
    const auto noise = sample_white_noise(g, alpha, rng::derive_seed(77, k));
    double s = 0.0;
    for (std::size_t i = 0; i < 8; ++i) s += noise.increments[i];
    sums[k] = s;
  }
  for (double u : {0.5, 1.0, 2.0}) {
    EXPECT_NEAR(cf_real(sums, u), std::exp(-0.5 * std::pow(u, alpha)), 4.0 / std::sqrt(static_cast<double>(m)));
  }
}

TEST(PairNoise, ZeroFieldGivesExactZero) {
  const auto noise = sample_white_noise(make_grid({0.0}, {1.0}, {16}), 0.9, 1);
  EXPECT_EQ(pair_noise(noise, [](std::span<const double>) { return 0.0; }), 0.0);
}

TEST(PairNoise, Linearity) {
  const auto noise = sample_white_noise(make_grid({0.0, 0.0}, {1.0, 1.0}, {6, 6}), 1.1, 2);
  const ScalarField f = [](std::span<const double> p) { return std::sin(3.0 * p[0]) + p[1]; };
  const ScalarField g = [](std::span<const double> p) { return p[0] * p[1]; };
  const double a = 2.5, b = -0.75;
  const double combined = pair_noise(noise, [&](std::span<const double> p) { return a * f(p) + b * g(p); });
  const double split = a * pair_noise(noise, f) + b * pair_noise(noise, g);
  EXPECT_NEAR(combined, split, 1e-13 * (1.0 + std::abs(combined)));
}

TEST(PairNoise, NonFiniteFieldIsRejected) {
  const auto noise = sample_white_noise(make_grid({0.0}, {1.0}, {4}), 1.0, 1);
  EXPECT_THROW(pair_noise(noise, [](std::span<const double>) { return std::nan(""); }), NumericalDomainError);
}

TEST(PairNoise, WeightsMatchMidpointEvaluation) {
  const auto noise = sample_white_noise(make_grid({0.0}, {2.0}, {10}), 1.7, 4);
  const ScalarField f = [](std::span<const double> p) { return std::exp(-p[0]); };
  const auto w = midpoint_values(noise.grid, f);
  EXPECT_DOUBLE_EQ(pair_noise_weights(noise, w), pair_noise(noise, f));
}

TEST(LevyMeasure, TwoPointAndUniformMasses) {
  EXPECT_DOUBLE_EQ(LevyMeasureSpec::compound_poisson_two_point(3.0, 1.0).total_mass(), 3.0);
  const auto u = LevyMeasureSpec::compound_poisson_uniform(2.0, 0.5);
  EXPECT_DOUBLE_EQ(u.total_mass(), 2.0);
  // E z^2 for Uniform[-a, a] is a^2 / 3.
  EXPECT_NEAR(u.integrate([](double z) { return z * z; }), 2.0 * 0.25 / 3.0, 1e-10);
}

TEST(LevyMeasure, TruncatedStableClosedMass) {
  const double a = 1.5, eps = 0.1, R = 10.0;
  const auto m = LevyMeasureSpec::truncated_stable(a, eps, R);
  // 2 * int_eps^R z^{-a-1} / 2 dz
  const double closed = (std::pow(eps, -a) - std::pow(R, -a)) / a;
  EXPECT_NEAR(m.total_mass(), closed, 1e-10 * closed);
  EXPECT_THROW(LevyMeasureSpec::truncated_stable(a, 0.0, R).validate(), ParameterError);
  EXPECT_THROW(LevyMeasureSpec::compound_poisson_two_point(-1.0, 1.0).validate(), ParameterError);
}

TEST(LevyMeasure, TruncatedStableMagnitudeQuantiles) {
  const double a = 1.5, eps = 0.1, R = 10.0;
  const auto m = LevyMeasureSpec::truncated_stable(a, eps, R);
  rng::CounterRng r(3, 0);
  std::vector<double> mags(100'000);
  int negatives = 0;
  for (auto& x : mags) {
    const double z = m.sample_jump(r.next_open01(), r.next_open01());
    negatives += z < 0.0;
    x = std::abs(z);
  }
  // Inverse of the normalized magnitude law (eps^-a - r^-a) / (eps^-a - R^-a).
  const double ea = std::pow(eps, -a), Ra = std::pow(R, -a);
  for (double p : {0.1, 0.25, 0.5, 0.75, 0.9}) {
    const double q = std::pow(ea - p * (ea - Ra), -1.0 / a);
    EXPECT_NEAR(quantile(mags, p), q, 0.02 * q) << p;
    EXPECT_NEAR(m.magnitude_cdf(q), p, 1e-12);
  }
  EXPECT_NEAR(negatives / 1e5, 0.5, 0.01);
}

TEST(JumpNoise, ZeroRateGivesEmptyProcess) {
  LevyMeasureSpec m = LevyMeasureSpec::compound_poisson_two_point(1.0, 1.0);
  m.rate = 0.0;
  const auto g = make_grid({0.0}, {1.0}, {1});
  EXPECT_TRUE(sample_jump_noise(g, m, 1).points.empty());
}

TEST(JumpNoise, CountMeanVarianceAndLocations) {
  const auto g = make_grid({0.0, 0.0}, {1.0, 1.0}, {1, 1});
  const auto m = LevyMeasureSpec::compound_poisson_two_point(3.0, 1.0);
  const std::size_t seeds = 10'000;
  std::vector<double> counts(seeds);
  for (std::size_t k = 0; k < seeds; ++k) {
    const auto noise = sample_jump_noise(g, m, k);
    counts[k] = static_cast<double>(noise.points.size());
    for (const auto& pt : noise.points) {
      ASSERT_TRUE(g.contains(pt.location));
      ASSERT_EQ(std::abs(pt.jump), 1.0);
    }
  }
  EXPECT_NEAR(mean(counts), 3.0, 3.0 * std::sqrt(3.0 / seeds));
  EXPECT_NEAR(variance(counts), 3.0, 0.3);
}

TEST(JumpNoise, PairingVarianceAndIndependence) {
  const auto g = make_grid({0.0, 0.0}, {2.0, 1.0}, {1, 1});
  const double lambda = 4.0, a = 0.5;
  const auto m = LevyMeasureSpec::compound_poisson_two_point(lambda, a);
  const std::size_t seeds = 10'000;
  std::vector<double> whole(seeds), left(seeds), right(seeds);
  for (std::size_t k = 0; k < seeds; ++k) {
    const auto noise = sample_jump_noise(g, m, rng::derive_seed(123, k));
    whole[k] = pair_jump_noise(noise, [](std::span<const double>) { return 1.0; });
    left[k] = pair_jump_noise(noise, [](std::span<const double> p) { return p[0] < 1.0 ? 1.0 : 0.0; });
    right[k] = pair_jump_noise(noise, [](std::span<const double> p) { return p[0] >= 1.0 ? 1.0 : 0.0; });
  }
  const double expected = lambda * 2.0 * a * a;
  EXPECT_NEAR(variance(whole), expected, 0.1 * expected);
  const double ml = mean(left), mr = mean(right);
  double cov = 0.0;
  for (std::size_t k = 0; k < seeds; ++k) cov += (left[k] - ml) * (right[k] - mr);
  cov /= static_cast<double>(seeds - 1);
  EXPECT_LT(std::abs(cov / std::sqrt(variance(left) * variance(right))), 0.05);
  EXPECT_EQ(pair_jump_noise(sample_jump_noise(g, m, 1), [](std::span<const double>) { return 0.0; }), 0.0);
}

TEST(Poisson, SampleMean) {
  double s = 0.0;
  for (std::uint64_t k = 0; k < 20'000; ++k) s += static_cast<double>(sample_poisson(2.5, 9, k));
  EXPECT_NEAR(s / 2e4, 2.5, 0.05);
  double big = 0.0;
  for (std::uint64_t k = 0; k < 2'000; ++k) big += static_cast<double>(sample_poisson(1500.0, 10, k));
  EXPECT_NEAR(big / 2e3, 1500.0, 3.0);
}
