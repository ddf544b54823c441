#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "levy_spde/errors.hpp"
#include "levy_spde/greens.hpp"
#include "levy_spde/grid.hpp"
#include "levy_spde/noise.hpp"
#include "levy_spde/rng.hpp"
#include "levy_spde/solutions.hpp"

using namespace levy_spde;

namespace {

const GreenFunction kHeat1{Operator::Heat, 1};
const GreenFunction kWave1{Operator::Wave, 1};
const GreenFunction kWave2{Operator::Wave, 2};

GridSpec unit_grid(std::int64_t nt, std::int64_t nx) { return make_grid({0.0, -1.0}, {1.0, 2.0}, {nt, nx}); }

NoiseRealization zero_noise(const GridSpec& g) {
  return make_noise(g, 1.5, std::vector<double>(g.total_cells(), 0.0), 0);
}

TestFunction bump(std::vector<double> c, std::vector<double> r, double a = 1.0) {
  return TestFunction{std::move(c), std::move(r), a};
}

double cf_real(const std::vector<double>& xs, double u) {
  double s = 0.0;
  for (double x : xs) s += std::cos(u * x);
  return s / static_cast<double>(xs.size());
}

}  // namespace

TEST(GridId, Format) {
  EXPECT_EQ(grid_id(make_grid({0.0, -1.0}, {1.0, 2.0}, {4, 8})), "0:1:4;-1:1:8");
}

TEST(OffsetMidpoints, ShiftedHalfATimeCell) {
  const auto g = unit_grid(4, 2);
  const auto pts = offset_midpoints(g);
  ASSERT_EQ(pts.size(), 8u);
  EXPECT_DOUBLE_EQ(pts[0][0], 0.25);
  EXPECT_DOUBLE_EQ(pts[0][1], -0.5);
  EXPECT_DOUBLE_EQ(pts[7][0], 1.0);
}

TEST(DiscreteKernel, MidpointValueAwayFromSingularities) {
  const auto g = unit_grid(4, 8);
  const std::vector<double> p{1.0, 0.1};
  for (std::size_t i = 0; i < g.total_cells(); ++i) {
    const auto mid = g.midpoint(i);
    const std::vector<double> q{p[0] - mid[0], p[1] - mid[1]};
    EXPECT_DOUBLE_EQ(discrete_kernel(kHeat1, p, g, i), eval_green(kHeat1, q).value);
  }
}

TEST(DiscreteKernel, WaveTwoConeCellsAreFinite) {
  const auto g = make_grid({0.0, -1.0, -1.0}, {1.0, 2.0, 2.0}, {4, 8, 8});
  const std::vector<double> p{1.0, 0.0, 0.0};
  for (std::size_t i = 0; i < g.total_cells(); ++i) {
    const double k = discrete_kernel(kWave2, p, g, i);
    EXPECT_TRUE(std::isfinite(k));
    EXPECT_GE(k, 0.0);
  }
}

TEST(MildField, ZeroNoiseGivesZeroField) {
  const auto g = unit_grid(8, 8);
  const auto f = mild_field(kHeat1, zero_noise(g), offset_midpoints(g));
  for (double v : f.values) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(f.provenance.grid_id, grid_id(g));
}

TEST(MildField, LinearInNoise) {
  const auto g = unit_grid(8, 16);
  const auto x1 = sample_white_noise(g, 1.5, 1);
  const auto x2 = sample_white_noise(g, 1.5, 2);
  const double a = 1.7, b = -0.4;
  std::vector<double> mix(g.total_cells());
  for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = a * x1.increments[i] + b * x2.increments[i];
  const auto pts = offset_midpoints(g);
  const auto f1 = mild_field(kHeat1, x1, pts);
  const auto f2 = mild_field(kHeat1, x2, pts);
  const auto fm = mild_field(kHeat1, make_noise(g, 1.5, mix, 0), pts);
  for (std::size_t j = 0; j < pts.size(); ++j) {
    EXPECT_NEAR(fm.values[j], a * f1.values[j] + b * f2.values[j], 1e-12 * (1.0 + std::abs(fm.values[j])));
  }
}

TEST(MildField, Deterministic) {
  const auto g = unit_grid(8, 8);
  const auto noise = sample_white_noise(g, 0.8, 9);
  EXPECT_EQ(mild_field(kWave1, noise, offset_midpoints(g)).values,
            mild_field(kWave1, noise, offset_midpoints(g)).values);
}

TEST(MildField, RefusedBeyondThreshold) {
  const auto g = make_grid({0.0, -1.0, -1.0, -1.0}, {1.0, 2.0, 2.0, 2.0}, {2, 2, 2, 2});
  const auto noise = sample_white_noise(g, 1.8, 1);
  EXPECT_THROW(mild_field({Operator::Heat, 3}, noise, offset_midpoints(g)), RefusedError);
  EXPECT_THROW(mild_field({Operator::Wave, 3}, noise, offset_midpoints(g)), UnsupportedError);
}

TEST(MildField, LawMatchesDiscreteNorm) {
  // u(p) = sum_i K_i xi_i with xi_i ~ SaS(v^{1/a}) has CF exp(-v sum |K_i|^a |u|^a).
  const double alpha = 1.5;
  const auto g = unit_grid(8, 8);
  const std::vector<std::vector<double>> pts{{0.75, 0.1}};
  double norm = 0.0;
  for (std::size_t i = 0; i < g.total_cells(); ++i) {
    norm += std::pow(std::abs(discrete_kernel(kHeat1, pts[0], g, i)), alpha);
  }
  norm *= g.cell_volume();
  const std::size_t m = 20'000;
  std::vector<double> xs(m);
  for (std::size_t k = 0; k < m; ++k) {
    xs[k] = mild_field(kHeat1, sample_white_noise(g, alpha, rng::derive_seed(31, k)), pts).values[0];
  }
  for (double u : {0.5, 1.0, 2.0}) {
    EXPECT_NEAR(cf_real(xs, u), std::exp(-norm * std::pow(u, alpha)), 5.0 / std::sqrt(static_cast<double>(m)));
  }
}

TEST(Pairing, ZeroAmplitudeAndZeroNoise) {
  const auto g = unit_grid(8, 8);
  const auto noise = sample_white_noise(g, 1.2, 3);
  EXPECT_EQ(generalized_pairing(bump({0.5, 0.0}, {0.3, 0.4}, 0.0), kHeat1, noise), 0.0);
  EXPECT_EQ(generalized_pairing(bump({0.5, 0.0}, {0.3, 0.4}), kHeat1, zero_noise(g)), 0.0);
}

TEST(Pairing, LinearInTestFunction) {
  const auto g = unit_grid(8, 16);
  const auto noise = sample_white_noise(g, 1.5, 4);
  const auto p1 = bump({0.6, 0.0}, {0.25, 0.4});
  const auto p2 = bump({0.3, 0.5}, {0.2, 0.3});
  const double a = 2.0, b = -3.0;
  const TestCombination mix = a * TestCombination(p1) + b * TestCombination(p2);
  const double lhs = generalized_pairing(mix, kWave1, noise);
  const double rhs = a * generalized_pairing(p1, kWave1, noise) + b * generalized_pairing(p2, kWave1, noise);
  EXPECT_NEAR(lhs, rhs, 1e-12 * (1.0 + std::abs(lhs)));
}

TEST(Pairing, WeightsDotIncrements) {
  const auto g = unit_grid(8, 8);
  const auto noise = sample_white_noise(g, 1.5, 5);
  const auto phi = bump({0.5, 0.0}, {0.3, 0.5});
  const auto w = generalized_weights(phi, kHeat1, g);
  EXPECT_NEAR(pair_noise_weights(noise, w), generalized_pairing(phi, kHeat1, noise), 1e-14);
}

TEST(Pairing, PoissonSupported) {
  const auto g = make_grid({-1.0, -1.0, -1.0}, {2.0, 2.0, 2.0}, {4, 4, 4});
  const auto noise = sample_white_noise(g, 1.5, 6);
  const double v = generalized_pairing(bump({0.0, 0.0, 0.0}, {0.5, 0.5, 0.5}), {Operator::Poisson, 3}, noise);
  EXPECT_TRUE(std::isfinite(v));
}

TEST(Fubini, SharedGridIsExact) {
  const auto g = unit_grid(12, 16);
  const auto phi = TestCombination(bump({0.6, 0.1}, {0.3, 0.4})) + TestCombination(bump({0.3, -0.4}, {0.2, 0.3}, -0.5));
  for (const auto& green : {kHeat1, kWave1}) {
    const auto noise = sample_white_noise(g, 1.5, 42);
    const auto r = fubini_check(phi, green, noise, FubiniMode::SharedGrid);
    EXPECT_TRUE(r.passed) << green.id();
    EXPECT_LE(r.abs_diff, 1e-9 * (1.0 + std::abs(r.lhs)));
    EXPECT_TRUE(r.shared_grid);
  }
}

TEST(Fubini, SharedGridWaveTwo) {
  const auto g = make_grid({0.0, -1.0, -1.0}, {1.0, 2.0, 2.0}, {6, 6, 6});
  const auto noise = sample_white_noise(g, 1.2, 8);
  const auto r = fubini_check(bump({0.6, 0.0, 0.0}, {0.3, 0.4, 0.4}), kWave2, noise, FubiniMode::SharedGrid);
  EXPECT_TRUE(r.passed);
}

TEST(Fubini, ZeroNoise) {
  const auto g = unit_grid(8, 8);
  const auto r = fubini_check(bump({0.5, 0.0}, {0.3, 0.4}), kHeat1, zero_noise(g), FubiniMode::SharedGrid);
  EXPECT_EQ(r.lhs, 0.0);
  EXPECT_EQ(r.rhs, 0.0);
  EXPECT_TRUE(r.passed);
}

TEST(Fubini, RefinementGapShrinks) {
  const auto g = unit_grid(8, 12);
  const auto noise = sample_white_noise(g, 1.5, 11);
  const auto r = fubini_check(bump({0.55, 0.05}, {0.3, 0.4}), kHeat1, noise, FubiniMode::Refinement, 4);
  ASSERT_EQ(r.gaps.size(), 5u);
  int decreasing = 0;
  for (std::size_t k = 1; k < r.gaps.size(); ++k) decreasing += r.gaps[k] < r.gaps[k - 1];
  EXPECT_GE(decreasing, 3);
  EXPECT_LT(r.gaps.back(), r.gaps.front());
  EXPECT_TRUE(r.passed);
  EXPECT_FALSE(r.shared_grid);
}

TEST(Fubini, RefinementOutOfScopeForWaveTwo) {
  const auto g = make_grid({0.0, -1.0, -1.0}, {1.0, 2.0, 2.0}, {4, 4, 4});
  const auto noise = sample_white_noise(g, 1.2, 8);
  EXPECT_THROW(fubini_check(bump({0.6, 0.0, 0.0}, {0.3, 0.4, 0.4}), kWave2, noise, FubiniMode::Refinement),
               UnsupportedError);
}

TEST(Probe, ZeroNoiseGivesZeros) {
  const auto g = unit_grid(16, 32);
  const std::vector<double> t0{0.5, -1.0 + 16.5 * (2.0 / 32.0)};
  const std::vector<double> ns{2.0, 4.0, 8.0};
  for (double v : representation_probe(kHeat1, zero_noise(g), t0, ns)) EXPECT_EQ(v, 0.0);
}

TEST(Probe, ApproachesMildValue) {
  const auto g = unit_grid(32, 64);
  const std::vector<double> t0{0.5, -1.0 + 32.5 * (2.0 / 64.0)};
  const std::vector<double> ns{2.0, 4.0, 8.0, 16.0};
  for (const auto& green : {kHeat1, kWave1}) {
    const auto plan = make_probe_plan(green, g, t0, ns);
    const auto r = run_probe(plan, sample_white_noise(g, 1.5, 17));
    ASSERT_EQ(r.pairings.size(), 4u);
    EXPECT_TRUE(r.passed) << green.id();
    EXPECT_LT(r.gaps.back(), r.gaps.front()) << green.id();
  }
}

TEST(Probe, RejectsBadScales) {
  const auto g = unit_grid(16, 32);
  const std::vector<double> t0{0.5, 0.0};
  const std::vector<double> bad{0.5, 2.0};
  EXPECT_THROW(make_probe_plan(kHeat1, g, t0, bad), ParameterError);
  EXPECT_THROW(make_probe_plan(kHeat1, g, t0, std::vector<double>{}), ParameterError);
}
