#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "levy_spde/cubature.hpp"
#include "levy_spde/errors.hpp"

using namespace levy_spde;

TEST(GaussLegendre, WeightsSumToTwo) {
  for (std::size_t n : {1u, 2u, 5u, 6u, 12u, 20u}) {
    const auto rule = gauss_legendre(n);
    ASSERT_EQ(rule.nodes.size(), n);
    double sum = 0.0;
    for (double w : rule.weights) sum += w;
    EXPECT_NEAR(sum, 2.0, 1e-14) << n;
  }
}

TEST(GaussLegendre, ExactForPolynomialsUpToDegree2nMinus1) {
  const std::size_t n = 6;
  const auto rule = gauss_legendre(n);
  for (int k = 0; k <= 2 * static_cast<int>(n) - 1; ++k) {
    double q = 0.0;
    for (std::size_t i = 0; i < n; ++i) q += rule.weights[i] * std::pow(rule.nodes[i], k);
    const double exact = k % 2 == 1 ? 0.0 : 2.0 / (k + 1);
    EXPECT_NEAR(q, exact, 1e-14) << k;
  }
}

TEST(Integrate1d, SmoothIntegrand) {
  const auto r = integrate_1d([](double x) { return std::exp(x); }, 0.0, 1.0, {.rel_tol = 1e-12});
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, std::numbers::e - 1.0, 1e-12);
}

TEST(Integrate1d, EndpointSingularity) {
  const auto r = integrate_1d([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, {.rel_tol = 1e-8});
  EXPECT_NEAR(r.value, 2.0, 1e-7);
}

TEST(Integrate, GaussianOnSquare) {
  Box box{{-3.0, -3.0}, {3.0, 3.0}};
  const auto r = integrate([](std::span<const double> p) { return std::exp(-p[0] * p[0] - p[1] * p[1]); },
                           box, {.rel_tol = 1e-10});
  const double one_d = std::sqrt(std::numbers::pi) * std::erf(3.0);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, one_d * one_d, 1e-9);
}

TEST(Integrate, PolynomialIn3d) {
  Box box{{0.0, 0.0, 0.0}, {1.0, 2.0, 3.0}};
  const auto r = integrate([](std::span<const double> p) { return p[0] * p[1] * p[1] + p[2]; }, box);
  // int x y^2 + z over the box = (1/2)(8/3)(3) + (1)(2)(9/2)
  EXPECT_NEAR(r.value, 4.0 + 9.0, 1e-10);
}

TEST(Integrate, BudgetExhaustionIsReported) {
  const auto f = [](double x) { return std::sin(1.0 / (x + 1e-6)); };
  const auto r = integrate_1d(f, 0.0, 1.0, {.rel_tol = 1e-14, .max_evals = 200});
  EXPECT_FALSE(r.converged);
  EXPECT_THROW(integrate_1d_or_throw(f, 0.0, 1.0, {.rel_tol = 1e-14, .max_evals = 200}), AccuracyError);
}

TEST(Box, VolumeAndEmptiness) {
  Box b{{0.0, -1.0}, {2.0, 1.0}};
  EXPECT_DOUBLE_EQ(b.volume(), 4.0);
  EXPECT_FALSE(b.empty());
  Box e{{0.0, 1.0}, {2.0, 1.0}};
  EXPECT_TRUE(e.empty());
}
