#include "levy_spde/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "levy_spde/cubature.hpp"
#include "levy_spde/errors.hpp"

namespace levy_spde {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw ParameterError("alpha must lie in (0, 2]");
}

CFTest evaluate(std::span<const double> samples, std::span<const double> theoretical,
                std::span<const double> u_values, double band_multiplier) {
  if (theoretical.size() != u_values.size()) {
    throw ParameterError("one theoretical value is required per u");
  }
  if (!(band_multiplier > 0.0)) throw ParameterError("band multiplier must be positive");
  CFTest t;
  t.u_values.assign(u_values.begin(), u_values.end());
  t.theoretical.assign(theoretical.begin(), theoretical.end());
  t.empirical = empirical_cf(samples, u_values);
  t.n_samples = samples.size();
  t.band = band_multiplier / std::sqrt(static_cast<double>(samples.size()));
  for (std::size_t k = 0; k < u_values.size(); ++k) {
    t.max_gap = std::max(t.max_gap, std::abs(t.empirical[k] - t.theoretical[k]));
    t.max_imag = std::max(t.max_imag, std::abs(t.empirical[k].imag()));
  }
  t.passed = t.max_gap <= t.band && t.max_imag <= t.band;
  return t;
}

}  // namespace

std::vector<std::complex<double>> empirical_cf(std::span<const double> samples,
                                               std::span<const double> u_values) {
  if (samples.empty()) throw ParameterError("empirical CF of an empty sample");
  std::vector<std::complex<double>> out;
  out.reserve(u_values.size());
  const double inv_n = 1.0 / static_cast<double>(samples.size());
  for (double u : u_values) {
    double re = 0.0;
    double im = 0.0;
    for (double x : samples) {
      re += std::cos(u * x);
      im += std::sin(u * x);
    }
    out.emplace_back(re * inv_n, im * inv_n);
  }
  return out;
}

double stable_cf(double alpha, double scale, double u) {
  check_alpha(alpha);
  if (scale < 0.0) throw ParameterError("scale must be non-negative");
  return std::exp(-std::pow(scale * std::abs(u), alpha));
}

CFTest cf_test(std::span<const double> samples, double alpha, double scale,
               std::span<const double> u_values, double band_multiplier) {
  std::vector<double> theory;
  for (double u : u_values) theory.push_back(stable_cf(alpha, scale, u));
  return evaluate(samples, theory, u_values, band_multiplier);
}

CFTest cf_test_against(std::span<const double> samples, std::span<const double> theoretical,
                       std::span<const double> u_values, double band_multiplier) {
  return evaluate(samples, theoretical, u_values, band_multiplier);
}

double stable_cdf(double alpha, double scale, double x) {
  check_alpha(alpha);
  if (!(scale > 0.0)) throw ParameterError("scale must be positive");
  const double z = x / scale;
  if (z == 0.0) return 0.5;
  if (alpha == 1.0) return 0.5 + std::atan(z) / std::numbers::pi;
  // F(z) = 1/2 + (1/pi) int_0^inf sin(u z) exp(-u^alpha) / u du. The integrand is
  // summed over half-periods of sin(u z) until the envelope exp(-u^alpha) is negligible.
  const double az = std::abs(z);
  const double cutoff = std::pow(40.0, 1.0 / alpha);
  const double period = std::numbers::pi / az;
  CubatureOptions opts;
  opts.rel_tol = 1e-12;
  opts.abs_tol = 1e-14;
  auto f = [&](double u) { return u == 0.0 ? az : std::sin(u * az) * std::exp(-std::pow(u, alpha)) / u; };
  double total = 0.0;
  double a = 0.0;
  const double step = std::min(period, 1.0);
  while (a < cutoff) {
    const double b = std::min(a + step, cutoff);
    total += integrate_1d(f, a, b, opts).value;
    a = b;
  }
  const double half = total / std::numbers::pi;
  return z > 0.0 ? 0.5 + half : 0.5 - half;
}

double stable_quantile(double alpha, double scale, double p) {
  if (!(p > 0.0 && p < 1.0)) throw ParameterError("probability must lie in (0, 1)");
  if (p == 0.5) return 0.0;
  if (alpha == 1.0) return scale * std::tan(std::numbers::pi * (p - 0.5));
  double lo = 0.0;
  double hi = scale;
  const double target = p > 0.5 ? p : 1.0 - p;
  while (stable_cdf(alpha, scale, hi) < target) {
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (stable_cdf(alpha, scale, mid) < target ? lo : hi) = mid;
  }
  const double q = 0.5 * (lo + hi);
  return p > 0.5 ? q : -q;
}

double sample_quantile(std::vector<double> samples, double p) {
  if (samples.empty()) throw ParameterError("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("probability must lie in [0, 1]");
  const double pos = p * static_cast<double>(samples.size() - 1);
  const auto k = static_cast<std::size_t>(std::floor(pos));
  std::nth_element(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(k), samples.end());
  const double lo = samples[k];
  if (k + 1 >= samples.size()) return lo;
  const double hi = *std::min_element(samples.begin() + static_cast<std::ptrdiff_t>(k) + 1, samples.end());
  return lo + (pos - static_cast<double>(k)) * (hi - lo);
}

QuantileReport quantile_check(std::span<const double> samples, double alpha, double scale,
                              double tolerance) {
  check_alpha(alpha);
  if (samples.size() < 10'000) {
    throw RefusedError("quantile check needs at least 10^4 samples");
  }
  QuantileReport r;
  r.alpha = alpha;
  r.scale = scale;
  r.n_samples = samples.size();
  r.tolerance = tolerance;
  r.probabilities = {0.05, 0.25, 0.5, 0.75, 0.95};
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  auto sorted_quantile = [&](double p) {
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto k = static_cast<std::size_t>(std::floor(pos));
    if (k + 1 >= sorted.size()) return sorted[k];
    return sorted[k] + (pos - static_cast<double>(k)) * (sorted[k + 1] - sorted[k]);
  };
  for (double p : r.probabilities) {
    r.empirical.push_back(sorted_quantile(p));
    r.theoretical.push_back(stable_quantile(alpha, scale, p));
  }
  // Quartile gaps decide the verdict; the outer quantiles enter only through the ratio.
  for (std::size_t k = 0; k < r.probabilities.size(); ++k) {
    r.gaps.push_back(std::abs(r.empirical[k] - r.theoretical[k]));
  }
  r.max_gap = std::max({r.gaps[1], r.gaps[2], r.gaps[3]});
  r.ratio_empirical = (r.empirical[4] - r.empirical[0]) / (r.empirical[3] - r.empirical[1]);
  r.ratio_theoretical = (r.theoretical[4] - r.theoretical[0]) / (r.theoretical[3] - r.theoretical[1]);
  r.passed = r.max_gap <= tolerance;
  return r;
}

}  // namespace levy_spde
