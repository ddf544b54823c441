#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

namespace levy_spde {

/// (1/n) sum_k exp(i u x_k) for each u; ParameterError on empty input.
std::vector<std::complex<double>> empirical_cf(std::span<const double> samples,
                                               std::span<const double> u_values);

/// exp(-scale^alpha |u|^alpha).
double stable_cf(double alpha, double scale, double u);

struct CFTest final {
  std::vector<double> u_values;
  std::vector<std::complex<double>> empirical;
  std::vector<double> theoretical;
  double band = 0.0;
  std::size_t n_samples = 0;
  double max_gap = 0.0;
  double max_imag = 0.0;
  bool passed = false;
};

CFTest cf_test(std::span<const double> samples, double alpha, double scale,
               std::span<const double> u_values, double band_multiplier = 4.0);

/// Same test against an arbitrary real target CF.
CFTest cf_test_against(std::span<const double> samples, std::span<const double> theoretical,
                       std::span<const double> u_values, double band_multiplier = 4.0);

/// CDF of SaS(scale) by Gil-Pelaez inversion of its characteristic function.
double stable_cdf(double alpha, double scale, double x);

/// Inverse of stable_cdf by bisection.
double stable_quantile(double alpha, double scale, double p);

struct QuantileReport final {
  double alpha = 1.0;
  double scale = 1.0;
  std::size_t n_samples = 0;
  std::vector<double> probabilities;
  std::vector<double> empirical;
  std::vector<double> theoretical;
  std::vector<double> gaps;
  /// (q_0.95 - q_0.05) / (q_0.75 - q_0.25), empirical and theoretical.
  double ratio_empirical = 0.0;
  double ratio_theoretical = 0.0;
  double max_gap = 0.0;
  double tolerance = 0.02;
  bool passed = false;
};

/// Refuses (RefusedError) below 10^4 samples.
QuantileReport quantile_check(std::span<const double> samples, double alpha, double scale = 1.0,
                              double tolerance = 0.02);

/// Empirical p-quantile with linear interpolation between order statistics.
double sample_quantile(std::vector<double> samples, double p);

}  // namespace levy_spde
