#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace levy_spde {

struct Box final {
  std::vector<double> lo;
  std::vector<double> hi;

  std::size_t dim() const noexcept { return lo.size(); }
  double volume() const;
  bool empty() const;
};

struct CubatureOptions final {
  double rel_tol = 1e-6;
  double abs_tol = 0.0;
  std::size_t max_evals = 4'000'000;
  /// Each axis is cut into this many equal pieces before adaptation starts.
  int initial_splits = 1;
};

struct CubatureResult final {
  double value = 0.0;
  double error = 0.0;
  std::size_t evals = 0;
  bool converged = true;
};

using Integrand = std::function<double(std::span<const double>)>;

/**
 * Globally adaptive integration over a box: Gauss-Kronrod 7/15 in one
 * dimension, the Genz-Malik degree 7/5 rule otherwise. The region with the
 * largest error estimate is bisected until the summed estimate drops below
 * max(abs_tol, rel_tol |value|) or the evaluation budget is spent, in which
 * case converged is false and value holds the best estimate.
 */
CubatureResult integrate(const Integrand& f, const Box& box, const CubatureOptions& options = {});

/// One-dimensional convenience wrapper.
CubatureResult integrate_1d(const std::function<double(double)>& f, double a, double b,
                            const CubatureOptions& options = {});

/// Same as integrate_1d but throws AccuracyError when not converged.
double integrate_1d_or_throw(const std::function<double(double)>& f, double a, double b,
                             const CubatureOptions& options = {});

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule final {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule gauss_legendre(std::size_t n);

}  // namespace levy_spde
