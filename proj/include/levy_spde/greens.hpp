#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace levy_spde {

enum class Operator { Heat, Wave, Poisson };

std::string operator_name(Operator op);
/// Parses "heat", "wave" or "poisson" (case-sensitive); ParameterError otherwise.
Operator parse_operator(const std::string& name);

/**
 * @brief Fundamental solution of the heat, wave or Poisson operator.
 *
 * Heat and Wave live on R_+ x R^d and take points (t, x_1..x_d); Poisson
 * lives on R^d. Wave with dim >= 3 is a catalog entry only: its fundamental
 * solution is not a function and every pointwise query throws.
 */
struct GreenFunction final {
  Operator op = Operator::Heat;
  int dim = 1;

  void validate() const;

  bool pointwise() const noexcept { return !(op == Operator::Wave && dim >= 3); }
  bool space_time() const noexcept { return op != Operator::Poisson; }
  std::size_t point_dim() const noexcept {
    return static_cast<std::size_t>(dim) + (space_time() ? 1 : 0);
  }
  /// Short identifier such as "heat-d1".
  std::string id() const;

  /// Support predicate: t > 0 (Heat), |x| <= t (Wave d=1), |x| < t (Wave d=2), x != 0 (Poisson d >= 2).
  bool in_support(std::span<const double> point) const;

  bool operator==(const GreenFunction&) const = default;
};

/// Kernel value; singular is set on the Wave d=2 cone and at the Poisson origin (d >= 2).
struct GreenValue final {
  double value = 0.0;
  bool singular = false;
};

inline constexpr double kSingularValue = std::numeric_limits<double>::infinity();

/// Pointwise kernel; UnsupportedError for Wave d >= 3.
GreenValue eval_green(const GreenFunction& g, std::span<const double> point);

/// Normalizing constant C_d = 2 pi^{d/2} (d-2) / Gamma(d/2) of the Poisson kernel, d >= 3.
double poisson_constant(int d);

/**
 * @brief Bump A exp(-1/(1 - r^2)) on the ellipsoid r^2 = sum ((x_i - c_i)/a_i)^2 < 1.
 */
struct TestFunction final {
  std::vector<double> center;
  std::vector<double> radii;
  double amplitude = 1.0;

  void validate() const;
  std::size_t dim() const noexcept { return center.size(); }
  std::vector<double> support_lo() const;
  std::vector<double> support_hi() const;

  bool operator==(const TestFunction&) const = default;
};

double eval_test(const TestFunction& phi, std::span<const double> point);

/// Integral of phi; the radial reduction is integrated to relative 1e-10.
double eval_test_mass(const TestFunction& phi);

/// phi_n^t(x) = n^D phi(n (x - t)).
TestFunction rescale(const TestFunction& phi, double n, std::span<const double> t);

/// Finite linear combination of bumps; convolutions are taken term by term.
struct TestCombination final {
  std::vector<TestFunction> terms;

  TestCombination() = default;
  TestCombination(TestFunction phi) { terms.push_back(std::move(phi)); }  // NOLINT

  std::size_t dim() const;
  void validate() const;
  double operator()(std::span<const double> point) const;

  /// Positive and negative parts by amplitude sign; each term is one-signed.
  TestCombination positive_part() const;
  TestCombination negative_part() const;
};

TestCombination operator+(TestCombination a, const TestCombination& b);
TestCombination operator*(double s, TestCombination a);

struct ConvolveOptions final {
  double rel_tol = 1e-6;
  /// Absolute floor; a negative value selects 1e-12 |A| vol(supp phi).
  double abs_tol = -1.0;
  std::size_t max_evals = 2'000'000;
};

struct ConvolveResult final {
  double value = 0.0;
  double error = 0.0;
  std::size_t evals = 0;
  bool converged = true;
};

/**
 * (phi * rho_check)(p) = int rho(s - p) phi(s) ds over supp phi.
 *
 * Each kernel is integrated in coordinates that absorb its singularity:
 * parabolic scaling for Heat, the light-cone parametrization for Wave and
 * polar coordinates around the pole for Poisson. The result carries
 * converged = false when the evaluation budget ran out.
 */
ConvolveResult convolve(const TestFunction& phi, const GreenFunction& g,
                        std::span<const double> point, const ConvolveOptions& options = {});

/// Value of convolve(); throws AccuracyError with the best estimate when not converged.
double convolve_check(const TestFunction& phi, const GreenFunction& g,
                      std::span<const double> point, const ConvolveOptions& options = {});

double convolve_check(const TestCombination& phi, const GreenFunction& g,
                      std::span<const double> point, const ConvolveOptions& options = {});

}  // namespace levy_spde
