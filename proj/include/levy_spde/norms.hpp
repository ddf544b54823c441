#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "levy_spde/greens.hpp"
#include "levy_spde/grid.hpp"
#include "levy_spde/noise.hpp"

namespace levy_spde {

enum class NormMethod { ClosedForm, Quadrature };

/**
 * @brief Value of an integrability functional.
 *
 * Norm-type results hold the raw integral of |f|^alpha, never its 1/alpha
 * power. A diverged result has value = +inf and keeps the refinement
 * sequence that led to the decision.
 */
struct NormResult final {
  double value = 0.0;
  NormMethod method = NormMethod::ClosedForm;
  double error_bound = 0.0;
  bool diverged = false;
  /// Partial values, one per refinement level.
  std::vector<double> refinements;
  /// Ratios of successive level increments.
  std::vector<double> ratios;
  std::string note;
};

/// Divergence threshold delta: ratios above 1 + delta on consecutive levels signal growth.
inline constexpr double kDivergenceDelta = 0.05;
inline constexpr int kDivergenceRun = 3;

/// int_0^t int_{R^d} rho_H^alpha; diverged when alpha >= 1 + 2/d.
NormResult heat_norm_closed(double t, double alpha, int d);

/// int over the light cone of (rho_1^O)^alpha up to time T: T^2 / 2^alpha.
NormResult wave1_norm_closed(double T, double alpha);

/// int_0^t int_{|x|<s} (rho_2^O)^alpha = t^{3-alpha} / ((2 pi)^{alpha-1} (2-alpha)(3-alpha)).
NormResult wave2_norm_closed(double t, double alpha);

/**
 * int_domain |rho(shift - s)|^alpha ds by graded dyadic shells toward the
 * kernel singularity. Level l sums the first J0 + 2l shells and adds a
 * geometric tail fitted on the last two; `levels` refinements are taken.
 * Diverged when the last kDivergenceRun increment ratios exceed 1 + delta.
 * Throws AccuracyError when neither verdict is reached.
 */
NormResult lalpha_norm_quadrature(const GreenFunction& g, std::span<const double> shift,
                                  double alpha, const GridSpec& domain, int levels = 5);

/**
 * int |(phi * rho_check)(s)|^alpha ds.
 *
 * Heat and Wave: midpoint sums over `domain`, refined 2x per axis per level.
 * Poisson: whole space, an inner ball plus dyadic annuli around the center
 * of phi; the annulus slope is fitted and the geometric tail extrapolated
 * (diverged when the slope is >= 0). `domain` is ignored for Poisson.
 */
NormResult h1_check(const TestFunction& phi, const GreenFunction& g, double alpha,
                    const GridSpec& domain, int levels = 3);

/**
 * Discrete version of the alpha = 1 integrability condition with the
 * 1 + log_+ factor and mu_phi(dt) = |phi(t)| dt. Only Heat d=1 and Wave d=1.
 */
NormResult alpha_one_condition(const TestFunction& phi, const GreenFunction& g,
                               const GridSpec& domain, int levels = 3);

/// Stable Levy measure 1/(2|z|^{alpha+1}) dz.
struct StableMeasure final {
  double alpha = 1.0;
};

using LevyMeasure = std::variant<LevyMeasureSpec, StableMeasure>;

/// c_alpha = 1/(2 - alpha) + 1/alpha, so int (|w z|^2 ^ 1) nu_alpha(dz) = c_alpha |w|^alpha.
double rajput_rosinski_constant(double alpha);

/// int (|w z|^2 ^ 1) nu(dz) for a fixed amplitude w.
double truncated_second_moment(const LevyMeasure& measure, double w);

/**
 * int_domain int (|f(s) z|^2 ^ 1) nu(dz) ds for a generic field: midpoint
 * sums on `domain` refined 2x per axis for `levels` levels.
 */
NormResult rajput_rosinski_functional(const ScalarField& f, const LevyMeasure& measure,
                                      const GridSpec& domain, int levels = 3);

/// Same functional for f = rho(shift - .); the stable case reduces to c_alpha times the L^alpha norm.
NormResult rajput_rosinski_functional(const GreenFunction& g, std::span<const double> shift,
                                      const LevyMeasure& measure, const GridSpec& domain,
                                      int levels = 5);

struct ExistenceVerdict final {
  Operator equation = Operator::Heat;
  int dim = 1;
  double alpha = 1.0;
  bool mild_exists = false;
  bool generalized_exists = false;
  bool random_field_exists = false;
};

ExistenceVerdict existence_verdict(Operator equation, int d, double alpha);

/// Human-readable threshold statement behind the mild verdict.
std::string mild_condition(Operator equation, int d);

}  // namespace levy_spde
