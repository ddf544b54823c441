#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "levy_spde/grid.hpp"

namespace levy_spde {

/// Real-valued field on R^d, evaluated at a point given as a coordinate span.
using ScalarField = std::function<double(std::span<const double>)>;

/**
 * @brief Symmetric alpha-stable law with characteristic function
 * exp(-scale^alpha |u|^alpha).
 *
 * alpha = 2 is admitted as the Gaussian limit (variance 2 scale^2).
 */
struct StableParams final {
  double alpha = 1.0;
  double scale = 1.0;

  void validate() const;
};

/// One standard SaS(1) draw by the Chambers-Mallows-Stuck transform.
double standard_sas(double alpha, double uniform_open01, double exponential) noexcept;

/// n i.i.d. draws; draw i depends only on (seed, i).
std::vector<double> sample_sas(const StableParams& params, std::size_t n, std::uint64_t seed);

/**
 * @brief Discretized SaS white noise: one independent increment per grid cell.
 *
 * increments[i] is SaS with scale v^{1/alpha}, v the cell volume, so the sum
 * over any union of cells with total volume V has characteristic function
 * exp(-V |u|^alpha).
 */
struct NoiseRealization final {
  GridSpec grid;
  double alpha = 1.0;
  std::vector<double> increments;
  std::uint64_t seed = 0;
};

NoiseRealization sample_white_noise(const GridSpec& grid, double alpha, std::uint64_t seed);

/// Noise built from explicit increments (used by deserialization and linearity checks).
NoiseRealization make_noise(GridSpec grid, double alpha, std::vector<double> increments,
                            std::uint64_t seed);

/// f evaluated at every cell midpoint; throws NumericalDomainError on non-finite values.
std::vector<double> midpoint_values(const GridSpec& grid, const ScalarField& f);

/// sum_i f(midpoint_i) * increment_i, summed in cell order.
double pair_noise(const NoiseRealization& noise, const ScalarField& f);

/// sum_i weights[i] * increment_i for precomputed midpoint weights.
double pair_noise_weights(const NoiseRealization& noise, std::span<const double> weights);

/**
 * @brief Finite symmetric Levy measure on R \ {0}.
 *
 * CompoundPoissonUniform: rate * Uniform[-a, a].
 * CompoundPoissonTwoPoint: rate/2 (delta_a + delta_{-a}).
 * TruncatedStable: density 1/(2|z|^{alpha+1}) on inner <= |z| <= outer.
 */
struct LevyMeasureSpec final {
  enum class Kind { CompoundPoissonUniform, CompoundPoissonTwoPoint, TruncatedStable };

  Kind kind = Kind::CompoundPoissonTwoPoint;
  double rate = 1.0;
  double size = 1.0;  // half-width a or magnitude a
  double alpha = 1.0;
  double inner = 0.1;
  double outer = 10.0;

  static LevyMeasureSpec compound_poisson_uniform(double rate, double half_width);
  static LevyMeasureSpec compound_poisson_two_point(double rate, double magnitude);
  static LevyMeasureSpec truncated_stable(double alpha, double inner, double outer);

  /// ParameterError for infinite total mass or malformed parameters.
  void validate() const;

  double total_mass() const;

  /// Integral of g(z) nu(dz) for the finite measure (adaptive quadrature for densities).
  double integrate(const std::function<double(double)>& g) const;

  /// One jump drawn from nu / total_mass.
  double sample_jump(double uniform_open01, double sign_uniform) const;

  /// CDF of |Z| for Z ~ nu / total_mass.
  double magnitude_cdf(double r) const;
};

struct JumpPoint final {
  std::vector<double> location;
  double jump = 0.0;
};

/// Compound-Poisson realization of the Poisson random measure with intensity ds nu(dz).
struct JumpNoise final {
  GridSpec domain;
  std::vector<JumpPoint> points;
  std::uint64_t seed = 0;
  LevyMeasureSpec measure;
};

/// Poisson draw by inversion (chunked for large means); deterministic in the stream.
std::uint64_t sample_poisson(double mean, std::uint64_t seed, std::uint64_t stream);

JumpNoise sample_jump_noise(const GridSpec& domain, const LevyMeasureSpec& measure,
                            std::uint64_t seed);

/// sum_k f(location_k) * jump_k; no compensator since nu is finite and symmetric.
double pair_jump_noise(const JumpNoise& noise, const ScalarField& f);

}  // namespace levy_spde
