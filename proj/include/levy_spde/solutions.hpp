#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "levy_spde/greens.hpp"
#include "levy_spde/grid.hpp"
#include "levy_spde/noise.hpp"

namespace levy_spde {

struct Provenance final {
  std::string green_id;
  std::uint64_t noise_seed = 0;
  std::string grid_id;
};

/// Compact grid identifier: origin, extent and cell counts per axis.
std::string grid_id(const GridSpec& grid);

/// Mild-solution values at a list of space-time points.
struct Field final {
  std::vector<std::vector<double>> eval_points;
  std::vector<double> values;
  Provenance provenance;
};

/**
 * Discrete kernel K(p, i) used in place of rho(p - s_i) for cell i.
 *
 * Midpoint value, except for Wave d=2 cells that meet the light cone: those
 * average rho over a 4x-per-axis subdivision, and sub-points that land on the
 * cone are moved half a sub-cell forward in time.
 */
double discrete_kernel(const GreenFunction& g, std::span<const double> point,
                       const GridSpec& grid, std::size_t cell);

/// Cell midpoints moved half a time cell forward, so t - s never vanishes on the grid.
std::vector<std::vector<double>> offset_midpoints(const GridSpec& grid);

/**
 * u_mild(p) = sum_i K(p, i) xi_i. RefusedError when the mild solution does not
 * exist for (equation, d, alpha); UnsupportedError for Wave d >= 3.
 */
Field mild_field(const GreenFunction& g, const NoiseRealization& noise,
                 const std::vector<std::vector<double>>& eval_points);

/// (phi * rho_check) at every cell midpoint of `grid`, the pairing weights.
std::vector<double> generalized_weights(const TestCombination& phi, const GreenFunction& g,
                                        const GridSpec& grid, const ConvolveOptions& options = {});

/// <u_gen, phi> = sum_i (phi * rho_check)(s_i) xi_i.
double generalized_pairing(const TestCombination& phi, const GreenFunction& g,
                           const NoiseRealization& noise, const ConvolveOptions& options = {});

enum class FubiniMode { SharedGrid, Refinement };

struct FubiniReport final {
  double lhs = 0.0;
  double rhs = 0.0;
  double abs_diff = 0.0;
  bool shared_grid = true;
  /// Refinement mode: |lhs_k - rhs| for k = 0..levels; a single entry in shared mode.
  std::vector<double> gaps;
  bool passed = false;
};

/**
 * Compares int u_mild(t) phi(t) dt with <X, phi * rho_check>.
 *
 * SharedGrid evaluates both sides as rearrangements of one double sum over
 * the noise cells and requires abs_diff <= 1e-9 (1 + |lhs|). Refinement keeps
 * the noise fixed, integrates the mild field on sub-grids refined 2^k per
 * cell, and compares with the pairing built from adaptive convolutions; it
 * passes when at most one step fails to decrease the gap and the final gap
 * is below the first. Positive and negative parts of phi are run separately.
 */
FubiniReport fubini_check(const TestCombination& phi, const GreenFunction& g,
                          const NoiseRealization& noise, FubiniMode mode, int levels = 4);

struct ProbeReport final {
  double mild_value = 0.0;
  std::vector<double> pairings;
  std::vector<double> gaps;
  /// Bound on the pairing error from convolution error estimates, per scale.
  std::vector<double> floors;
  bool passed = false;
};

/// Precomputed pairing weights of rescaled mollifiers, reusable across noise seeds.
struct ProbePlan final {
  GreenFunction g;
  GridSpec grid;
  std::vector<double> t0;
  std::vector<double> n_list;
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> weight_errors;
  std::vector<double> kernel;
};

/// base_radius <= 0 selects the largest cell width, so that from n = 2 on the
/// mollifier support stays half a cell away from the neighbouring time rows.
ProbePlan make_probe_plan(const GreenFunction& g, const GridSpec& grid, std::span<const double> t0,
                          std::span<const double> n_list, double base_radius = 0.0);

ProbeReport run_probe(const ProbePlan& plan, const NoiseRealization& noise);

/// <u_gen, phi_n^{t0}> for each n, with phi a unit-mass bump.
std::vector<double> representation_probe(const GreenFunction& g, const NoiseRealization& noise,
                                         std::span<const double> t0,
                                         std::span<const double> n_list, double base_radius = 0.0);

}  // namespace levy_spde
