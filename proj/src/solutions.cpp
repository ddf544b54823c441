#include "levy_spde/solutions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "levy_spde/errors.hpp"
#include "levy_spde/norms.hpp"
#include "levy_spde/parallel.hpp"

namespace levy_spde {

namespace {

// Sub-cells per axis used for Wave d=2 cells that meet the light cone.
constexpr int kConeSubdivision = 4;

class Neumaier {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

bool mild_exists(const GreenFunction& g, double alpha) {
  switch (g.op) {
    case Operator::Heat: return alpha < 1.0 + 2.0 / g.dim;
    case Operator::Wave: return g.dim <= 2;
    case Operator::Poisson: return false;
  }
  return false;
}

void require_mild(const GreenFunction& g, double alpha) {
  g.validate();
  if (!g.pointwise()) {
    throw UnsupportedError("the wave kernel in d >= 3 is not a function; no mild field");
  }
  if (!mild_exists(g, alpha)) {
    std::ostringstream os;
    os << "no mild solution for " << g.id() << " at alpha = " << alpha << " ("
       << mild_condition(g.op, g.dim) << ")";
    throw RefusedError(os.str());
  }
}

void require_dims(const GreenFunction& g, const GridSpec& grid) {
  if (grid.dim() != g.point_dim()) {
    throw ParameterError("noise grid dimension does not match the kernel");
  }
}

// Kernel value at w, pushed off a singular locus along the time axis (axis 0).
double regular_value(const GreenFunction& g, std::span<double> w, double shift) {
  auto v = eval_green(g, w);
  if (!v.singular) return v.value;
  w[0] += shift;
  v = eval_green(g, w);
  if (v.singular) throw NumericalDomainError("kernel singular at a shifted evaluation point");
  return v.value;
}

bool meets_cone(std::span<const double> point, const GridSpec& grid, std::span<const double> mid) {
  // Range of w = point - s over the cell.
  const double ht = 0.5 * grid.cell_width(0);
  const double t_lo = point[0] - mid[0] - ht;
  const double t_hi = point[0] - mid[0] + ht;
  if (t_hi <= 0.0) return false;
  double r_lo2 = 0.0;
  double r_hi2 = 0.0;
  for (std::size_t i = 1; i < grid.dim(); ++i) {
    const double h = 0.5 * grid.cell_width(i);
    const double a = point[i] - mid[i] - h;
    const double b = point[i] - mid[i] + h;
    const double near = a > 0.0 ? a : (b < 0.0 ? -b : 0.0);
    const double far = std::max(std::abs(a), std::abs(b));
    r_lo2 += near * near;
    r_hi2 += far * far;
  }
  return std::sqrt(r_lo2) <= t_hi && std::sqrt(r_hi2) >= std::max(t_lo, 0.0);
}

std::vector<double> kernel_row(const GreenFunction& g, std::span<const double> point,
                               const GridSpec& grid) {
  std::vector<double> row(grid.total_cells());
  for (std::size_t i = 0; i < row.size(); ++i) row[i] = discrete_kernel(g, point, grid, i);
  return row;
}

double dot(std::span<const double> a, std::span<const double> b) {
  Neumaier s;
  for (std::size_t i = 0; i < a.size(); ++i) s.add(a[i] * b[i]);
  return s.value();
}

struct SharedSums {
  double lhs = 0.0;
  double rhs = 0.0;
};

// Both orders of sum_j sum_i v phi(p_j) K(p_j, i) xi_i for one-signed phi.
SharedSums shared_sums(const TestCombination& phi, const GreenFunction& g,
                       const NoiseRealization& noise) {
  SharedSums out;
  if (phi.terms.empty()) return out;
  const auto& grid = noise.grid;
  const auto points = offset_midpoints(grid);
  const double v = grid.cell_volume();
  std::vector<std::size_t> active;
  std::vector<double> mass;
  for (std::size_t j = 0; j < points.size(); ++j) {
    const double f = phi(points[j]);
    if (f != 0.0) {
      active.push_back(j);
      mass.push_back(v * f);
    }
  }
  const std::size_t n = grid.total_cells();
  std::vector<std::vector<double>> rows(active.size());
  parallel_for(active.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t a = begin; a < end; ++a) rows[a] = kernel_row(g, points[active[a]], grid);
  });
  // lhs: integrate the mild field in p.
  Neumaier lhs;
  for (std::size_t a = 0; a < active.size(); ++a) lhs.add(mass[a] * dot(rows[a], noise.increments));
  // rhs: pair the noise with the discrete phi * rho_check.
  Neumaier rhs;
  for (std::size_t i = 0; i < n; ++i) {
    Neumaier w;
    for (std::size_t a = 0; a < active.size(); ++a) w.add(mass[a] * rows[a][i]);
    rhs.add(w.value() * noise.increments[i]);
  }
  out.lhs = lhs.value();
  out.rhs = rhs.value();
  return out;
}

// Cells of `grid` whose box meets [lo, hi].
std::vector<std::size_t> cells_meeting(const GridSpec& grid, std::span<const double> lo,
                                       std::span<const double> hi) {
  std::vector<std::int64_t> first(grid.dim());
  std::vector<std::int64_t> last(grid.dim());
  for (std::size_t a = 0; a < grid.dim(); ++a) {
    const double h = grid.cell_width(a);
    first[a] = std::clamp<std::int64_t>(
        static_cast<std::int64_t>(std::floor((lo[a] - grid.origin[a]) / h)), 0, grid.cells[a] - 1);
    last[a] = std::clamp<std::int64_t>(
        static_cast<std::int64_t>(std::floor((hi[a] - grid.origin[a]) / h)), 0, grid.cells[a] - 1);
    if (hi[a] < grid.origin[a] || lo[a] > grid.origin[a] + grid.extent[a]) return {};
  }
  std::vector<std::size_t> out;
  std::vector<std::int64_t> idx = first;
  while (true) {
    out.push_back(grid.flat_index(idx));
    std::size_t a = grid.dim();
    while (a > 0) {
      --a;
      if (++idx[a] <= last[a]) break;
      idx[a] = first[a];
      if (a == 0) return out;
    }
  }
}

}  // namespace

std::string grid_id(const GridSpec& grid) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < grid.dim(); ++i) {
    if (i) os << ';';
    os << grid.origin[i] << ':' << grid.origin[i] + grid.extent[i] << ':' << grid.cells[i];
  }
  return os.str();
}

double discrete_kernel(const GreenFunction& g, std::span<const double> point, const GridSpec& grid,
                       std::size_t cell) {
  const std::size_t d = grid.dim();
  std::vector<double> mid(d);
  grid.midpoint(cell, mid);
  std::vector<double> w(d);
  if (g.op == Operator::Wave && g.dim == 2 && meets_cone(point, grid, mid)) {
    const int m = kConeSubdivision;
    std::vector<double> h(d);
    for (std::size_t a = 0; a < d; ++a) h[a] = grid.cell_width(a) / m;
    double sum = 0.0;
    for (int i0 = 0; i0 < m; ++i0) {
      for (int i1 = 0; i1 < m; ++i1) {
        for (int i2 = 0; i2 < m; ++i2) {
          const int idx[3] = {i0, i1, i2};
          for (std::size_t a = 0; a < d; ++a) {
            const double s = mid[a] - 0.5 * grid.cell_width(a) + (idx[a] + 0.5) * h[a];
            w[a] = point[a] - s;
          }
          sum += regular_value(g, w, 0.5 * h[0]);
        }
      }
    }
    return sum / (m * m * m);
  }
  for (std::size_t a = 0; a < d; ++a) w[a] = point[a] - mid[a];
  return regular_value(g, w, 0.5 * grid.cell_width(0));
}

std::vector<std::vector<double>> offset_midpoints(const GridSpec& grid) {
  grid.validate();
  std::vector<std::vector<double>> out(grid.total_cells());
  const double half = 0.5 * grid.cell_width(0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = grid.midpoint(i);
    out[i][0] += half;
  }
  return out;
}

Field mild_field(const GreenFunction& g, const NoiseRealization& noise,
                 const std::vector<std::vector<double>>& eval_points) {
  require_mild(g, noise.alpha);
  require_dims(g, noise.grid);
  Field field;
  field.eval_points = eval_points;
  field.values.assign(eval_points.size(), 0.0);
  field.provenance = {g.id(), noise.seed, grid_id(noise.grid)};
  for (const auto& p : eval_points) {
    if (p.size() != g.point_dim()) throw ParameterError("evaluation point has the wrong dimension");
  }
  parallel_for(eval_points.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      const auto row = kernel_row(g, eval_points[j], noise.grid);
      double s = 0.0;
      for (std::size_t i = 0; i < row.size(); ++i) s += row[i] * noise.increments[i];
      if (!std::isfinite(s)) throw NumericalDomainError("mild field value is not finite");
      field.values[j] = s;
    }
  });
  return field;
}

std::vector<double> generalized_weights(const TestCombination& phi, const GreenFunction& g,
                                        const GridSpec& grid, const ConvolveOptions& options) {
  g.validate();
  phi.validate();
  require_dims(g, grid);
  if (phi.dim() != grid.dim()) throw ParameterError("test function dimension does not match the grid");
  std::vector<double> weights(grid.total_cells(), 0.0);
  parallel_for(weights.size(), [&](std::size_t begin, std::size_t end) {
    std::vector<double> mid(grid.dim());
    for (std::size_t i = begin; i < end; ++i) {
      grid.midpoint(i, mid);
      weights[i] = convolve_check(phi, g, mid, options);
    }
  });
  return weights;
}

double generalized_pairing(const TestCombination& phi, const GreenFunction& g,
                           const NoiseRealization& noise, const ConvolveOptions& options) {
  const auto w = generalized_weights(phi, g, noise.grid, options);
  return pair_noise_weights(noise, w);
}

FubiniReport fubini_check(const TestCombination& phi, const GreenFunction& g,
                          const NoiseRealization& noise, FubiniMode mode, int levels) {
  require_mild(g, noise.alpha);
  require_dims(g, noise.grid);
  phi.validate();
  if (phi.dim() != noise.grid.dim()) throw ParameterError("test function dimension does not match the grid");
  FubiniReport report;
  report.shared_grid = mode == FubiniMode::SharedGrid;
  const auto plus = phi.positive_part();
  const auto minus = phi.negative_part();

  if (mode == FubiniMode::SharedGrid) {
    const auto p = shared_sums(plus, g, noise);
    const auto m = shared_sums(minus, g, noise);
    report.lhs = p.lhs + m.lhs;
    report.rhs = p.rhs + m.rhs;
    report.abs_diff = std::abs(report.lhs - report.rhs);
    report.gaps = {report.abs_diff};
    report.passed = report.abs_diff <= 1e-9 * (1.0 + std::abs(report.lhs));
    return report;
  }

  if (!(g.dim == 1 && (g.op == Operator::Heat || g.op == Operator::Wave))) {
    throw UnsupportedError("refinement mode is implemented for Heat d=1 and Wave d=1");
  }
  if (levels < 1) throw ParameterError("at least one refinement level is required");
  const auto& grid = noise.grid;
  ConvolveOptions copts;
  copts.rel_tol = 1e-8;
  for (const auto* part : {&plus, &minus}) {
    if (part->terms.empty()) continue;
    report.rhs += generalized_pairing(*part, g, noise, copts);
  }
  // Bounding box of supp phi, intersected with the grid cells it meets.
  std::vector<double> lo(grid.dim(), std::numeric_limits<double>::infinity());
  std::vector<double> hi(grid.dim(), -std::numeric_limits<double>::infinity());
  for (const auto& t : phi.terms) {
    const auto a = t.support_lo();
    const auto b = t.support_hi();
    for (std::size_t i = 0; i < grid.dim(); ++i) {
      lo[i] = std::min(lo[i], a[i]);
      hi[i] = std::max(hi[i], b[i]);
    }
  }
  const auto coarse = cells_meeting(grid, lo, hi);
  for (int k = 0; k <= levels; ++k) {
    const std::int64_t f = std::int64_t{1} << k;
    const double sub_volume = grid.cell_volume() / static_cast<double>(f * f);
    std::vector<std::vector<double>> points;
    std::vector<double> masses;
    for (std::size_t c : coarse) {
      const auto mid = grid.midpoint(c);
      for (std::int64_t a = 0; a < f; ++a) {
        for (std::int64_t b = 0; b < f; ++b) {
          std::vector<double> p = {
              mid[0] - 0.5 * grid.cell_width(0) + (static_cast<double>(a) + 0.5) * grid.cell_width(0) / f,
              mid[1] - 0.5 * grid.cell_width(1) + (static_cast<double>(b) + 0.5) * grid.cell_width(1) / f};
          const double val = phi(p);
          if (val == 0.0) continue;
          points.push_back(std::move(p));
          masses.push_back(sub_volume * val);
        }
      }
    }
    std::vector<double> u(points.size(), 0.0);
    parallel_for(points.size(), [&](std::size_t begin, std::size_t end) {
      std::vector<double> w(2);
      std::vector<double> mid(2);
      for (std::size_t j = begin; j < end; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < grid.total_cells(); ++i) {
          grid.midpoint(i, mid);
          w[0] = points[j][0] - mid[0];
          w[1] = points[j][1] - mid[1];
          s += eval_green(g, w).value * noise.increments[i];
        }
        u[j] = s;
      }
    });
    Neumaier lhs;
    for (std::size_t j = 0; j < points.size(); ++j) lhs.add(masses[j] * u[j]);
    report.lhs = lhs.value();
    report.gaps.push_back(std::abs(report.lhs - report.rhs));
  }
  report.abs_diff = report.gaps.back();
  int bad_steps = 0;
  for (std::size_t k = 1; k < report.gaps.size(); ++k) {
    if (!(report.gaps[k] < report.gaps[k - 1])) ++bad_steps;
  }
  report.passed = bad_steps <= 1 && report.gaps.back() < report.gaps.front();
  return report;
}

ProbePlan make_probe_plan(const GreenFunction& g, const GridSpec& grid, std::span<const double> t0,
                          std::span<const double> n_list, double base_radius) {
  g.validate();
  if (!g.pointwise()) throw UnsupportedError("the wave kernel in d >= 3 is not a function");
  grid.validate();
  require_dims(g, grid);
  if (t0.size() != grid.dim()) throw ParameterError("probe point has the wrong dimension");
  if (n_list.empty()) throw ParameterError("at least one mollifier scale is required");
  for (double n : n_list) {
    if (!(n >= 1.0)) throw ParameterError("mollifier scales must be >= 1");
  }
  ProbePlan plan;
  plan.g = g;
  plan.grid = grid;
  plan.t0.assign(t0.begin(), t0.end());
  plan.n_list.assign(n_list.begin(), n_list.end());
  double r0 = base_radius;
  if (!(r0 > 0.0)) {
    for (std::size_t a = 0; a < grid.dim(); ++a) r0 = std::max(r0, grid.cell_width(a));
  }
  TestFunction base{std::vector<double>(grid.dim(), 0.0), std::vector<double>(grid.dim(), r0), 1.0};
  base.amplitude = 1.0 / eval_test_mass(base);
  ConvolveOptions copts;
  copts.rel_tol = 1e-7;
  for (double n : n_list) {
    const auto phi = rescale(base, n, t0);
    std::vector<double> w(grid.total_cells(), 0.0);
    std::vector<double> e(grid.total_cells(), 0.0);
    parallel_for(w.size(), [&](std::size_t begin, std::size_t end) {
      std::vector<double> mid(grid.dim());
      for (std::size_t i = begin; i < end; ++i) {
        grid.midpoint(i, mid);
        const auto r = convolve(phi, g, mid, copts);
        if (!r.converged) {
          throw AccuracyError("probe convolution did not reach its tolerance", r.value, r.error);
        }
        w[i] = r.value;
        e[i] = r.error;
      }
    });
    plan.weights.push_back(std::move(w));
    plan.weight_errors.push_back(std::move(e));
  }
  plan.kernel = kernel_row(g, t0, grid);
  return plan;
}

ProbeReport run_probe(const ProbePlan& plan, const NoiseRealization& noise) {
  if (!(noise.grid == plan.grid)) throw ParameterError("noise grid differs from the probe plan grid");
  ProbeReport r;
  r.mild_value = pair_noise_weights(noise, plan.kernel);
  for (std::size_t k = 0; k < plan.n_list.size(); ++k) {
    const double p = pair_noise_weights(noise, plan.weights[k]);
    double floor = 0.0;
    for (std::size_t i = 0; i < noise.increments.size(); ++i) {
      floor += std::abs(noise.increments[i]) * plan.weight_errors[k][i];
    }
    r.pairings.push_back(p);
    r.gaps.push_back(std::abs(p - r.mild_value));
    r.floors.push_back(floor);
  }
  // The gap must shrink over the last two doublings, or already sit at the quadrature floor.
  r.passed = true;
  const std::size_t m = r.gaps.size();
  for (std::size_t k = m >= 3 ? m - 2 : 1; k < m; ++k) {
    const bool shrinks = r.gaps[k] < r.gaps[k - 1];
    const bool at_floor = r.gaps[k] <= r.floors[k] + 1e-12 * (1.0 + std::abs(r.mild_value));
    if (!(shrinks || at_floor)) r.passed = false;
  }
  return r;
}

std::vector<double> representation_probe(const GreenFunction& g, const NoiseRealization& noise,
                                         std::span<const double> t0,
                                         std::span<const double> n_list, double base_radius) {
  require_mild(g, noise.alpha);
  const auto plan = make_probe_plan(g, noise.grid, t0, n_list, base_radius);
  return run_probe(plan, noise).pairings;
}

}  // namespace levy_spde
