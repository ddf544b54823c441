#include "levy_spde/norms.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "levy_spde/cubature.hpp"
#include "levy_spde/errors.hpp"
#include "levy_spde/parallel.hpp"

namespace levy_spde {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
// Shells summed at level 0 of the graded quadrature; each level adds two.
constexpr int kBaseShells = 8;

void check_alpha_open(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw ParameterError("alpha must lie in (0, 2)");
}

void check_alpha_closed(double alpha) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw ParameterError("alpha must lie in (0, 2]");
}

void check_time(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw ParameterError("time horizon must be positive and finite");
}

NormResult closed(double value) {
  NormResult r;
  r.value = value;
  r.method = NormMethod::ClosedForm;
  return r;
}

NormResult closed_diverged(const std::string& why) {
  NormResult r;
  r.value = kInf;
  r.diverged = true;
  r.method = NormMethod::ClosedForm;
  r.note = why;
  return r;
}

// int_a^b exp(-c y^2) dy, written with erfc on one-signed intervals to avoid cancellation.
double gauss_interval(double a, double b, double c) {
  const double s = std::sqrt(c);
  const double k = 0.5 * std::sqrt(kPi / c);
  if (a >= 0.0) return k * (std::erfc(a * s) - std::erfc(b * s));
  if (b <= 0.0) return k * (std::erfc(-b * s) - std::erfc(-a * s));
  return k * (std::erf(b * s) - std::erf(a * s));
}

double interval_gap(double a, double b) {
  if (a > 0.0) return a;
  if (b < 0.0) return -b;
  return 0.0;
}

// One chart of a graded quadrature: the grading variable g runs over
// (g_lo, g_hi] and the kernel singularity, if any, sits at g = 0.
struct GradedPiece {
  double g_lo = 0.0;
  double g_hi = 0.0;
  Box aux;
  std::function<double(double, std::span<const double>)> f;
};

struct ShellSums {
  std::vector<double> shells;
  double error = 0.0;
};

ShellSums shell_sums(const std::vector<GradedPiece>& pieces, int count) {
  ShellSums out;
  out.shells.assign(static_cast<std::size_t>(count), 0.0);
  std::vector<double> errors(static_cast<std::size_t>(count), 0.0);
  parallel_for(static_cast<std::size_t>(count), [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      for (const auto& piece : pieces) {
        const double hi = std::min(piece.g_hi, piece.g_hi * std::ldexp(1.0, -static_cast<int>(j)));
        const double lo = std::max(piece.g_lo, piece.g_hi * std::ldexp(1.0, -static_cast<int>(j) - 1));
        if (!(hi > lo)) continue;
        CubatureOptions opts;
        opts.rel_tol = 1e-9;
        opts.abs_tol = 1e-300;
        opts.max_evals = 400'000;
        Box box;
        box.lo.push_back(lo);
        box.hi.push_back(hi);
        box.lo.insert(box.lo.end(), piece.aux.lo.begin(), piece.aux.lo.end());
        box.hi.insert(box.hi.end(), piece.aux.hi.begin(), piece.aux.hi.end());
        const auto r = integrate(
            [&](std::span<const double> x) { return piece.f(x[0], x.subspan(1)); }, box, opts);
        out.shells[j] += r.value;
        errors[j] += r.error;
      }
    }
  });
  for (double e : errors) out.error += e;
  return out;
}

std::string ratios_text(const std::vector<double>& ratios) {
  std::ostringstream os;
  for (std::size_t i = 0; i < ratios.size(); ++i) os << (i ? ", " : "") << ratios[i];
  return os.str();
}

bool growth_run(const std::vector<double>& ratios) {
  if (ratios.size() < static_cast<std::size_t>(kDivergenceRun)) return false;
  return std::all_of(ratios.end() - kDivergenceRun, ratios.end(),
                     [](double r) { return r > 1.0 + kDivergenceDelta; });
}

// Increments that neither shrink nor grow: the partial sums grow linearly
// in the level, which is the logarithmic divergence exactly at a threshold.
constexpr double kMarginalBand = 1e-3;

bool marginal_run(const std::vector<double>& ratios) {
  if (ratios.size() < static_cast<std::size_t>(kDivergenceRun)) return false;
  return std::all_of(ratios.end() - kDivergenceRun, ratios.end(), [](double r) {
    return std::abs(r - 1.0) <= kMarginalBand;
  });
}

// Level l sums the first kBaseShells + 2l shells and extrapolates the rest
// geometrically from the last two shells.
NormResult graded_quadrature(const std::vector<GradedPiece>& pieces, int levels) {
  if (levels < 1) throw ParameterError("at least one refinement level is required");
  const int total = kBaseShells + 2 * levels;
  const auto sums = shell_sums(pieces, total);
  const auto& c = sums.shells;

  NormResult r;
  r.method = NormMethod::Quadrature;
  std::vector<double> extrapolated;
  std::vector<double> increments;
  double partial = 0.0;
  int next = 0;
  for (int level = 0; level <= levels; ++level) {
    const int upto = kBaseShells + 2 * level;
    const double before = partial;
    for (; next < upto; ++next) partial += c[static_cast<std::size_t>(next)];
    r.refinements.push_back(partial);
    if (level > 0) increments.push_back(partial - before);
    const double last = c[static_cast<std::size_t>(upto - 1)];
    const double prev = c[static_cast<std::size_t>(upto - 2)];
    double tail = 0.0;
    if (last > 0.0 && prev > 0.0 && last < prev) {
      const double q = last / prev;
      tail = last * q / (1.0 - q);
    }
    extrapolated.push_back(partial + tail);
  }
  for (std::size_t i = 1; i < increments.size(); ++i) {
    r.ratios.push_back(increments[i - 1] != 0.0 ? increments[i] / increments[i - 1] : 0.0);
  }

  const double scale = std::max(std::abs(partial), 1e-300);
  const double last_inc = increments.back();
  if (std::abs(last_inc) <= 1e-13 * scale) {
    r.value = partial;
    r.error_bound = sums.error + std::abs(last_inc);
    return r;
  }
  if (growth_run(r.ratios) || marginal_run(r.ratios)) {
    r.value = kInf;
    r.diverged = true;
    r.note = "refinement ratios " + ratios_text(r.ratios);
    return r;
  }
  const double last_ratio = r.ratios.empty() ? 0.0 : r.ratios.back();
  if (last_ratio < 1.0) {
    r.value = extrapolated.back();
    r.error_bound = sums.error + std::abs(extrapolated.back() - extrapolated[extrapolated.size() - 2]);
    return r;
  }
  throw AccuracyError("graded quadrature neither converged nor showed sustained growth (ratios " +
                          ratios_text(r.ratios) + ")",
                      partial, std::abs(last_inc), r.ratios);
}

// Unit vector from hyperspherical angles; returns the angular Jacobian.
double spherical_point(std::span<const double> angles, std::span<double> omega) {
  const std::size_t d = omega.size();
  double jac = 1.0;
  double prod = 1.0;
  for (std::size_t k = 0; k + 1 < d; ++k) {
    omega[k] = prod * std::cos(angles[k]);
    const double s = std::sin(angles[k]);
    if (k + 2 < d) jac *= std::pow(s, static_cast<double>(d - 2 - k));
    prod *= s;
  }
  omega[d - 1] = prod;
  return jac;
}

double poisson_abs(int d, double r) {
  if (d == 1) return 0.5 * r;
  if (d == 2) return std::abs(std::log(r)) / (2.0 * kPi);
  return std::pow(r, 2.0 - d) / poisson_constant(d);
}

struct ReflectedBox {
  std::vector<double> lo;
  std::vector<double> hi;
};

// B = shift - domain.
ReflectedBox reflect(std::span<const double> shift, const GridSpec& domain) {
  ReflectedBox b;
  for (std::size_t i = 0; i < domain.dim(); ++i) {
    b.lo.push_back(shift[i] - (domain.origin[i] + domain.extent[i]));
    b.hi.push_back(shift[i] - domain.origin[i]);
  }
  return b;
}

bool inside(const ReflectedBox& b, std::span<const double> w, std::size_t offset) {
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] < b.lo[i + offset] || w[i] > b.hi[i + offset]) return false;
  }
  return true;
}

std::vector<GradedPiece> kernel_pieces(const GreenFunction& g, const ReflectedBox& b, double alpha) {
  std::vector<GradedPiece> pieces;
  const int d = g.dim;
  const auto du = static_cast<std::size_t>(d);
  switch (g.op) {
    case Operator::Heat: {
      GradedPiece p;
      p.g_lo = std::max(0.0, b.lo[0]);
      p.g_hi = b.hi[0];
      if (!(p.g_hi > p.g_lo)) return {};
      std::vector<double> lo(b.lo.begin() + 1, b.lo.end());
      std::vector<double> hi(b.hi.begin() + 1, b.hi.end());
      p.f = [=](double tau, std::span<const double>) {
        double v = std::pow(4.0 * kPi * tau, -0.5 * d * alpha);
        for (int i = 0; i < d; ++i) v *= gauss_interval(lo[i], hi[i], alpha / (4.0 * tau));
        return v;
      };
      pieces.push_back(std::move(p));
      return pieces;
    }
    case Operator::Wave: {
      if (d == 1) {
        GradedPiece p;
        const double a = b.lo[1];
        const double c = b.hi[1];
        p.g_lo = std::max({0.0, b.lo[0], interval_gap(a, c)});
        p.g_hi = b.hi[0];
        if (!(p.g_hi > p.g_lo)) return {};
        const double w = std::pow(2.0, -alpha);
        p.f = [=](double tau, std::span<const double>) {
          return w * std::max(0.0, std::min(c, tau) - std::max(a, -tau));
        };
        pieces.push_back(std::move(p));
        return pieces;
      }
      // eps = angular distance to the light cone: y = tau cos(eps) (cos th, sin th).
      const double tau_lo = std::max(0.0, b.lo[0]);
      const double tau_hi = b.hi[0];
      if (!(tau_hi > tau_lo)) return {};
      double margin = kInf;
      for (std::size_t i = 1; i < 3; ++i) margin = std::min({margin, -b.lo[i], b.hi[i]});
      const bool contained = margin >= tau_hi;
      GradedPiece p;
      p.g_lo = 0.0;
      p.g_hi = 0.5 * kPi;
      p.aux = Box{{tau_lo, 0.0}, {tau_hi, 2.0 * kPi}};
      const double norm = std::pow(2.0 * kPi, -alpha);
      p.f = [=](double eps, std::span<const double> aux) {
        const double tau = aux[0];
        if (tau <= 0.0) return 0.0;
        const double r = tau * std::cos(eps);
        if (!contained) {
          const double y[2] = {r * std::cos(aux[1]), r * std::sin(aux[1])};
          if (y[0] < b.lo[1] || y[0] > b.hi[1] || y[1] < b.lo[2] || y[1] > b.hi[2]) return 0.0;
        }
        return norm * std::pow(tau, 2.0 - alpha) * std::cos(eps) * std::pow(std::sin(eps), 1.0 - alpha);
      };
      pieces.push_back(std::move(p));
      return pieces;
    }
    case Operator::Poisson: {
      if (d == 1) {
        for (double sign : {-1.0, 1.0}) {
          GradedPiece p;
          const double a = sign > 0 ? b.lo[0] : -b.hi[0];
          const double c = sign > 0 ? b.hi[0] : -b.lo[0];
          p.g_lo = std::max(0.0, a);
          p.g_hi = c;
          if (!(p.g_hi > p.g_lo)) continue;
          p.f = [=](double r, std::span<const double>) { return std::pow(0.5 * r, alpha); };
          pieces.push_back(std::move(p));
        }
        return pieces;
      }
      double gap2 = 0.0;
      double reach2 = 0.0;
      for (std::size_t i = 0; i < du; ++i) {
        const double gi = interval_gap(b.lo[i], b.hi[i]);
        const double mi = std::max(std::abs(b.lo[i]), std::abs(b.hi[i]));
        gap2 += gi * gi;
        reach2 += mi * mi;
      }
      GradedPiece p;
      p.g_lo = std::sqrt(gap2);
      p.g_hi = std::sqrt(reach2);
      p.aux.lo.assign(du - 1, 0.0);
      p.aux.hi.assign(du - 1, kPi);
      p.aux.hi[du - 2] = 2.0 * kPi;
      p.f = [=](double r, std::span<const double> ang) {
        std::vector<double> omega(du);
        const double jac = spherical_point(ang, omega);
        for (auto& w : omega) w *= r;
        if (!inside(b, omega, 0)) return 0.0;
        return std::pow(r, d - 1) * std::pow(poisson_abs(d, r), alpha) * jac;
      };
      pieces.push_back(std::move(p));
      return pieces;
    }
  }
  return pieces;
}

// Midpoint sums of h over `domain`, refined 2x per axis per level.
NormResult midpoint_levels(const ScalarField& h, const GridSpec& domain, int levels) {
  domain.validate();
  if (levels < 1) throw ParameterError("at least one refinement level is required");
  NormResult r;
  r.method = NormMethod::Quadrature;
  std::vector<double> increments;
  for (int level = 0; level <= levels; ++level) {
    const GridSpec grid = domain.refined(std::int64_t{1} << level);
    const auto values = midpoint_values(grid, h);
    double sum = 0.0;
    for (double v : values) sum += v;
    sum *= grid.cell_volume();
    if (level > 0) increments.push_back(sum - r.refinements.back());
    r.refinements.push_back(sum);
  }
  for (std::size_t i = 1; i < increments.size(); ++i) {
    r.ratios.push_back(increments[i - 1] != 0.0 ? std::abs(increments[i] / increments[i - 1]) : 0.0);
  }
  const double value = r.refinements.back();
  const double last_inc = std::abs(increments.back());
  if (growth_run(r.ratios)) {
    r.value = kInf;
    r.diverged = true;
    r.note = "refinement ratios " + ratios_text(r.ratios);
    return r;
  }
  const double last_ratio = r.ratios.empty() ? 0.0 : r.ratios.back();
  if (last_ratio >= 1.0 && last_inc > 0.1 * std::abs(value)) {
    throw AccuracyError("midpoint refinement did not settle (ratios " + ratios_text(r.ratios) + ")",
                        value, last_inc, r.ratios);
  }
  r.value = value;
  r.error_bound = last_inc;
  return r;
}

// Fully symmetric degree-5 rule on S^{d-1}, weights normalized to sum 1.
void sphere_rule(int d, std::vector<std::vector<double>>& points, std::vector<double>& weights) {
  const auto du = static_cast<std::size_t>(d);
  points.clear();
  weights.clear();
  if (d == 1) {
    points = {{-1.0}, {1.0}};
    weights = {0.5, 0.5};
    return;
  }
  const double cross_w = 1.0 / (static_cast<double>(d) * (d + 2));
  for (std::size_t i = 0; i < du; ++i) {
    for (double s : {-1.0, 1.0}) {
      std::vector<double> p(du, 0.0);
      p[i] = s;
      points.push_back(std::move(p));
      weights.push_back(cross_w);
    }
  }
  const std::size_t corners = std::size_t{1} << du;
  const double corner_w = static_cast<double>(d) / (d + 2) / static_cast<double>(corners);
  const double inv = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t mask = 0; mask < corners; ++mask) {
    std::vector<double> p(du);
    for (std::size_t i = 0; i < du; ++i) p[i] = ((mask >> i) & 1U ? 1.0 : -1.0) * inv;
    points.push_back(std::move(p));
    weights.push_back(corner_w);
  }
}

double sphere_area(int d) { return 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d); }

NormResult h1_poisson(const TestFunction& phi, const GreenFunction& g, double alpha, int levels) {
  const int d = g.dim;
  const auto du = static_cast<std::size_t>(d);
  const double support = *std::max_element(phi.radii.begin(), phi.radii.end());
  const double r0 = 2.0 * support;
  std::vector<std::vector<double>> dirs;
  std::vector<double> dir_w;
  sphere_rule(d, dirs, dir_w);
  const double area = d == 1 ? 2.0 : sphere_area(d);
  const auto gl = gauss_legendre(6);
  ConvolveOptions copts;
  copts.rel_tol = 1e-5;

  // int_{r_a}^{r_b} r^{d-1} int_S |F(c + r omega)|^alpha, radial nodes in log r when r_a > 0.
  auto shell = [&](double ra, double rb, bool logarithmic) {
    std::vector<std::pair<double, double>> nodes;
    for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
      if (logarithmic) {
        const double la = std::log(ra);
        const double lb = std::log(rb);
        const double s = 0.5 * (la + lb) + 0.5 * (lb - la) * gl.nodes[k];
        const double r = std::exp(s);
        nodes.emplace_back(r, 0.5 * (lb - la) * gl.weights[k] * r);
      } else {
        nodes.emplace_back(0.5 * (ra + rb) + 0.5 * (rb - ra) * gl.nodes[k],
                           0.5 * (rb - ra) * gl.weights[k]);
      }
    }
    std::vector<double> contrib(nodes.size() * dirs.size());
    parallel_for(contrib.size(), [&](std::size_t begin, std::size_t end) {
      std::vector<double> x(du);
      for (std::size_t idx = begin; idx < end; ++idx) {
        const auto& [r, w] = nodes[idx / dirs.size()];
        const std::size_t j = idx % dirs.size();
        for (std::size_t i = 0; i < du; ++i) x[i] = phi.center[i] + r * dirs[j][i];
        const double f = convolve_check(phi, g, x, copts);
        contrib[idx] = w * std::pow(r, d - 1) * dir_w[j] * area * std::pow(std::abs(f), alpha);
      }
    });
    double s = 0.0;
    for (double v : contrib) s += v;
    return s;
  };

  NormResult r;
  r.method = NormMethod::Quadrature;
  const double inner = shell(0.0, support, false) + shell(support, r0, false);
  const int annuli = 4 + 2 * levels;
  std::vector<double> a;
  double partial = inner;
  for (int k = 1; k <= annuli; ++k) {
    const double v = shell(r0 * std::ldexp(1.0, k - 1), r0 * std::ldexp(1.0, k), true);
    a.push_back(v);
    partial += v;
    r.refinements.push_back(partial);
    if (k > 1) r.ratios.push_back(a[a.size() - 2] > 0.0 ? v / a[a.size() - 2] : 0.0);
  }
  // Least-squares slope of log2(annulus value) against k over the last four annuli.
  const int fit = 4;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::vector<double> ys;
  for (int k = annuli - fit; k < annuli; ++k) {
    if (!(a[static_cast<std::size_t>(k)] > 0.0)) {
      throw AccuracyError("annulus value vanished; tail fit impossible", partial, kInf, a);
    }
    const double y = std::log2(a[static_cast<std::size_t>(k)]);
    ys.push_back(y);
    sx += k;
    sy += y;
    sxx += static_cast<double>(k) * k;
    sxy += k * y;
  }
  const double n = fit;
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double icpt = (sy - slope * sx) / n;
  double resid = 0.0;
  for (int i = 0; i < fit; ++i) {
    const int k = annuli - fit + i;
    resid = std::max(resid, std::abs(ys[static_cast<std::size_t>(i)] - (icpt + slope * k)));
  }
  std::ostringstream note;
  note << "annulus slope " << slope << " (tail exponent " << slope - d << ")";
  r.note = note.str();
  if (resid > 0.1 || std::abs(slope) < 0.02) {
    throw AccuracyError("inconclusive tail fit: " + r.note, partial, kInf, a);
  }
  if (slope > 0.0) {
    r.value = kInf;
    r.diverged = true;
    return r;
  }
  const double q = std::exp2(slope);
  const double tail = a.back() * q / (1.0 - q);
  r.value = partial + tail;
  r.error_bound = tail * 0.1 + a.back();
  return r;
}

}  // namespace

NormResult heat_norm_closed(double t, double alpha, int d) {
  check_time(t);
  check_alpha_closed(alpha);
  if (d < 1) throw ParameterError("dimension must be at least 1");
  if (!(alpha < 1.0 + 2.0 / d)) {
    return closed_diverged("alpha >= 1 + 2/d: the time integral diverges at s = 0");
  }
  const double e = 1.0 - 0.5 * d * (alpha - 1.0);
  return closed(std::pow(alpha, -0.5 * d) * std::pow(4.0 * kPi, -0.5 * d * (alpha - 1.0)) *
                std::pow(t, e) / e);
}

NormResult wave1_norm_closed(double T, double alpha) {
  check_time(T);
  check_alpha_closed(alpha);
  return closed(T * T * std::pow(2.0, -alpha));
}

NormResult wave2_norm_closed(double t, double alpha) {
  check_time(t);
  if (!(alpha > 0.0)) throw ParameterError("alpha must be positive");
  if (alpha >= 2.0) return closed_diverged("alpha >= 2: the cone singularity is not integrable");
  auto r = closed(std::pow(t, 3.0 - alpha) /
                  (std::pow(2.0 * kPi, alpha - 1.0) * (2.0 - alpha) * (3.0 - alpha)));
  r.note = "integral of rho^alpha over [0,t] x R^2, not raised to 1/(alpha v 1)";
  return r;
}

NormResult lalpha_norm_quadrature(const GreenFunction& g, std::span<const double> shift,
                                  double alpha, const GridSpec& domain, int levels) {
  g.validate();
  if (!g.pointwise()) throw UnsupportedError("the wave kernel in d >= 3 has no pointwise L^alpha norm");
  check_alpha_closed(alpha);
  domain.validate();
  if (domain.dim() != g.point_dim() || shift.size() != g.point_dim()) {
    throw ParameterError("shift and domain must match the kernel dimension");
  }
  const auto pieces = kernel_pieces(g, reflect(shift, domain), alpha);
  if (pieces.empty()) {
    NormResult r;
    r.method = NormMethod::Quadrature;
    r.refinements.assign(static_cast<std::size_t>(levels) + 1, 0.0);
    return r;
  }
  return graded_quadrature(pieces, levels);
}

NormResult h1_check(const TestFunction& phi, const GreenFunction& g, double alpha,
                    const GridSpec& domain, int levels) {
  g.validate();
  if (!g.pointwise()) throw UnsupportedError("the wave kernel in d >= 3 is not pointwise");
  phi.validate();
  check_alpha_closed(alpha);
  if (phi.dim() != g.point_dim()) throw ParameterError("test function dimension does not match the kernel");
  if (g.op == Operator::Poisson) return h1_poisson(phi, g, alpha, levels);
  if (domain.dim() != g.point_dim()) throw ParameterError("domain dimension does not match the kernel");
  ConvolveOptions copts;
  copts.rel_tol = 1e-5;
  return midpoint_levels(
      [&](std::span<const double> s) {
        return std::pow(std::abs(convolve_check(phi, g, s, copts)), alpha);
      },
      domain, levels);
}

NormResult alpha_one_condition(const TestFunction& phi, const GreenFunction& g,
                               const GridSpec& domain, int levels) {
  g.validate();
  phi.validate();
  if (!(g.dim == 1 && (g.op == Operator::Heat || g.op == Operator::Wave))) {
    throw UnsupportedError("the alpha = 1 condition is implemented for Heat d=1 and Wave d=1 only");
  }
  domain.validate();
  if (domain.dim() != 2 || phi.dim() != 2) throw ParameterError("Heat/Wave d=1 work on a 2-D space-time domain");
  if (levels < 1) throw ParameterError("at least one refinement level is required");

  NormResult r;
  r.method = NormMethod::Quadrature;
  if (phi.amplitude == 0.0) {
    r.refinements.assign(static_cast<std::size_t>(levels) + 1, 0.0);
    return r;
  }
  std::vector<double> increments;
  for (int level = 0; level <= levels; ++level) {
    const GridSpec grid = domain.refined(std::int64_t{1} << level);
    const double w = grid.cell_volume();
    const double ht = grid.cell_width(0);
    const std::size_t ns = grid.total_cells();
    std::vector<std::array<double, 2>> s_pts(ns);
    for (std::size_t i = 0; i < ns; ++i) grid.midpoint(i, s_pts[i]);
    // mu_phi nodes: midpoints moved half a time cell, where phi is nonzero.
    std::vector<std::array<double, 2>> t_pts;
    std::vector<double> mu;
    for (const auto& s : s_pts) {
      const std::array<double, 2> t{s[0] + 0.5 * ht, s[1]};
      const double v = std::abs(eval_test(phi, t));
      if (v > 0.0) {
        t_pts.push_back(t);
        mu.push_back(w * v);
      }
    }
    auto kernel = [&](const std::array<double, 2>& t, const std::array<double, 2>& s) {
      const double x[2] = {t[0] - s[0], t[1] - s[1]};
      return std::abs(eval_green(g, x).value);
    };
    const std::size_t nt = t_pts.size();
    std::vector<double> n_t(nt, 0.0);
    std::vector<double> p_s(ns, 0.0);
    for (std::size_t a = 0; a < nt; ++a) {
      for (std::size_t b = 0; b < ns; ++b) {
        const double k = kernel(t_pts[a], s_pts[b]);
        n_t[a] += w * k;
        p_s[b] += mu[a] * k;
      }
    }
    double m = 0.0;
    for (std::size_t a = 0; a < nt; ++a) m += mu[a] * n_t[a];
    double total = 0.0;
    for (std::size_t a = 0; a < nt; ++a) {
      double row = 0.0;
      for (std::size_t b = 0; b < ns; ++b) {
        const double k = kernel(t_pts[a], s_pts[b]);
        if (k == 0.0) continue;
        const double ratio = k * m / (n_t[a] * p_s[b]);
        row += w * k * (1.0 + std::max(0.0, std::log(ratio)));
      }
      total += mu[a] * row;
    }
    if (level > 0) increments.push_back(total - r.refinements.back());
    r.refinements.push_back(total);
  }
  for (std::size_t i = 1; i < increments.size(); ++i) {
    r.ratios.push_back(increments[i - 1] != 0.0 ? std::abs(increments[i] / increments[i - 1]) : 0.0);
  }
  if (growth_run(r.ratios)) {
    r.value = kInf;
    r.diverged = true;
    r.note = "refinement ratios " + ratios_text(r.ratios);
    return r;
  }
  r.value = r.refinements.back();
  r.error_bound = std::abs(increments.back());
  r.note = "mu_phi(dt) = |phi(t)| dt on grid midpoints offset by half a time cell";
  return r;
}

double rajput_rosinski_constant(double alpha) {
  check_alpha_open(alpha);
  return 1.0 / (2.0 - alpha) + 1.0 / alpha;
}

double truncated_second_moment(const LevyMeasure& measure, double w) {
  const double aw = std::abs(w);
  if (std::holds_alternative<StableMeasure>(measure)) {
    const double alpha = std::get<StableMeasure>(measure).alpha;
    const double c = rajput_rosinski_constant(alpha);
    if (std::isinf(aw)) return kInf;
    return c * std::pow(aw, alpha);
  }
  const auto& m = std::get<LevyMeasureSpec>(measure);
  m.validate();
  if (aw == 0.0) return 0.0;
  if (std::isinf(aw)) return m.total_mass();
  const double zstar = 1.0 / aw;
  switch (m.kind) {
    case LevyMeasureSpec::Kind::CompoundPoissonTwoPoint:
      return m.rate * std::min(aw * aw * m.size * m.size, 1.0);
    case LevyMeasureSpec::Kind::CompoundPoissonUniform: {
      const double a = m.size;
      if (a <= zstar) return m.rate * aw * aw * a * a / 3.0;
      return m.rate * (1.0 - 2.0 * zstar / (3.0 * a));
    }
    case LevyMeasureSpec::Kind::TruncatedStable: {
      const double al = m.alpha;
      const double z1 = std::clamp(zstar, m.inner, m.outer);
      const double small = aw * aw * (std::pow(z1, 2.0 - al) - std::pow(m.inner, 2.0 - al)) / (2.0 - al);
      const double large = (std::pow(z1, -al) - std::pow(m.outer, -al)) / al;
      return small + large;
    }
  }
  return 0.0;
}

NormResult rajput_rosinski_functional(const ScalarField& f, const LevyMeasure& measure,
                                      const GridSpec& domain, int levels) {
  if (std::holds_alternative<StableMeasure>(measure)) {
    check_alpha_open(std::get<StableMeasure>(measure).alpha);
  } else {
    std::get<LevyMeasureSpec>(measure).validate();
  }
  return midpoint_levels(
      [&](std::span<const double> s) { return truncated_second_moment(measure, f(s)); }, domain,
      levels);
}

NormResult rajput_rosinski_functional(const GreenFunction& g, std::span<const double> shift,
                                      const LevyMeasure& measure, const GridSpec& domain,
                                      int levels) {
  if (std::holds_alternative<StableMeasure>(measure)) {
    const double alpha = std::get<StableMeasure>(measure).alpha;
    const double c = rajput_rosinski_constant(alpha);
    auto r = lalpha_norm_quadrature(g, shift, alpha, domain, levels);
    if (!r.diverged) {
      r.value *= c;
      r.error_bound *= c;
      for (auto& v : r.refinements) v *= c;
    }
    r.note = "c_alpha times the L^alpha quadrature of the shifted kernel";
    return r;
  }
  std::vector<double> point(shift.size());
  return rajput_rosinski_functional(
      [&](std::span<const double> s) {
        std::vector<double> w(shift.size());
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = shift[i] - s[i];
        const auto v = eval_green(g, w);
        return v.singular ? kInf : v.value;
      },
      measure, domain, levels);
}

ExistenceVerdict existence_verdict(Operator equation, int d, double alpha) {
  if (d < 1) throw ParameterError("dimension must be at least 1");
  check_alpha_open(alpha);
  ExistenceVerdict v{equation, d, alpha, false, false, false};
  switch (equation) {
    case Operator::Heat:
      v.mild_exists = alpha < 1.0 + 2.0 / d;
      v.generalized_exists = true;
      v.random_field_exists = v.mild_exists;
      break;
    case Operator::Wave:
      v.mild_exists = d <= 2;
      v.generalized_exists = true;
      v.random_field_exists = v.mild_exists;
      break;
    case Operator::Poisson:
      v.generalized_exists = d > 4 && alpha > static_cast<double>(d) / (d - 2);
      break;
  }
  return v;
}

std::string mild_condition(Operator equation, int d) {
  switch (equation) {
    case Operator::Heat:
      return "heat: mild solution exists iff alpha < 1 + 2/d = " + std::to_string(1.0 + 2.0 / d);
    case Operator::Wave:
      return "wave: mild solution exists iff d <= 2 (d = " + std::to_string(d) + ")";
    case Operator::Poisson:
      return "poisson: no mild solution in any dimension";
  }
  return {};
}

}  // namespace levy_spde
