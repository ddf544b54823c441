#include "levy_spde/greens.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "levy_spde/cubature.hpp"
#include "levy_spde/errors.hpp"

namespace levy_spde {

namespace {

constexpr double kPi = std::numbers::pi;
// exp(-kGaussCap^2) is far below double precision relative to the peak.
constexpr double kGaussCap = 7.0;

double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

double sphere_area(int dim) {
  // Surface area of the unit sphere S^{dim-1} in R^dim.
  return 2.0 * std::pow(kPi, 0.5 * dim) / std::tgamma(0.5 * dim);
}

void require_pointwise(const GreenFunction& g) {
  g.validate();
  if (!g.pointwise()) {
    throw UnsupportedError("the wave kernel in d >= 3 is a distribution, not a function");
  }
}

// Distance from 0 to the interval [a, b].
double interval_gap(double a, double b) {
  if (a > 0.0) return a;
  if (b < 0.0) return -b;
  return 0.0;
}

double box_gap(std::span<const double> lo, std::span<const double> hi) {
  double s = 0.0;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    const double g = interval_gap(lo[i], hi[i]);
    s += g * g;
  }
  return std::sqrt(s);
}

double box_reach(std::span<const double> lo, std::span<const double> hi) {
  double s = 0.0;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    const double m = std::max(std::abs(lo[i]), std::abs(hi[i]));
    s += m * m;
  }
  return std::sqrt(s);
}

struct Accumulator {
  double value = 0.0;
  double error = 0.0;
  std::size_t evals = 0;
  bool converged = true;

  void add(const CubatureResult& r) {
    value += r.value;
    error += r.error;
    evals += r.evals;
    converged = converged && r.converged;
  }
};

// Splits [a, b] at the given interior points.
std::vector<double> breakpoints(double a, double b, std::vector<double> cuts) {
  std::vector<double> out{a};
  std::sort(cuts.begin(), cuts.end());
  for (double c : cuts) {
    if (c > out.back() && c < b) out.push_back(c);
  }
  out.push_back(b);
  return out;
}

// Heat: s - p = (sigma^2, 2 sigma z). The Gaussian factor becomes exp(-|z|^2),
// and for each sigma the z-box is the image of the support box, clipped
// where the Gaussian is negligible. Coordinates u in [0,1]^d address that box.
Accumulator convolve_heat(const TestFunction& phi, int d, std::span<const double> p,
                          std::span<const double> lo, std::span<const double> hi,
                          const CubatureOptions& opts) {
  Accumulator acc;
  const double tau_lo = std::max(0.0, lo[0]);
  const double tau_hi = hi[0];
  if (!(tau_hi > tau_lo)) return acc;
  const double s_lo = std::sqrt(tau_lo);
  const double s_hi = std::sqrt(tau_hi);

  auto z_range = [&](std::size_t i, double sigma, double& zlo, double& zhi) {
    const double a = lo[i + 1] / (2.0 * sigma);
    const double b = hi[i + 1] / (2.0 * sigma);
    const double cap = interval_gap(a, b) + kGaussCap;
    zlo = std::max(a, -cap);
    zhi = std::min(b, cap);
  };

  std::vector<double> cuts;
  for (int i = 0; i < d; ++i) {
    const double a = lo[i + 1];
    const double b = hi[i + 1];
    if (a < 0.0 && b > 0.0) {
      cuts.push_back(-a / (2.0 * kGaussCap));
      cuts.push_back(b / (2.0 * kGaussCap));
    } else {
      cuts.push_back((b - a) / (2.0 * kGaussCap));
    }
  }
  const double norm = std::pow(kPi, -0.5 * d);
  const auto pieces = breakpoints(s_lo, s_hi, cuts);
  std::vector<double> q(static_cast<std::size_t>(d) + 1);
  for (std::size_t k = 0; k + 1 < pieces.size(); ++k) {
    Box box;
    box.lo.assign(static_cast<std::size_t>(d) + 1, 0.0);
    box.hi.assign(static_cast<std::size_t>(d) + 1, 1.0);
    box.lo[0] = pieces[k];
    box.hi[0] = pieces[k + 1];
    auto f = [&](std::span<const double> x) {
      const double sigma = x[0];
      if (sigma <= 0.0) return 0.0;
      double jac = 2.0 * sigma * norm;
      double zz = 0.0;
      q[0] = p[0] + sigma * sigma;
      for (int i = 0; i < d; ++i) {
        double zlo = 0.0;
        double zhi = 0.0;
        z_range(static_cast<std::size_t>(i), sigma, zlo, zhi);
        if (!(zhi > zlo)) return 0.0;
        const double z = zlo + x[static_cast<std::size_t>(i) + 1] * (zhi - zlo);
        jac *= zhi - zlo;
        zz += z * z;
        q[static_cast<std::size_t>(i) + 1] = p[static_cast<std::size_t>(i) + 1] + 2.0 * sigma * z;
      }
      const double bump = eval_test(phi, q);
      return bump == 0.0 ? 0.0 : jac * std::exp(-zz) * bump;
    };
    acc.add(integrate(f, box, opts));
  }
  return acc;
}

// Wave d=1: s - p = (tau, tau v), |v| <= 1, weight tau / 2.
Accumulator convolve_wave1(const TestFunction& phi, std::span<const double> p,
                           std::span<const double> lo, std::span<const double> hi,
                           const CubatureOptions& opts) {
  Accumulator acc;
  const double a = lo[1];
  const double b = hi[1];
  const double tau_lo = std::max({0.0, lo[0], interval_gap(a, b)});
  const double tau_hi = hi[0];
  if (!(tau_hi > tau_lo)) return acc;
  const auto pieces = breakpoints(tau_lo, tau_hi, {std::abs(a), std::abs(b)});
  std::vector<double> q(2);
  for (std::size_t k = 0; k + 1 < pieces.size(); ++k) {
    Box box{{pieces[k], 0.0}, {pieces[k + 1], 1.0}};
    auto f = [&](std::span<const double> x) {
      const double tau = x[0];
      if (tau <= 0.0) return 0.0;
      const double vlo = std::max(-1.0, a / tau);
      const double vhi = std::min(1.0, b / tau);
      if (!(vhi > vlo)) return 0.0;
      const double v = vlo + x[1] * (vhi - vlo);
      q[0] = p[0] + tau;
      q[1] = p[1] + tau * v;
      const double bump = eval_test(phi, q);
      return bump == 0.0 ? 0.0 : 0.5 * tau * (vhi - vlo) * bump;
    };
    acc.add(integrate(f, box, opts));
  }
  return acc;
}

// Angular span [t0, t1] of a rectangle not containing the origin in its interior.
void rectangle_angles(std::span<const double> lo, std::span<const double> hi, double& t0,
                      double& t1) {
  const double cx = 0.5 * (lo[0] + hi[0]);
  const double cy = 0.5 * (lo[1] + hi[1]);
  const double ref = std::atan2(cy, cx);
  t0 = std::numeric_limits<double>::infinity();
  t1 = -std::numeric_limits<double>::infinity();
  for (double x : {lo[0], hi[0]}) {
    for (double y : {lo[1], hi[1]}) {
      double dphi = std::atan2(y, x) - ref;
      while (dphi > kPi) dphi -= 2.0 * kPi;
      while (dphi < -kPi) dphi += 2.0 * kPi;
      t0 = std::min(t0, ref + dphi);
      t1 = std::max(t1, ref + dphi);
    }
  }
}

// Wave d=2: s - p = (tau, tau sin(psi) (cos theta, sin theta)), weight tau sin(psi) / (2 pi).
Accumulator convolve_wave2(const TestFunction& phi, std::span<const double> p,
                           std::span<const double> lo, std::span<const double> hi,
                           const CubatureOptions& opts) {
  Accumulator acc;
  const std::span<const double> ylo = lo.subspan(1);
  const std::span<const double> yhi = hi.subspan(1);
  const double m = box_gap(ylo, yhi);
  const double reach = box_reach(ylo, yhi);
  const double tau_lo = std::max({0.0, lo[0], m});
  const double tau_hi = hi[0];
  if (!(tau_hi > tau_lo)) return acc;
  double th0 = 0.0;
  double th1 = 2.0 * kPi;
  const bool origin_inside = ylo[0] < 0.0 && yhi[0] > 0.0 && ylo[1] < 0.0 && yhi[1] > 0.0;
  if (!origin_inside) rectangle_angles(ylo, yhi, th0, th1);
  const double psi_lo = std::asin(std::min(1.0, m / tau_hi));
  const double psi_hi = tau_lo > 0.0 ? std::asin(std::min(1.0, reach / tau_lo)) : 0.5 * kPi;
  if (!(psi_hi > psi_lo)) return acc;
  Box box{{tau_lo, psi_lo, th0}, {tau_hi, psi_hi, th1}};
  std::vector<double> q(3);
  auto f = [&](std::span<const double> x) {
    const double tau = x[0];
    const double s = std::sin(x[1]);
    const double r = tau * s;
    q[0] = p[0] + tau;
    q[1] = p[1] + r * std::cos(x[2]);
    q[2] = p[2] + r * std::sin(x[2]);
    const double bump = eval_test(phi, q);
    return bump == 0.0 ? 0.0 : r / (2.0 * kPi) * bump;
  };
  CubatureOptions o = opts;
  o.initial_splits = std::max(o.initial_splits, 2);
  acc.add(integrate(f, box, o));
  return acc;
}

double poisson_radial(int d, double r) {
  if (d == 1) return 0.5 * r;
  if (d == 2) return -std::log(r) / (2.0 * kPi);
  return std::pow(r, 2.0 - d) / poisson_constant(d);
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

Box angle_box(std::size_t d) {
  Box box;
  box.lo.assign(d - 1, 0.0);
  box.hi.assign(d - 1, kPi);
  box.hi[d - 2] = 2.0 * kPi;
  return box;
}

bool isotropic(const TestFunction& phi) {
  return std::all_of(phi.radii.begin(), phi.radii.end(),
                     [&](double a) { return a == phi.radii.front(); });
}

// Isotropic bump, d >= 2: the mean of rho(. - p) over a sphere of radius R
// about c equals rho evaluated at max(|p - c|, R), so the convolution is a
// one-dimensional radial integral.
Accumulator convolve_poisson_radial(const TestFunction& phi, int d, std::span<const double> p,
                                    const CubatureOptions& opts) {
  Accumulator acc;
  const double a = phi.radii.front();
  double r2 = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) r2 += (p[i] - phi.center[i]) * (p[i] - phi.center[i]);
  const double dist = std::sqrt(r2);
  const double scale = sphere_area(d) * std::pow(a, d);
  auto f = [&](double rho) {
    if (rho >= 1.0) return 0.0;
    const double r = std::max(dist, rho * a);
    if (r <= 0.0) return 0.0;
    return scale * std::pow(rho, d - 1) * std::exp(-1.0 / (1.0 - rho * rho)) * poisson_radial(d, r);
  };
  const double kink = dist / a;
  for (const auto& [lo, hi] : {std::pair{0.0, std::min(kink, 1.0)}, std::pair{std::min(kink, 1.0), 1.0}}) {
    if (hi > lo) acc.add(integrate_1d(f, lo, hi, opts));
  }
  return acc;
}

Accumulator convolve_poisson(const TestFunction& phi, int d, std::span<const double> p,
                             const CubatureOptions& opts) {
  Accumulator acc;
  const auto du = static_cast<std::size_t>(d);
  std::vector<double> q(du);
  if (d == 1) {
    auto f = [&](double y) {
      q[0] = p[0] + y;
      return 0.5 * std::abs(y) * eval_test(phi, q);
    };
    const double lo = phi.center[0] - phi.radii[0] - p[0];
    const double hi = phi.center[0] + phi.radii[0] - p[0];
    for (const auto& [a, b] : {std::pair{lo, std::min(hi, 0.0)}, std::pair{std::max(lo, 0.0), hi}}) {
      if (b > a) acc.add(integrate_1d(f, a, b, opts));
    }
    return acc;
  }
  if (isotropic(phi)) return convolve_poisson_radial(phi, d, p, opts);

  // Scaled offset of the pole from the bump center.
  std::vector<double> u(du);
  double uu = 0.0;
  for (std::size_t i = 0; i < du; ++i) {
    u[i] = (p[i] - phi.center[i]) / phi.radii[i];
    uu += u[i] * u[i];
  }
  std::vector<double> omega(du);
  CubatureOptions inner = opts;
  inner.rel_tol = 0.1 * opts.rel_tol;
  inner.abs_tol = 0.0;
  std::size_t inner_evals = 0;
  bool inner_ok = true;
  auto track = [&](const CubatureResult& r) {
    inner_evals += r.evals;
    inner_ok = inner_ok && r.converged;
    return r.value;
  };

  if (uu < 1.0) {
    // Pole inside the support: integrate along rays from the pole up to the
    // exact exit distance, where r^{d-1} rho(r) is bounded.
    std::vector<double> x(du);
    auto angular = [&](std::span<const double> ang) {
      const double jac = spherical_point(ang, omega);
      double uv = 0.0;
      double vv = 0.0;
      for (std::size_t i = 0; i < du; ++i) {
        const double v = omega[i] / phi.radii[i];
        uv += u[i] * v;
        vv += v * v;
      }
      const double exit = (-uv + std::sqrt(uv * uv + vv * (1.0 - uu))) / vv;
      const auto r = integrate_1d(
          [&](double rr) {
            if (rr <= 0.0) return 0.0;
            for (std::size_t i = 0; i < du; ++i) x[i] = p[i] + rr * omega[i];
            const double bump = eval_test(phi, x);
            return bump == 0.0 ? 0.0 : poisson_radial(d, rr) * std::pow(rr, d - 1) * bump;
          },
          0.0, exit, inner);
      return jac * track(r);
    };
    auto outer = integrate(angular, angle_box(du), opts);
    outer.evals += inner_evals;
    outer.converged = outer.converged && inner_ok;
    acc.add(outer);
    return acc;
  }

  // Pole outside the support: polar coordinates around the bump center,
  // s = c + rho (a_i omega_i), with the angular integral nested inside.
  double radii_product = 1.0;
  for (double a : phi.radii) radii_product *= a;
  auto radial = [&](double rho) {
    if (rho <= 0.0 || rho >= 1.0) return 0.0;
    const auto r = integrate(
        [&](std::span<const double> ang) {
          const double jac = spherical_point(ang, omega);
          double r2 = 0.0;
          for (std::size_t i = 0; i < du; ++i) {
            const double w = phi.center[i] + rho * phi.radii[i] * omega[i] - p[i];
            r2 += w * w;
          }
          return jac * poisson_radial(d, std::sqrt(r2));
        },
        angle_box(du), inner);
    return radii_product * std::pow(rho, d - 1) * std::exp(-1.0 / (1.0 - rho * rho)) * track(r);
  };
  auto outer = integrate_1d(radial, 0.0, 1.0, opts);
  outer.evals += inner_evals;
  outer.converged = outer.converged && inner_ok;
  acc.add(outer);
  return acc;
}

}  // namespace

std::string operator_name(Operator op) {
  switch (op) {
    case Operator::Heat:
      return "heat";
    case Operator::Wave:
      return "wave";
    case Operator::Poisson:
      return "poisson";
  }
  return "unknown";
}

Operator parse_operator(const std::string& name) {
  if (name == "heat") return Operator::Heat;
  if (name == "wave") return Operator::Wave;
  if (name == "poisson") return Operator::Poisson;
  throw ParameterError("unknown equation '" + name + "' (expected heat, wave or poisson)");
}

void GreenFunction::validate() const {
  if (dim < 1) throw ParameterError("spatial dimension must be at least 1");
}

std::string GreenFunction::id() const { return operator_name(op) + "-d" + std::to_string(dim); }

bool GreenFunction::in_support(std::span<const double> point) const {
  require_pointwise(*this);
  if (point.size() != point_dim()) throw ParameterError("point dimension does not match the kernel");
  switch (op) {
    case Operator::Heat:
      return point[0] > 0.0;
    case Operator::Wave: {
      const double r = std::sqrt(norm2(point.subspan(1)));
      return dim == 1 ? r <= point[0] : r < point[0];
    }
    case Operator::Poisson:
      return dim == 1 || norm2(point) > 0.0;
  }
  return false;
}

double poisson_constant(int d) {
  if (d < 3) throw ParameterError("the power-law Poisson constant needs d >= 3");
  return 2.0 * std::pow(kPi, 0.5 * d) * (d - 2) / std::tgamma(0.5 * d);
}

GreenValue eval_green(const GreenFunction& g, std::span<const double> point) {
  require_pointwise(g);
  if (point.size() != g.point_dim()) throw ParameterError("point dimension does not match the kernel");
  for (double v : point) {
    if (!std::isfinite(v)) throw ParameterError("kernel evaluated at a non-finite point");
  }
  switch (g.op) {
    case Operator::Heat: {
      const double t = point[0];
      if (t <= 0.0) return {};
      const double r2 = norm2(point.subspan(1));
      return {std::pow(4.0 * kPi * t, -0.5 * g.dim) * std::exp(-r2 / (4.0 * t)), false};
    }
    case Operator::Wave: {
      const double t = point[0];
      const double r = std::sqrt(norm2(point.subspan(1)));
      if (g.dim == 1) return {r <= t ? 0.5 : 0.0, false};
      if (r > t) return {};
      if (r == t) return {kSingularValue, true};
      return {1.0 / (2.0 * kPi * std::sqrt((t - r) * (t + r))), false};
    }
    case Operator::Poisson: {
      const double r = std::sqrt(norm2(point));
      if (g.dim == 1) return {0.5 * r, false};
      if (r == 0.0) return {kSingularValue, true};
      return {poisson_radial(g.dim, r), false};
    }
  }
  return {};
}

void TestFunction::validate() const {
  if (center.empty()) throw ParameterError("test function needs at least one coordinate");
  if (radii.size() != center.size()) throw ParameterError("test function center and radii differ in length");
  for (std::size_t i = 0; i < center.size(); ++i) {
    if (!std::isfinite(center[i])) throw ParameterError("test function center must be finite");
    if (!(radii[i] > 0.0) || !std::isfinite(radii[i])) throw ParameterError("test function radii must be positive");
  }
  if (!std::isfinite(amplitude)) throw ParameterError("test function amplitude must be finite");
}

std::vector<double> TestFunction::support_lo() const {
  std::vector<double> v(dim());
  for (std::size_t i = 0; i < dim(); ++i) v[i] = center[i] - radii[i];
  return v;
}

std::vector<double> TestFunction::support_hi() const {
  std::vector<double> v(dim());
  for (std::size_t i = 0; i < dim(); ++i) v[i] = center[i] + radii[i];
  return v;
}

double eval_test(const TestFunction& phi, std::span<const double> point) {
  double r2 = 0.0;
  for (std::size_t i = 0; i < phi.center.size(); ++i) {
    const double z = (point[i] - phi.center[i]) / phi.radii[i];
    r2 += z * z;
    if (r2 >= 1.0) return 0.0;
  }
  return phi.amplitude * std::exp(-1.0 / (1.0 - r2));
}

double eval_test_mass(const TestFunction& phi) {
  phi.validate();
  const int n = static_cast<int>(phi.dim());
  CubatureOptions opts;
  opts.rel_tol = 1e-10;
  const double radial = integrate_1d_or_throw(
      [n](double r) { return r >= 1.0 ? 0.0 : std::pow(r, n - 1) * std::exp(-1.0 / (1.0 - r * r)); },
      0.0, 1.0, opts);
  double scale = phi.amplitude * sphere_area(n);
  for (double a : phi.radii) scale *= a;
  return scale * radial;
}

TestFunction rescale(const TestFunction& phi, double n, std::span<const double> t) {
  phi.validate();
  if (!(n > 0.0) || !std::isfinite(n)) throw ParameterError("mollifier scale must be positive");
  if (t.size() != phi.dim()) throw ParameterError("mollifier center has the wrong dimension");
  TestFunction out = phi;
  for (std::size_t i = 0; i < phi.dim(); ++i) {
    out.center[i] = t[i] + phi.center[i] / n;
    out.radii[i] = phi.radii[i] / n;
  }
  out.amplitude = phi.amplitude * std::pow(n, static_cast<double>(phi.dim()));
  return out;
}

std::size_t TestCombination::dim() const { return terms.empty() ? 0 : terms.front().dim(); }

void TestCombination::validate() const {
  if (terms.empty()) throw ParameterError("test combination has no terms");
  for (const auto& t : terms) {
    t.validate();
    if (t.dim() != dim()) throw ParameterError("test combination terms differ in dimension");
  }
}

double TestCombination::operator()(std::span<const double> point) const {
  double s = 0.0;
  for (const auto& t : terms) s += eval_test(t, point);
  return s;
}

TestCombination TestCombination::positive_part() const {
  TestCombination out;
  for (const auto& t : terms) {
    if (t.amplitude > 0.0) out.terms.push_back(t);
  }
  return out;
}

TestCombination TestCombination::negative_part() const {
  TestCombination out;
  for (const auto& t : terms) {
    if (t.amplitude < 0.0) out.terms.push_back(t);
  }
  return out;
}

TestCombination operator+(TestCombination a, const TestCombination& b) {
  a.terms.insert(a.terms.end(), b.terms.begin(), b.terms.end());
  return a;
}

TestCombination operator*(double s, TestCombination a) {
  for (auto& t : a.terms) t.amplitude *= s;
  return a;
}

ConvolveResult convolve(const TestFunction& phi, const GreenFunction& g,
                        std::span<const double> point, const ConvolveOptions& options) {
  require_pointwise(g);
  phi.validate();
  if (phi.dim() != g.point_dim() || point.size() != g.point_dim()) {
    throw ParameterError("test function, kernel and point dimensions disagree");
  }
  if (phi.amplitude == 0.0) return {};

  // Integrate rho(w) phi(p + w) over w in supp(phi) - p, with unit amplitude.
  TestFunction unit = phi;
  unit.amplitude = 1.0;
  std::vector<double> lo(phi.dim());
  std::vector<double> hi(phi.dim());
  double volume = 1.0;
  for (std::size_t i = 0; i < phi.dim(); ++i) {
    lo[i] = phi.center[i] - phi.radii[i] - point[i];
    hi[i] = phi.center[i] + phi.radii[i] - point[i];
    volume *= 2.0 * phi.radii[i];
  }
  CubatureOptions opts;
  opts.rel_tol = options.rel_tol;
  opts.abs_tol = options.abs_tol >= 0.0 ? options.abs_tol / std::abs(phi.amplitude) : 1e-12 * volume;
  opts.max_evals = options.max_evals;

  Accumulator acc;
  switch (g.op) {
    case Operator::Heat:
      acc = convolve_heat(unit, g.dim, point, lo, hi, opts);
      break;
    case Operator::Wave:
      acc = g.dim == 1 ? convolve_wave1(unit, point, lo, hi, opts)
                       : convolve_wave2(unit, point, lo, hi, opts);
      break;
    case Operator::Poisson:
      acc = convolve_poisson(unit, g.dim, point, opts);
      break;
  }
  const double a = phi.amplitude;
  return {a * acc.value, std::abs(a) * acc.error, acc.evals, acc.converged};
}

double convolve_check(const TestFunction& phi, const GreenFunction& g,
                      std::span<const double> point, const ConvolveOptions& options) {
  const auto r = convolve(phi, g, point, options);
  if (!r.converged) {
    throw AccuracyError("convolution quadrature did not reach its tolerance", r.value, r.error);
  }
  return r.value;
}

double convolve_check(const TestCombination& phi, const GreenFunction& g,
                      std::span<const double> point, const ConvolveOptions& options) {
  phi.validate();
  double s = 0.0;
  for (const auto& t : phi.terms) s += convolve_check(t, g, point, options);
  return s;
}

}  // namespace levy_spde
