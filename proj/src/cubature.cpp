#include "levy_spde/cubature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>

#include "levy_spde/errors.hpp"

namespace levy_spde {

double Box::volume() const {
  double v = 1.0;
  for (std::size_t i = 0; i < lo.size(); ++i) v *= std::max(0.0, hi[i] - lo[i]);
  return v;
}

bool Box::empty() const {
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (!(hi[i] > lo[i])) return true;
  }
  return false;
}

namespace {

// Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15).
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

double checked(double v) {
  if (!std::isfinite(v)) throw NumericalDomainError("integrand returned a non-finite value");
  return v;
}

struct Region {
  std::vector<double> center;
  std::vector<double> half;
  double value = 0.0;
  double error = 0.0;
  std::size_t split_axis = 0;
};

struct ByError {
  bool operator()(const Region& a, const Region& b) const { return a.error < b.error; }
};

class RuleEvaluator {
 public:
  RuleEvaluator(const Integrand& f, std::size_t dim) : f_(f), dim_(dim), point_(dim) {}

  std::size_t evals() const noexcept { return evals_; }

  void evaluate(Region& r) {
    if (dim_ == 1) {
      kronrod(r);
    } else {
      genz_malik(r);
    }
  }

 private:
  double call(std::span<const double> x) {
    ++evals_;
    return checked(f_(x));
  }

  void kronrod(Region& r) {
    const double c = r.center[0];
    const double h = r.half[0];
    point_[0] = c;
    const double fc = call(point_);
    double resk = fc * kWgk[7];
    double resg = fc * kWg[3];
    double resabs = std::abs(resk);
    std::array<double, 7> f1{};
    std::array<double, 7> f2{};
    for (std::size_t j = 0; j < 7; ++j) {
      point_[0] = c - h * kXgk[j];
      f1[j] = call(point_);
      point_[0] = c + h * kXgk[j];
      f2[j] = call(point_);
      resk += kWgk[j] * (f1[j] + f2[j]);
      resabs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
      if (j % 2 == 1) resg += kWg[j / 2] * (f1[j] + f2[j]);
    }
    const double reskh = resk * 0.5;
    double resasc = kWgk[7] * std::abs(fc - reskh);
    for (std::size_t j = 0; j < 7; ++j) {
      resasc += kWgk[j] * (std::abs(f1[j] - reskh) + std::abs(f2[j] - reskh));
    }
    r.value = resk * h;
    resasc *= h;
    resabs *= h;
    double err = std::abs((resk - resg) * h);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    if (resabs > std::numeric_limits<double>::min() / (50 * std::numeric_limits<double>::epsilon())) {
      err = std::max(50 * std::numeric_limits<double>::epsilon() * resabs, err);
    }
    r.error = err;
    r.split_axis = 0;
  }

  void genz_malik(Region& r) {
    const double n = static_cast<double>(dim_);
    const double lambda2 = std::sqrt(9.0 / 70.0);
    const double lambda4 = std::sqrt(9.0 / 10.0);
    const double lambda5 = std::sqrt(9.0 / 19.0);
    const double w1 = (12824.0 - 9120.0 * n + 400.0 * n * n) / 19683.0;
    const double w2 = 980.0 / 6561.0;
    const double w3 = (1820.0 - 400.0 * n) / 19683.0;
    const double w4 = 200.0 / 19683.0;
    const double w5 = 6859.0 / 19683.0 / std::ldexp(1.0, static_cast<int>(dim_));
    const double e1 = (729.0 - 950.0 * n + 50.0 * n * n) / 729.0;
    const double e2 = 245.0 / 486.0;
    const double e3 = (265.0 - 100.0 * n) / 1458.0;
    const double e4 = 25.0 / 729.0;
    const double ratio = (lambda2 * lambda2) / (lambda4 * lambda4);

    std::copy(r.center.begin(), r.center.end(), point_.begin());
    const double f0 = call(point_);
    double sum2 = 0.0;
    double sum3 = 0.0;
    double best_diff = -1.0;
    std::size_t best_axis = 0;
    for (std::size_t i = 0; i < dim_; ++i) {
      const double c = r.center[i];
      point_[i] = c - lambda2 * r.half[i];
      const double a = call(point_);
      point_[i] = c + lambda2 * r.half[i];
      const double b = call(point_);
      point_[i] = c - lambda4 * r.half[i];
      const double a4 = call(point_);
      point_[i] = c + lambda4 * r.half[i];
      const double b4 = call(point_);
      point_[i] = c;
      sum2 += a + b;
      sum3 += a4 + b4;
      const double diff = std::abs(a + b - 2.0 * f0 - ratio * (a4 + b4 - 2.0 * f0));
      if (diff > best_diff * (1.0 + 1e-12) ||
          (std::abs(diff - best_diff) <= 1e-12 * std::abs(diff) && r.half[i] > r.half[best_axis])) {
        best_diff = diff;
        best_axis = i;
      }
    }
    double sum4 = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
      for (std::size_t j = i + 1; j < dim_; ++j) {
        for (int si = -1; si <= 1; si += 2) {
          for (int sj = -1; sj <= 1; sj += 2) {
            point_[i] = r.center[i] + si * lambda4 * r.half[i];
            point_[j] = r.center[j] + sj * lambda4 * r.half[j];
            sum4 += call(point_);
          }
        }
        point_[i] = r.center[i];
        point_[j] = r.center[j];
      }
    }
    double sum5 = 0.0;
    const std::size_t corners = std::size_t{1} << dim_;
    for (std::size_t mask = 0; mask < corners; ++mask) {
      for (std::size_t i = 0; i < dim_; ++i) {
        const double s = (mask >> i) & 1U ? 1.0 : -1.0;
        point_[i] = r.center[i] + s * lambda5 * r.half[i];
      }
      sum5 += call(point_);
    }
    double vol = 1.0;
    for (double h : r.half) vol *= 2.0 * h;
    const double rule7 = w1 * f0 + w2 * sum2 + w3 * sum3 + w4 * sum4 + w5 * sum5;
    const double rule5 = e1 * f0 + e2 * sum2 + e3 * sum3 + e4 * sum4;
    r.value = vol * rule7;
    r.error = vol * std::abs(rule7 - rule5);
    r.split_axis = best_axis;
  }

  const Integrand& f_;
  std::size_t dim_;
  std::vector<double> point_;
  std::size_t evals_ = 0;
};

}  // namespace

CubatureResult integrate(const Integrand& f, const Box& box, const CubatureOptions& options) {
  const std::size_t dim = box.dim();
  if (dim == 0) {
    return {checked(f(std::span<const double>{})), 0.0, 1, true};
  }
  if (box.hi.size() != dim) throw ParameterError("cubature box bounds differ in length");
  if (box.empty()) return {};

  RuleEvaluator rule(f, dim);
  std::priority_queue<Region, std::vector<Region>, ByError> heap;

  const int splits = std::max(1, options.initial_splits);
  std::size_t initial = 1;
  for (std::size_t i = 0; i < dim; ++i) initial *= static_cast<std::size_t>(splits);
  double total = 0.0;
  double total_err = 0.0;
  for (std::size_t k = 0; k < initial; ++k) {
    Region r;
    r.center.resize(dim);
    r.half.resize(dim);
    std::size_t rem = k;
    for (std::size_t i = 0; i < dim; ++i) {
      const std::size_t idx = rem % static_cast<std::size_t>(splits);
      rem /= static_cast<std::size_t>(splits);
      const double w = (box.hi[i] - box.lo[i]) / splits;
      r.center[i] = box.lo[i] + (static_cast<double>(idx) + 0.5) * w;
      r.half[i] = 0.5 * w;
    }
    rule.evaluate(r);
    total += r.value;
    total_err += r.error;
    heap.push(std::move(r));
  }

  std::size_t iterations = 0;
  while (total_err > std::max(options.abs_tol, options.rel_tol * std::abs(total)) &&
         rule.evals() < options.max_evals) {
    Region worst = heap.top();
    heap.pop();
    Region left = worst;
    Region right = worst;
    const std::size_t axis = worst.split_axis;
    left.half[axis] *= 0.5;
    right.half[axis] *= 0.5;
    left.center[axis] -= left.half[axis];
    right.center[axis] += right.half[axis];
    rule.evaluate(left);
    rule.evaluate(right);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(std::move(left));
    heap.push(std::move(right));
    // Re-sum occasionally so the running totals do not drift.
    if (++iterations % 512 == 0) {
      auto copy = heap;
      total = 0.0;
      total_err = 0.0;
      while (!copy.empty()) {
        total += copy.top().value;
        total_err += copy.top().error;
        copy.pop();
      }
    }
  }

  // Final sum in a fixed order for determinism.
  std::vector<Region> regions;
  regions.reserve(heap.size());
  while (!heap.empty()) {
    regions.push_back(heap.top());
    heap.pop();
  }
  std::sort(regions.begin(), regions.end(), [](const Region& a, const Region& b) {
    return a.center < b.center;
  });
  CubatureResult out;
  for (const auto& r : regions) {
    out.value += r.value;
    out.error += r.error;
  }
  out.evals = rule.evals();
  out.converged = out.error <= std::max(options.abs_tol, options.rel_tol * std::abs(out.value));
  return out;
}

CubatureResult integrate_1d(const std::function<double(double)>& f, double a, double b,
                            const CubatureOptions& options) {
  if (a == b) return {};
  const double sign = b > a ? 1.0 : -1.0;
  Box box{{std::min(a, b)}, {std::max(a, b)}};
  auto r = integrate([&f](std::span<const double> x) { return f(x[0]); }, box, options);
  r.value *= sign;
  return r;
}

double integrate_1d_or_throw(const std::function<double(double)>& f, double a, double b,
                             const CubatureOptions& options) {
  const auto r = integrate_1d(f, a, b, options);
  if (!r.converged) throw AccuracyError("1-D quadrature did not converge", r.value, r.error);
  return r.value;
}

GaussRule gauss_legendre(std::size_t n) {
  if (n == 0) throw ParameterError("Gauss-Legendre rule needs at least one node");
  GaussRule rule{std::vector<double>(n), std::vector<double>(n)};
  const double pi = std::acos(-1.0);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (std::size_t k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p2) / static_cast<double>(k);
      }
      dp = static_cast<double>(n) * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = rule.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

}  // namespace levy_spde
