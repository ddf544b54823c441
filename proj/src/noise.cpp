#include "levy_spde/noise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "levy_spde/cubature.hpp"
#include "levy_spde/errors.hpp"
#include "levy_spde/parallel.hpp"
#include "levy_spde/rng.hpp"

namespace levy_spde {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 2.0)) {
    throw ParameterError("stability index must lie in (0, 2], got " + std::to_string(alpha));
  }
}

double finite_or_throw(double v, const char* what) {
  if (!std::isfinite(v)) throw NumericalDomainError(std::string(what) + " is not finite");
  return v;
}

// Stream tags for jump noise; point k uses stream k of the derived seed.
constexpr std::uint64_t kJumpCountTag = 0x636F756E74ULL;
constexpr std::uint64_t kJumpPointTag = 0x706F696E74ULL;
constexpr double kPoissonChunk = 30.0;
constexpr double kPoissonMaxMean = 1e9;

}  // namespace

void StableParams::validate() const {
  check_alpha(alpha);
  if (!(scale >= 0.0) || !std::isfinite(scale)) throw ParameterError("stable scale must be finite and >= 0");
}

double standard_sas(double alpha, double uniform_open01, double exponential) noexcept {
  const double v = std::numbers::pi * (uniform_open01 - 0.5);
  if (alpha == 1.0) return std::tan(v);
  const double w = exponential;
  const double a = std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha);
  const double b = std::pow(std::cos(v - alpha * v) / w, (1.0 - alpha) / alpha);
  return a * b;
}

std::vector<double> sample_sas(const StableParams& params, std::size_t n, std::uint64_t seed) {
  params.validate();
  if (n == 0) throw ParameterError("sample count must be at least 1");
  std::vector<double> out(n, 0.0);
  if (params.scale == 0.0) return out;
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      rng::CounterRng gen(seed, i);
      const double u = gen.next_open01();
      const double e = gen.next_exponential();
      out[i] = params.scale * standard_sas(params.alpha, u, e);
    }
  });
  return out;
}

NoiseRealization sample_white_noise(const GridSpec& grid, double alpha, std::uint64_t seed) {
  grid.validate();
  check_alpha(alpha);
  NoiseRealization noise{grid, alpha, std::vector<double>(grid.total_cells()), seed};
  const double scale = std::pow(grid.cell_volume(), 1.0 / alpha);
  auto& inc = noise.increments;
  parallel_for(inc.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      rng::CounterRng gen(seed, i);
      const double u = gen.next_open01();
      const double e = gen.next_exponential();
      inc[i] = scale * standard_sas(alpha, u, e);
    }
  });
  return noise;
}

NoiseRealization make_noise(GridSpec grid, double alpha, std::vector<double> increments,
                            std::uint64_t seed) {
  grid.validate();
  check_alpha(alpha);
  if (increments.size() != grid.total_cells()) {
    throw ParameterError("increment count does not match the grid cell count");
  }
  return {std::move(grid), alpha, std::move(increments), seed};
}

std::vector<double> midpoint_values(const GridSpec& grid, const ScalarField& f) {
  std::vector<double> out(grid.total_cells());
  parallel_for(out.size(), [&](std::size_t begin, std::size_t end) {
    std::vector<double> p(grid.dim());
    for (std::size_t i = begin; i < end; ++i) {
      grid.midpoint(i, p);
      out[i] = finite_or_throw(f(p), "field value at a cell midpoint");
    }
  });
  return out;
}

double pair_noise(const NoiseRealization& noise, const ScalarField& f) {
  const auto w = midpoint_values(noise.grid, f);
  return pair_noise_weights(noise, w);
}

double pair_noise_weights(const NoiseRealization& noise, std::span<const double> weights) {
  if (weights.size() != noise.increments.size()) {
    throw ParameterError("weight count does not match the noise cell count");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) sum += weights[i] * noise.increments[i];
  return sum;
}

LevyMeasureSpec LevyMeasureSpec::compound_poisson_uniform(double rate, double half_width) {
  LevyMeasureSpec m;
  m.kind = Kind::CompoundPoissonUniform;
  m.rate = rate;
  m.size = half_width;
  m.validate();
  return m;
}

LevyMeasureSpec LevyMeasureSpec::compound_poisson_two_point(double rate, double magnitude) {
  LevyMeasureSpec m;
  m.kind = Kind::CompoundPoissonTwoPoint;
  m.rate = rate;
  m.size = magnitude;
  m.validate();
  return m;
}

LevyMeasureSpec LevyMeasureSpec::truncated_stable(double alpha, double inner, double outer) {
  LevyMeasureSpec m;
  m.kind = Kind::TruncatedStable;
  m.alpha = alpha;
  m.inner = inner;
  m.outer = outer;
  m.validate();
  return m;
}

void LevyMeasureSpec::validate() const {
  switch (kind) {
    case Kind::CompoundPoissonUniform:
    case Kind::CompoundPoissonTwoPoint:
      if (!(rate >= 0.0) || !std::isfinite(rate)) throw ParameterError("jump rate must be finite and >= 0");
      if (!(size > 0.0) || !std::isfinite(size)) throw ParameterError("jump size must be positive and finite");
      return;
    case Kind::TruncatedStable:
      if (!(alpha > 0.0 && alpha < 2.0)) throw ParameterError("truncated stable alpha must lie in (0, 2)");
      if (inner == 0.0) throw ParameterError("inner cutoff 0 gives infinite total mass");
      if (!(inner > 0.0) || !std::isfinite(inner)) throw ParameterError("inner cutoff must be positive and finite");
      if (!(outer > inner)) throw ParameterError("outer cutoff must exceed the inner cutoff");
      return;
  }
}

double LevyMeasureSpec::total_mass() const {
  validate();
  switch (kind) {
    case Kind::CompoundPoissonUniform:
    case Kind::CompoundPoissonTwoPoint:
      return rate;
    case Kind::TruncatedStable:
      return (std::pow(inner, -alpha) - std::pow(outer, -alpha)) / alpha;
  }
  return 0.0;
}

double LevyMeasureSpec::integrate(const std::function<double(double)>& g) const {
  validate();
  switch (kind) {
    case Kind::CompoundPoissonUniform: {
      CubatureOptions opts;
      opts.rel_tol = 1e-10;
      const double lo = integrate_1d_or_throw(g, -size, 0.0, opts);
      const double hi = integrate_1d_or_throw(g, 0.0, size, opts);
      return rate * (lo + hi) / (2.0 * size);
    }
    case Kind::CompoundPoissonTwoPoint:
      return 0.5 * rate * (g(size) + g(-size));
    case Kind::TruncatedStable: {
      // z = e^s turns the power-law density into exp(-alpha s) / 2.
      const double s_lo = std::log(inner);
      const double s_hi = std::isfinite(outer) ? std::log(outer) : s_lo + 45.0 / alpha;
      CubatureOptions opts;
      opts.rel_tol = 1e-10;
      opts.abs_tol = 1e-300;
      return integrate_1d_or_throw(
          [&](double s) {
            const double z = std::exp(s);
            return 0.5 * (g(z) + g(-z)) * std::exp(-alpha * s);
          },
          s_lo, s_hi, opts);
    }
  }
  return 0.0;
}

double LevyMeasureSpec::sample_jump(double uniform_open01, double sign_uniform) const {
  const double sign = sign_uniform < 0.5 ? -1.0 : 1.0;
  switch (kind) {
    case Kind::CompoundPoissonUniform:
      return (2.0 * uniform_open01 - 1.0) * size;
    case Kind::CompoundPoissonTwoPoint:
      return sign * size;
    case Kind::TruncatedStable: {
      const double a = std::pow(inner, -alpha);
      const double b = std::pow(outer, -alpha);
      return sign * std::pow(a - uniform_open01 * (a - b), -1.0 / alpha);
    }
  }
  return 0.0;
}

double LevyMeasureSpec::magnitude_cdf(double r) const {
  switch (kind) {
    case Kind::CompoundPoissonUniform:
      return std::clamp(r / size, 0.0, 1.0);
    case Kind::CompoundPoissonTwoPoint:
      return r >= size ? 1.0 : 0.0;
    case Kind::TruncatedStable: {
      if (r <= inner) return 0.0;
      if (r >= outer) return 1.0;
      const double a = std::pow(inner, -alpha);
      const double b = std::pow(outer, -alpha);
      return (a - std::pow(r, -alpha)) / (a - b);
    }
  }
  return 0.0;
}

std::uint64_t sample_poisson(double mean, std::uint64_t seed, std::uint64_t stream) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) throw ParameterError("Poisson mean must be finite and >= 0");
  if (mean > kPoissonMaxMean) throw ResourceError("Poisson mean too large to simulate point by point");
  rng::CounterRng gen(seed, stream);
  std::uint64_t total = 0;
  double remaining = mean;
  while (remaining > 0.0) {
    const double m = std::min(remaining, kPoissonChunk);
    remaining -= m;
    const double u = gen.next_open01();
    double p = std::exp(-m);
    double cdf = p;
    std::uint64_t k = 0;
    while (u > cdf && p > 0.0) {
      ++k;
      p *= m / static_cast<double>(k);
      cdf += p;
    }
    total += k;
  }
  return total;
}

JumpNoise sample_jump_noise(const GridSpec& domain, const LevyMeasureSpec& measure,
                            std::uint64_t seed) {
  domain.validate();
  measure.validate();
  JumpNoise out{domain, {}, seed, measure};
  const double mean = measure.total_mass() * domain.box_volume();
  const std::uint64_t count = sample_poisson(mean, rng::derive_seed(seed, kJumpCountTag), 0);
  out.points.resize(count);
  const std::uint64_t point_seed = rng::derive_seed(seed, kJumpPointTag);
  for (std::uint64_t k = 0; k < count; ++k) {
    rng::CounterRng gen(point_seed, k);
    auto& pt = out.points[k];
    pt.location.resize(domain.dim());
    for (std::size_t a = 0; a < domain.dim(); ++a) {
      pt.location[a] = domain.origin[a] + gen.next_open01() * domain.extent[a];
    }
    const double u = gen.next_open01();
    const double s = gen.next_open01();
    pt.jump = measure.sample_jump(u, s);
  }
  return out;
}

double pair_jump_noise(const JumpNoise& noise, const ScalarField& f) {
  double sum = 0.0;
  for (const auto& pt : noise.points) {
    sum += finite_or_throw(f(pt.location), "field value at a jump location") * pt.jump;
  }
  return sum;
}

}  // namespace levy_spde
