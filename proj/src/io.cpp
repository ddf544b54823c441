#include "levy_spde/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#include "levy_spde/errors.hpp"

namespace levy_spde {

namespace {

constexpr std::array<char, 4> kMagic = {'L', 'V', 'Y', 'N'};

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(sizeof(T) == 4 || sizeof(T) == 8);
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  const U bits = std::bit_cast<U>(value);
  char bytes[sizeof(T)];
  for (std::size_t k = 0; k < sizeof(T); ++k) bytes[k] = static_cast<char>((bits >> (8 * k)) & 0xFF);
  out.write(bytes, sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
    throw ParameterError("noise file is truncated");
  }
  U bits = 0;
  for (std::size_t k = 0; k < sizeof(T); ++k) bits |= static_cast<U>(bytes[k]) << (8 * k);
  return std::bit_cast<T>(bits);
}

nlohmann::json vec(const std::vector<double>& v) {
  auto a = nlohmann::json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

double read_number(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw ParameterError("expected a number, got " + j.dump());
}

std::vector<double> read_vec(const nlohmann::json& j) {
  if (!j.is_array()) throw ParameterError("expected an array, got " + j.dump());
  std::vector<double> out;
  for (const auto& x : j) out.push_back(read_number(x));
  return out;
}

const nlohmann::json& field(const nlohmann::json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParameterError(std::string("missing field '") + key + "'");
  return j.at(key);
}

}  // namespace

void write_noise_binary(std::ostream& out, const NoiseRealization& noise) {
  noise.grid.validate();
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kNoiseFormatVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(noise.grid.dim()));
  for (double x : noise.grid.origin) put_le(out, x);
  for (double x : noise.grid.extent) put_le(out, x);
  for (auto n : noise.grid.cells) put_le<std::uint64_t>(out, static_cast<std::uint64_t>(n));
  put_le(out, noise.alpha);
  put_le<std::uint64_t>(out, noise.seed);
  put_le<std::uint64_t>(out, noise.increments.size());
  for (double x : noise.increments) put_le(out, x);
  if (!out) throw ResourceError("failed to write noise container");
}

NoiseRealization read_noise_binary(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw ParameterError("not a noise container (bad magic)");
  }
  const auto version = get_le<std::uint32_t>(in);
  if (version != kNoiseFormatVersion) {
    throw ParameterError("unsupported noise container version " + std::to_string(version));
  }
  const auto dim = get_le<std::uint32_t>(in);
  if (dim == 0 || dim > 64) throw ParameterError("implausible grid dimension in noise container");
  GridSpec grid;
  for (std::uint32_t i = 0; i < dim; ++i) grid.origin.push_back(get_le<double>(in));
  for (std::uint32_t i = 0; i < dim; ++i) grid.extent.push_back(get_le<double>(in));
  for (std::uint32_t i = 0; i < dim; ++i) {
    grid.cells.push_back(static_cast<std::int64_t>(get_le<std::uint64_t>(in)));
  }
  grid.validate();
  const double alpha = get_le<double>(in);
  const auto seed = get_le<std::uint64_t>(in);
  const auto count = get_le<std::uint64_t>(in);
  if (count != grid.total_cells()) throw ParameterError("payload length does not match the grid");
  std::vector<double> increments(count);
  for (auto& x : increments) x = get_le<double>(in);
  return make_noise(std::move(grid), alpha, std::move(increments), seed);
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void write_noise_csv(std::ostream& out, const NoiseRealization& noise) {
  const auto& grid = noise.grid;
  for (std::size_t a = 0; a < grid.dim(); ++a) out << 'i' << a << ',';
  out << "increment\n";
  for (std::size_t i = 0; i < noise.increments.size(); ++i) {
    for (auto k : grid.multi_index(i)) out << k << ',';
    out << format_double(noise.increments[i]) << '\n';
  }
}

void write_field_csv(std::ostream& out, const Field& field, bool space_time) {
  const std::size_t d = field.eval_points.empty() ? 0 : field.eval_points.front().size();
  for (std::size_t a = 0; a < d; ++a) {
    if (space_time && a == 0) {
      out << "t,";
    } else {
      out << 'x' << (space_time ? a : a + 1) << ',';
    }
  }
  out << "value\n";
  for (std::size_t j = 0; j < field.values.size(); ++j) {
    for (double x : field.eval_points[j]) out << format_double(x) << ',';
    out << format_double(field.values[j]) << '\n';
  }
}

void write_verdict_csv(std::ostream& out, const std::vector<ExistenceVerdict>& rows) {
  out << "equation,d,alpha,mild,generalized,random_field\n";
  for (const auto& v : rows) {
    out << operator_name(v.equation) << ',' << v.dim << ',' << format_double(v.alpha) << ','
        << (v.mild_exists ? "true" : "false") << ',' << (v.generalized_exists ? "true" : "false")
        << ',' << (v.random_field_exists ? "true" : "false") << '\n';
  }
}

nlohmann::json number(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

nlohmann::json to_json(const GridSpec& grid) {
  return {{"origin", vec(grid.origin)}, {"extent", vec(grid.extent)}, {"cells", grid.cells}};
}

GridSpec grid_from_json(const nlohmann::json& j) {
  GridSpec g;
  g.origin = read_vec(field(j, "origin"));
  g.extent = read_vec(field(j, "extent"));
  g.cells = field(j, "cells").get<std::vector<std::int64_t>>();
  g.validate();
  return g;
}

nlohmann::json to_json(const GreenFunction& g) {
  return {{"operator", operator_name(g.op)}, {"dim", g.dim}};
}

GreenFunction green_from_json(const nlohmann::json& j) {
  GreenFunction g;
  g.op = parse_operator(field(j, "operator").get<std::string>());
  g.dim = field(j, "dim").get<int>();
  g.validate();
  return g;
}

nlohmann::json to_json(const TestFunction& phi) {
  return {{"center", vec(phi.center)}, {"radii", vec(phi.radii)}, {"amplitude", number(phi.amplitude)}};
}

TestFunction test_from_json(const nlohmann::json& j) {
  TestFunction phi;
  phi.center = read_vec(field(j, "center"));
  phi.radii = read_vec(field(j, "radii"));
  phi.amplitude = j.contains("amplitude") ? read_number(j.at("amplitude")) : 1.0;
  phi.validate();
  return phi;
}

nlohmann::json to_json(const NormResult& r) {
  return {{"value", number(r.value)},
          {"method", r.method == NormMethod::ClosedForm ? "closed_form" : "quadrature"},
          {"error_bound", number(r.error_bound)},
          {"diverged", r.diverged},
          {"refinements", vec(r.refinements)},
          {"ratios", vec(r.ratios)},
          {"note", r.note}};
}

nlohmann::json to_json(const FubiniReport& r) {
  return {{"lhs", number(r.lhs)},          {"rhs", number(r.rhs)},
          {"abs_diff", number(r.abs_diff)}, {"shared_grid", r.shared_grid},
          {"gaps", vec(r.gaps)},            {"passed", r.passed}};
}

nlohmann::json to_json(const ProbeReport& r) {
  return {{"mild_value", number(r.mild_value)},
          {"pairings", vec(r.pairings)},
          {"gaps", vec(r.gaps)},
          {"floors", vec(r.floors)},
          {"passed", r.passed}};
}

nlohmann::json to_json(const CFTest& r) {
  auto re = nlohmann::json::array();
  auto im = nlohmann::json::array();
  for (const auto& z : r.empirical) {
    re.push_back(number(z.real()));
    im.push_back(number(z.imag()));
  }
  return {{"test", "characteristic_function"},
          {"u", vec(r.u_values)},
          {"empirical_re", re},
          {"empirical_im", im},
          {"theoretical", vec(r.theoretical)},
          {"n", r.n_samples},
          {"band", number(r.band)},
          {"max_gap", number(r.max_gap)},
          {"max_imag", number(r.max_imag)},
          {"passed", r.passed}};
}

nlohmann::json to_json(const QuantileReport& r) {
  return {{"test", "quantile"},
          {"params", {{"alpha", r.alpha}, {"scale", r.scale}}},
          {"n", r.n_samples},
          {"probabilities", vec(r.probabilities)},
          {"empirical", vec(r.empirical)},
          {"theoretical", vec(r.theoretical)},
          {"gaps", vec(r.gaps)},
          {"ratio_empirical", number(r.ratio_empirical)},
          {"ratio_theoretical", number(r.ratio_theoretical)},
          {"band", number(r.tolerance)},
          {"max_gap", number(r.max_gap)},
          {"passed", r.passed}};
}

nlohmann::json to_json(const ExistenceVerdict& v) {
  return {{"equation", operator_name(v.equation)},
          {"d", v.dim},
          {"alpha", v.alpha},
          {"mild", v.mild_exists},
          {"generalized", v.generalized_exists},
          {"random_field", v.random_field_exists}};
}

}  // namespace levy_spde
