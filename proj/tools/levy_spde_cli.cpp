// levy-spde: command-line front end for noise sampling, solution synthesis,
// integrability checks and the acceptance suite.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "levy_spde/acceptance.hpp"
#include "levy_spde/errors.hpp"
#include "levy_spde/greens.hpp"
#include "levy_spde/io.hpp"
#include "levy_spde/noise.hpp"
#include "levy_spde/norms.hpp"
#include "levy_spde/rng.hpp"
#include "levy_spde/solutions.hpp"
#include "levy_spde/stats.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace levy_spde;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

// Thrown for malformed flag values and manifests.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double round12(double x) { return std::round(x * 1e12) / 1e12; }

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

double parse_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw ConfigError("not a number: '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError("not a number: '" + s + "'");
  }
}

long long parse_int(const std::string& s) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw ConfigError("not an integer: '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError("not an integer: '" + s + "'");
  }
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& item : split(s, ',')) out.push_back(parse_double(item));
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

// "lo..hi" (integers), "lo..hi:step", or a comma-separated list.
std::vector<double> parse_range(const std::string& s, double default_step) {
  const auto dots = s.find("..");
  if (dots == std::string::npos) return parse_list(s);
  const double lo = parse_double(s.substr(0, dots));
  std::string rest = s.substr(dots + 2);
  double step = default_step;
  if (const auto colon = rest.find(':'); colon != std::string::npos) {
    step = parse_double(rest.substr(colon + 1));
    rest = rest.substr(0, colon);
  }
  const double hi = parse_double(rest);
  if (!(step > 0.0) || hi < lo) throw ConfigError("bad range '" + s + "'");
  std::vector<double> out;
  const auto count = static_cast<long long>(std::floor((hi - lo) / step + 1e-9));
  for (long long k = 0; k <= count; ++k) out.push_back(round12(lo + static_cast<double>(k) * step));
  return out;
}

// lo,hi,n per axis.
GridSpec parse_grid(const std::string& s) {
  const auto items = split(s, ',');
  if (items.empty() || items.size() % 3 != 0) {
    throw ConfigError("--grid expects lo,hi,n triples, one per axis");
  }
  GridSpec g;
  for (std::size_t k = 0; k < items.size(); k += 3) {
    const double lo = parse_double(items[k]);
    const double hi = parse_double(items[k + 1]);
    g.origin.push_back(lo);
    g.extent.push_back(hi - lo);
    g.cells.push_back(parse_int(items[k + 2]));
  }
  g.validate();
  return g;
}

GridSpec default_grid(const GreenFunction& g) {
  GridSpec grid;
  if (g.space_time()) {
    grid.origin.push_back(0.0);
    grid.extent.push_back(1.0);
    grid.cells.push_back(g.dim == 1 ? 32 : 8);
  }
  for (int i = 0; i < g.dim; ++i) {
    grid.origin.push_back(-1.0);
    grid.extent.push_back(2.0);
    grid.cells.push_back(g.dim == 1 ? 32 : (g.dim == 2 ? 16 : 8));
  }
  return grid;
}

TestFunction default_phi(const GridSpec& grid, bool space_time) {
  TestFunction phi;
  for (std::size_t a = 0; a < grid.dim(); ++a) {
    const double frac = space_time && a == 0 ? 0.6 : 0.5;
    phi.center.push_back(grid.origin[a] + frac * grid.extent[a]);
    phi.radii.push_back(0.25 * grid.extent[a]);
  }
  phi.amplitude = 1.0;
  return phi;
}

// --- config helpers --------------------------------------------------------

const json& need(const json& cfg, const char* key) {
  if (!cfg.contains(key) || cfg.at(key).is_null()) {
    throw ConfigError(std::string("missing configuration field '") + key + "'");
  }
  return cfg.at(key);
}

GreenFunction green_of(const json& cfg) {
  GreenFunction g;
  g.op = parse_operator(need(cfg, "equation").get<std::string>());
  g.dim = need(cfg, "d").get<int>();
  g.validate();
  return g;
}

std::uint64_t seed_of(const json& cfg) { return need(cfg, "seed").get<std::uint64_t>(); }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ResourceError("cannot write " + path.string());
  out << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

struct Run {
  fs::path out;
  json manifest_outputs = json::array();

  void record(const std::string& name) { manifest_outputs.push_back(name); }
};

// --- subcommands -----------------------------------------------------------

int cmd_sample_noise(const json& cfg, Run& run) {
  const auto grid = grid_from_json(need(cfg, "grid"));
  const double alpha = need(cfg, "alpha").get<double>();
  const auto noise = sample_white_noise(grid, alpha, seed_of(cfg));
  {
    std::ofstream bin(run.out / "noise.bin", std::ios::binary);
    write_noise_binary(bin, noise);
  }
  std::ostringstream csv;
  write_noise_csv(csv, noise);
  write_text(run.out / "noise.csv", csv.str());
  run.record("noise.bin");
  run.record("noise.csv");
  std::printf("sampled %zu increments\n", noise.increments.size());
  return kExitOk;
}

int cmd_mild_field(const json& cfg, Run& run) {
  const auto g = green_of(cfg);
  const auto grid = grid_from_json(need(cfg, "grid"));
  const auto noise = sample_white_noise(grid, need(cfg, "alpha").get<double>(), seed_of(cfg));
  std::vector<std::vector<double>> points;
  if (cfg.contains("eval_grid") && !cfg.at("eval_grid").is_null()) {
    const auto eval = grid_from_json(cfg.at("eval_grid"));
    for (std::size_t i = 0; i < eval.total_cells(); ++i) points.push_back(eval.midpoint(i));
  } else {
    points = offset_midpoints(grid);
  }
  const auto field = mild_field(g, noise, points);
  std::ostringstream csv;
  write_field_csv(csv, field, g.space_time());
  write_text(run.out / "field.csv", csv.str());
  run.record("field.csv");
  std::printf("mild field at %zu points\n", field.values.size());
  return kExitOk;
}

int cmd_pairing(const json& cfg, Run& run) {
  const auto g = green_of(cfg);
  const auto grid = grid_from_json(need(cfg, "grid"));
  const auto noise = sample_white_noise(grid, need(cfg, "alpha").get<double>(), seed_of(cfg));
  const auto phi = test_from_json(need(cfg, "phi"));
  ConvolveOptions opts;
  opts.rel_tol = need(cfg, "tol").get<double>();
  const double value = generalized_pairing(phi, g, noise, opts);
  json report = {{"green", g.id()}, {"pairing", number(value)}, {"phi", to_json(phi)}};
  write_json(run.out / "pairing.json", report);
  run.record("pairing.json");
  std::printf("pairing %s\n", format_double(value).c_str());
  return kExitOk;
}

int cmd_fubini(const json& cfg, Run& run) {
  const auto g = green_of(cfg);
  const auto grid = grid_from_json(need(cfg, "grid"));
  const auto noise = sample_white_noise(grid, need(cfg, "alpha").get<double>(), seed_of(cfg));
  const auto phi = test_from_json(need(cfg, "phi"));
  const auto mode_name = need(cfg, "mode").get<std::string>();
  if (mode_name != "shared" && mode_name != "refine") throw ConfigError("--mode must be shared or refine");
  const auto mode = mode_name == "shared" ? FubiniMode::SharedGrid : FubiniMode::Refinement;
  const auto r = fubini_check(phi, g, noise, mode, need(cfg, "levels").get<int>());
  write_json(run.out / "fubini.json", to_json(r));
  run.record("fubini.json");
  std::printf("lhs %s rhs %s abs_diff %s: %s\n", format_double(r.lhs).c_str(),
              format_double(r.rhs).c_str(), format_double(r.abs_diff).c_str(),
              r.passed ? "passed" : "FAILED");
  return r.passed ? kExitOk : kExitFailed;
}

int cmd_verdict_table(const json& cfg, Run& run) {
  std::vector<ExistenceVerdict> rows;
  const auto ds = need(cfg, "d").get<std::vector<int>>();
  const auto alphas = need(cfg, "alpha").get<std::vector<double>>();
  for (const auto& eq : need(cfg, "equations").get<std::vector<std::string>>()) {
    const auto op = parse_operator(eq);
    for (int d : ds) {
      for (double a : alphas) rows.push_back(existence_verdict(op, d, a));
    }
  }
  std::ostringstream csv;
  write_verdict_csv(csv, rows);
  write_text(run.out / "verdicts.csv", csv.str());
  run.record("verdicts.csv");
  std::fputs(csv.str().c_str(), stdout);
  return kExitOk;
}

int cmd_norms(const json& cfg, Run& run) {
  const auto g = green_of(cfg);
  const double alpha = need(cfg, "alpha").get<double>();
  const double t = need(cfg, "t").get<double>();
  const int levels = need(cfg, "levels").get<int>();
  json report = {{"green", g.id()}, {"alpha", alpha}, {"t", t}};
  if (g.op == Operator::Heat) report["closed_form"] = to_json(heat_norm_closed(t, alpha, g.dim));
  if (g.op == Operator::Wave && g.dim == 1) report["closed_form"] = to_json(wave1_norm_closed(t, alpha));
  if (g.op == Operator::Wave && g.dim == 2) report["closed_form"] = to_json(wave2_norm_closed(t, alpha));
  GridSpec domain;
  std::vector<double> shift;
  if (g.space_time()) {
    const double L = g.op == Operator::Heat ? 8.0 * std::sqrt(4.0 * t / alpha) + 1.0 : t + 1.0;
    domain.origin.push_back(0.0);
    domain.extent.push_back(t);
    shift.push_back(t);
    for (int i = 0; i < g.dim; ++i) {
      domain.origin.push_back(-L);
      domain.extent.push_back(2.0 * L);
      shift.push_back(0.0);
    }
  } else {
    for (int i = 0; i < g.dim; ++i) {
      domain.origin.push_back(-t);
      domain.extent.push_back(2.0 * t);
      shift.push_back(0.0);
    }
  }
  domain.cells.assign(domain.origin.size(), 1);
  if (g.pointwise()) {
    try {
      report["quadrature"] = to_json(lalpha_norm_quadrature(g, shift, alpha, domain, levels));
    } catch (const AccuracyError& e) {
      report["quadrature"] = {{"error", e.what()}, {"estimate", number(e.estimate())}};
    }
    report["domain"] = to_json(domain);
  }
  if (alpha < 2.0) report["verdict"] = to_json(existence_verdict(g.op, g.dim, alpha));
  write_json(run.out / "norms.json", report);
  run.record("norms.json");
  std::printf("%s\n", report.dump(2).c_str());
  return kExitOk;
}

int cmd_cf_suite(const json& cfg, Run& run) {
  const auto alphas = need(cfg, "alpha").get<std::vector<double>>();
  const auto u = need(cfg, "u").get<std::vector<double>>();
  const auto n = need(cfg, "n").get<std::size_t>();
  const double mult = need(cfg, "band_multiplier").get<double>();
  const auto seed = seed_of(cfg);
  json results = json::array();
  bool all = true;
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    const double a = alphas[k];
    const auto samples = sample_sas({a, 1.0}, n, rng::derive_seed(seed, k));
    auto cf = cf_test(samples, a, 1.0, u, mult);
    json entry = {{"alpha", a}, {"sampler", "sample_sas"}, {"cf", to_json(cf)}};
    all = all && cf.passed;
    if (a < 2.0 && n >= 10'000) {
      const auto q = quantile_check(samples, a);
      entry["quantile"] = to_json(q);
      all = all && q.passed;
    }
    results.push_back(entry);
    std::printf("alpha %s: cf gap %s (band %s) %s\n", format_double(a).c_str(),
                format_double(cf.max_gap).c_str(), format_double(cf.band).c_str(),
                cf.passed ? "passed" : "FAILED");
  }
  write_json(run.out / "cf_suite.json", results);
  run.record("cf_suite.json");
  return all ? kExitOk : kExitFailed;
}

int cmd_repro_all(const json& cfg, Run& run) {
  const auto seed = seed_of(cfg);
  json results = json::array();
  bool all = true;
  for (int id : need(cfg, "criteria").get<std::vector<int>>()) {
    const auto outcome = run_criterion(id, seed);
    std::printf("%s\n", format_outcome(outcome).c_str());
    std::fflush(stdout);
    all = all && outcome.passed;
    results.push_back({{"criterion", outcome.id},
                       {"title", outcome.title},
                       {"passed", outcome.passed},
                       {"summary", outcome.summary},
                       {"details", outcome.details}});
  }
  write_json(run.out / "acceptance.json", results);
  run.record("acceptance.json");
  return all ? kExitOk : kExitFailed;
}

int dispatch(const std::string& command, const json& cfg, Run& run) {
  if (command == "sample-noise") return cmd_sample_noise(cfg, run);
  if (command == "mild-field") return cmd_mild_field(cfg, run);
  if (command == "pairing") return cmd_pairing(cfg, run);
  if (command == "fubini-check") return cmd_fubini(cfg, run);
  if (command == "verdict-table") return cmd_verdict_table(cfg, run);
  if (command == "norms") return cmd_norms(cfg, run);
  if (command == "cf-suite") return cmd_cf_suite(cfg, run);
  if (command == "repro-all") return cmd_repro_all(cfg, run);
  throw ConfigError("unknown command '" + command + "'");
}

int execute(const std::string& command, const json& cfg, const fs::path& out) {
  fs::create_directories(out);
  Run run{out};
  const int code = dispatch(command, cfg, run);
  const json manifest = {{"tool", "levy-spde"},
                         {"version", kVersion},
                         {"command", command},
                         {"config", cfg},
                         {"outputs", run.manifest_outputs}};
  write_json(out / "manifest.json", manifest);
  return code;
}

// Flag values collected by CLI11 before they are resolved into a config.
struct Flags {
  std::string equation = "heat";
  int d = 1;
  double alpha = 1.5;
  std::string grid;
  std::string eval_grid;
  std::uint64_t seed = 0;
  double tol = 1e-6;
  std::string out = "levy-spde-out";
  std::string mode = "shared";
  int levels = 4;
  std::string center;
  std::string radii;
  double amplitude = 1.0;
  std::string d_range = "1..6";
  std::string alpha_range = "0.25..1.95:0.1";
  std::string equations = "heat,wave,poisson";
  double t = 1.0;
  std::string alpha_list = "0.5,1,1.5";
  std::string u_list = "0.5,1,2";
  std::size_t n = 100'000;
  double band = 4.0;
  std::string criteria = "1..9";
  std::string config;
};

json grid_config(const Flags& f, const GreenFunction& g) {
  return to_json(f.grid.empty() ? default_grid(g) : parse_grid(f.grid));
}

json phi_config(const Flags& f, const GridSpec& grid, bool space_time) {
  TestFunction phi = default_phi(grid, space_time);
  if (!f.center.empty()) phi.center = parse_list(f.center);
  if (!f.radii.empty()) phi.radii = parse_list(f.radii);
  phi.amplitude = f.amplitude;
  phi.validate();
  if (phi.dim() != grid.dim()) throw ConfigError("test function dimension does not match the grid");
  return to_json(phi);
}

json resolve(const std::string& command, const Flags& f) {
  json cfg;
  const GreenFunction g{parse_operator(f.equation), f.d};
  if (command == "sample-noise") {
    if (f.grid.empty()) throw ConfigError("sample-noise requires --grid");
    cfg = {{"grid", to_json(parse_grid(f.grid))}, {"alpha", f.alpha}, {"seed", f.seed}};
  } else if (command == "mild-field" || command == "pairing" || command == "fubini-check") {
    g.validate();
    cfg = {{"equation", f.equation}, {"d", f.d}, {"alpha", f.alpha}, {"seed", f.seed}};
    cfg["grid"] = grid_config(f, g);
    if (command == "mild-field") {
      cfg["eval_grid"] = f.eval_grid.empty() ? json() : to_json(parse_grid(f.eval_grid));
    } else {
      cfg["phi"] = phi_config(f, grid_from_json(cfg["grid"]), g.space_time());
      if (command == "pairing") cfg["tol"] = f.tol;
      if (command == "fubini-check") {
        cfg["mode"] = f.mode;
        cfg["levels"] = f.levels;
      }
    }
  } else if (command == "verdict-table") {
    std::vector<int> ds;
    for (double x : parse_range(f.d_range, 1.0)) {
      if (x != std::floor(x)) throw ConfigError("--d must be integers");
      ds.push_back(static_cast<int>(x));
    }
    auto eqs = split(f.equations, ',');
    for (const auto& e : eqs) parse_operator(e);
    cfg = {{"d", ds}, {"alpha", parse_range(f.alpha_range, 0.1)}, {"equations", eqs}};
  } else if (command == "norms") {
    g.validate();
    cfg = {{"equation", f.equation}, {"d", f.d}, {"alpha", f.alpha}, {"t", f.t}, {"levels", f.levels}};
  } else if (command == "cf-suite") {
    cfg = {{"alpha", parse_list(f.alpha_list)}, {"u", parse_list(f.u_list)}, {"n", f.n},
           {"band_multiplier", f.band}, {"seed", f.seed}};
  } else if (command == "repro-all") {
    std::vector<int> ids;
    for (double x : parse_range(f.criteria, 1.0)) ids.push_back(static_cast<int>(x));
    cfg = {{"criteria", ids}, {"seed", f.seed}};
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Levy white noise SPDE toolkit"};
  app.set_version_flag("--version", std::string("levy-spde ") + kVersion);
  Flags f;
  app.add_option("--config", f.config, "Re-run a manifest.json written by an earlier run");
  app.add_option("--out", f.out, "Output directory")->capture_default_str();

  auto add_kernel = [&](CLI::App* sub) {
    sub->add_option("--equation", f.equation, "heat | wave | poisson")
        ->check(CLI::IsMember({"heat", "wave", "poisson"}))
        ->capture_default_str();
    sub->add_option("--d", f.d, "Spatial dimension")->capture_default_str();
    sub->add_option("--alpha", f.alpha, "Stability index")->capture_default_str();
  };
  auto add_grid = [&](CLI::App* sub) {
    sub->add_option("--grid", f.grid, "Noise grid as lo,hi,n per axis (time first)");
  };
  auto add_seed = [&](CLI::App* sub) { sub->add_option("--seed", f.seed, "Noise seed")->required(); };
  auto add_phi = [&](CLI::App* sub) {
    sub->add_option("--center", f.center, "Test function center, comma separated");
    sub->add_option("--radii", f.radii, "Test function radii, comma separated");
    sub->add_option("--amplitude", f.amplitude, "Test function amplitude")->capture_default_str();
  };
  auto add_out = [&](CLI::App* sub) { sub->add_option("--out", f.out, "Output directory"); };

  auto* sample = app.add_subcommand("sample-noise", "Sample stable white noise on a grid");
  sample->add_option("--alpha", f.alpha, "Stability index")->capture_default_str();
  add_grid(sample);
  add_seed(sample);
  add_out(sample);

  auto* mild = app.add_subcommand("mild-field", "Mild solution at grid points");
  add_kernel(mild);
  add_grid(mild);
  mild->add_option("--eval-grid", f.eval_grid, "Evaluate at the midpoints of this grid");
  add_seed(mild);
  add_out(mild);

  auto* pairing = app.add_subcommand("pairing", "Generalized solution paired with a bump");
  add_kernel(pairing);
  add_grid(pairing);
  add_phi(pairing);
  pairing->add_option("--tol", f.tol, "Relative convolution tolerance")->capture_default_str();
  add_seed(pairing);
  add_out(pairing);

  auto* fubini = app.add_subcommand("fubini-check", "Compare mild and generalized pairings");
  add_kernel(fubini);
  add_grid(fubini);
  add_phi(fubini);
  fubini->add_option("--mode", f.mode, "shared | refine")
      ->check(CLI::IsMember({"shared", "refine"}))
      ->capture_default_str();
  fubini->add_option("--levels", f.levels, "Refinement levels")->capture_default_str();
  add_seed(fubini);
  add_out(fubini);

  auto* verdicts = app.add_subcommand("verdict-table", "Existence verdicts on a (d, alpha) lattice");
  verdicts->add_option("--d", f.d_range, "Dimensions, e.g. 1..5")->capture_default_str();
  verdicts->add_option("--alpha", f.alpha_range, "Alphas, e.g. 0.25..1.95:0.1")->capture_default_str();
  verdicts->add_option("--equations", f.equations, "Comma separated operators")->capture_default_str();
  add_out(verdicts);

  auto* norms = app.add_subcommand("norms", "Closed-form and quadrature L^alpha norms");
  add_kernel(norms);
  norms->add_option("--t", f.t, "Time horizon (half-width of the box for poisson)")->capture_default_str();
  norms->add_option("--levels", f.levels, "Refinement levels")->capture_default_str();
  add_out(norms);

  auto* cf = app.add_subcommand("cf-suite", "Empirical CF and quantile checks of the sampler");
  cf->add_option("--alpha", f.alpha_list, "Comma separated alphas")->capture_default_str();
  cf->add_option("--u", f.u_list, "Comma separated u values")->capture_default_str();
  cf->add_option("--n", f.n, "Samples per alpha")->capture_default_str();
  cf->add_option("--band", f.band, "Band multiplier")->capture_default_str();
  add_seed(cf);
  add_out(cf);

  auto* repro = app.add_subcommand("repro-all", "Run the acceptance suite");
  repro->add_option("--criteria", f.criteria, "Criteria to run, e.g. 1..9 or 2,3")->capture_default_str();
  repro->add_option("--seed", f.seed, "Base seed")->default_val(kAcceptanceSeed);
  add_out(repro);

  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    std::string command;
    json cfg;
    if (!f.config.empty()) {
      if (!app.get_subcommands().empty()) throw ConfigError("--config replaces the subcommand");
      std::ifstream in(f.config);
      if (!in) throw ConfigError("cannot read " + f.config);
      json manifest;
      try {
        manifest = json::parse(in);
      } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed manifest: ") + e.what());
      }
      command = need(manifest, "command").get<std::string>();
      cfg = need(manifest, "config");
    } else {
      if (app.get_subcommands().empty()) {
        std::cerr << app.help();
        return kExitUsage;
      }
      command = app.get_subcommands().front()->get_name();
      cfg = resolve(command, f);
    }
    return execute(command, cfg, f.out);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const json::exception& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UnsupportedError& e) {
    std::cerr << "unsupported: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ResourceError& e) {
    std::cerr << "resource error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const RefusedError& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailed;
  }
}
