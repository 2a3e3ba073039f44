// ngon: maximize and check pairwise energies of closed unit-edge chains.

#include "ngon/energy.hpp"
#include "ngon/geometry.hpp"
#include "ngon/optimize.hpp"
#include "ngon/serialize.hpp"
#include "ngon/verify.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

using namespace ngon;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSoftFail = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Every setting a subcommand may take; unset means "use the default".
struct Settings {
  std::optional<long> n;
  std::optional<double> alpha;
  std::optional<std::string> method;
  std::optional<std::uint64_t> seed;
  std::optional<int> restarts;
  std::optional<long> max_iters;
  std::optional<int> threads;
  std::optional<double> initial_temperature;
  std::optional<double> cooling_rate;
  std::optional<double> step_size;
  std::optional<double> step_decay;
  std::optional<double> convergence_tol;
  std::optional<int> samples;
  std::optional<double> alpha_min;
  std::optional<double> alpha_max;
  std::optional<int> steps;
  std::optional<std::string> suite;
  std::string out;
  std::string config_path;
  std::string input;
};

template <class T>
T convert(const std::string& key, const std::string& text) {
  T value{};
  if (!CLI::detail::lexical_cast(text, value)) {
    throw UsageError("config: bad value '" + text + "' for " + key);
  }
  return value;
}

template <class T>
void fill(std::optional<T>& slot, const std::optional<T>& from_file) {
  if (!slot && from_file) slot = from_file;
}

// Flat key=value lines; '-' and '_' are interchangeable in keys.
Settings read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  Settings s;
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_config(in);
  } catch (const CLI::Error& e) {
    throw UsageError("config: " + std::string(e.what()));
  }
  for (const auto& item : items) {
    if (item.inputs.empty()) continue;
    std::string key = item.name;
    std::replace(key.begin(), key.end(), '-', '_');
    const std::string& v = item.inputs.front();
    if (key == "n") s.n = convert<long>(key, v);
    else if (key == "alpha") s.alpha = convert<double>(key, v);
    else if (key == "method") s.method = v;
    else if (key == "seed") s.seed = convert<std::uint64_t>(key, v);
    else if (key == "restarts") s.restarts = convert<int>(key, v);
    else if (key == "max_iters") s.max_iters = convert<long>(key, v);
    else if (key == "threads") s.threads = convert<int>(key, v);
    else if (key == "initial_temperature") s.initial_temperature = convert<double>(key, v);
    else if (key == "cooling_rate") s.cooling_rate = convert<double>(key, v);
    else if (key == "step_size") s.step_size = convert<double>(key, v);
    else if (key == "step_decay") s.step_decay = convert<double>(key, v);
    else if (key == "convergence_tol") s.convergence_tol = convert<double>(key, v);
    else if (key == "samples") s.samples = convert<int>(key, v);
    else if (key == "alpha_min") s.alpha_min = convert<double>(key, v);
    else if (key == "alpha_max") s.alpha_max = convert<double>(key, v);
    else if (key == "steps") s.steps = convert<int>(key, v);
    else if (key == "suite") s.suite = v;
    else throw UsageError("config: unknown key '" + item.name + "'");
  }
  return s;
}

void merge_config(Settings& s) {
  if (s.config_path.empty()) return;
  const Settings f = read_config(s.config_path);
  fill(s.n, f.n);
  fill(s.alpha, f.alpha);
  fill(s.method, f.method);
  fill(s.seed, f.seed);
  fill(s.restarts, f.restarts);
  fill(s.max_iters, f.max_iters);
  fill(s.threads, f.threads);
  fill(s.initial_temperature, f.initial_temperature);
  fill(s.cooling_rate, f.cooling_rate);
  fill(s.step_size, f.step_size);
  fill(s.step_decay, f.step_decay);
  fill(s.convergence_tol, f.convergence_tol);
  fill(s.samples, f.samples);
  fill(s.alpha_min, f.alpha_min);
  fill(s.alpha_max, f.alpha_max);
  fill(s.steps, f.steps);
  fill(s.suite, f.suite);
}

std::uint64_t default_seed() {
  const char* env = std::getenv("NGON_SEED");
  if (env == nullptr || *env == '\0') return 0;
  return convert<std::uint64_t>("NGON_SEED", env);
}

OptimizationConfig make_config(const Settings& s) {
  OptimizationConfig c;
  try {
    if (s.method) c.method = method_from_string(*s.method);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  c.seed = s.seed.value_or(default_seed());
  if (s.restarts) c.restarts = *s.restarts;
  if (s.max_iters) c.max_iters = *s.max_iters;
  if (s.threads) c.threads = *s.threads;
  if (s.initial_temperature) c.initial_temperature = *s.initial_temperature;
  if (s.cooling_rate) c.cooling_rate = *s.cooling_rate;
  if (s.step_size) c.step_size = *s.step_size;
  if (s.step_decay) c.step_decay = *s.step_decay;
  if (s.convergence_tol) c.convergence_tol = *s.convergence_tol;
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return c;
}

RunManifest make_manifest(const std::string& command, const Settings& s, const Json& config,
                          std::uint64_t seed) {
  RunManifest m;
  m.command = command;
  m.config = config;
  m.seed = seed;
  m.timestamp = utc_timestamp();
  if (!s.config_path.empty()) m.inputs.push_back(s.config_path);
  if (!s.input.empty()) m.inputs.push_back(s.input);
  if (!s.out.empty()) m.outputs.push_back(s.out);
  return m;
}

void emit(const Settings& s, const std::string& text) {
  if (s.out.empty()) {
    std::cout << text;
  } else {
    write_text_file(s.out, text);
  }
}

void add_run_options(CLI::App* cmd, Settings& s) {
  cmd->add_option("--seed", s.seed, "Base RNG seed (default: $NGON_SEED or 0)");
  cmd->add_option("--restarts", s.restarts, "Independent annealing restarts");
  cmd->add_option("--max-iters", s.max_iters, "Sweeps per annealing run / ascent iterations");
  cmd->add_option("--threads", s.threads, "Worker threads (0: hardware parallelism)");
  cmd->add_option("--out", s.out, "Output file (default: stdout)");
  cmd->add_option("--config", s.config_path, "Flat key=value file; flags take precedence");
}

int cmd_optimize(Settings& s) {
  merge_config(s);
  if (!s.n) throw UsageError("optimize: --n is required");
  if (*s.n < 3) throw UsageError("optimize: --n must be at least 3");
  const double alpha = s.alpha.value_or(1.0);
  const OptimizationConfig cfg = make_config(s);
  Json config = to_json(cfg);
  config["n"] = *s.n;
  config["alpha"] = alpha;

  const OptimizationResult res = optimize(*s.n, EnergyFamily::power(alpha), cfg);
  Json doc = to_json(res);
  doc["manifest"] = to_json(make_manifest("optimize", s, config, cfg.seed));
  emit(s, dump(doc));

  if (res.projection_failed) {
    std::cerr << "ngon: closure projection failed; result is best-so-far\n";
    return kExitSoftFail;
  }
  if (!std::isfinite(res.best_energy)) {
    std::cerr << "ngon: optimizer ended on a singular configuration\n";
    return kExitSoftFail;
  }
  return kExitOk;
}

int cmd_verify(Settings& s) {
  merge_config(s);
  if (!s.suite) throw UsageError("verify: --suite is required");
  const std::string suite = *s.suite;
  const OptimizationConfig cfg = make_config(s);
  Json config = to_json(cfg);
  config["suite"] = suite;

  Json report;
  bool passed = false;
  if (suite == "n4") {
    const N4Report r = check_n4();
    report = to_json(r);
    passed = r.passed;
  } else if (suite == "inertia" || suite == "decomposition") {
    const int samples = s.samples.value_or(10000);
    if (samples < 1) throw UsageError("verify: --samples must be positive");
    config["samples"] = samples;
    const IdentityReport r = suite == "inertia" ? check_inertia_identity(samples, cfg.seed)
                                                : check_decomposition_identity(samples, cfg.seed);
    report = Json{{"suite", suite}};
    report.update(to_json(r));
    passed = r.passed;
  } else if (suite == "luko") {
    const int samples = s.samples.value_or(1000);
    if (samples < 0) throw UsageError("verify: --samples must be non-negative");
    std::vector<Index> ns;
    if (s.n) {
      if (*s.n < 4) throw UsageError("verify: luko needs --n >= 4");
      ns.push_back(*s.n);
    } else {
      for (Index n = 4; n <= 12; ++n) ns.push_back(n);
    }
    std::vector<double> alphas = {-1.0, 0.0, 1.0, 2.0};
    if (s.alpha) {
      if (*s.alpha > 2.0) throw UsageError("verify: luko needs --alpha <= 2");
      alphas = {*s.alpha};
    }
    config["samples"] = samples;
    config["n_values"] = ns;
    config["alphas"] = alphas;
    const LukoReport r = check_luko_bounds(ns, alphas, samples, cfg.seed);
    report = to_json(r);
    passed = r.passed;
  } else if (suite == "regular") {
    std::vector<Index> ns = {5, 6, 7, 8, 9, 10};
    std::vector<double> alphas = {-1.0, 0.0, 0.5, 1.0, 2.0};
    if (s.n) {
      if (*s.n < 5) throw UsageError("verify: regular needs --n >= 5");
      ns = {*s.n};
    }
    if (s.alpha) {
      if (*s.alpha > 2.0) throw UsageError("verify: regular needs --alpha <= 2");
      alphas = {*s.alpha};
    }
    config["n_values"] = ns;
    config["alphas"] = alphas;
    Json cases = Json::array();
    passed = true;
    for (Index n : ns) {
      for (double a : alphas) {
        const RegularOptimalityReport r = verify_regular_optimality(n, a, cfg);
        cases.push_back(to_json(r));
        passed = passed && r.passed;
      }
    }
    report = Json{{"suite", "regular"}, {"passed", passed}, {"cases", cases}};
  } else {
    throw UsageError("verify: unknown suite '" + suite +
                     "' (expected n4, inertia, decomposition, luko or regular)");
  }
  report["manifest"] = to_json(make_manifest("verify", s, config, cfg.seed));
  emit(s, dump(report));
  if (!passed) std::cerr << "ngon: suite " << suite << " failed\n";
  return passed ? kExitOk : kExitSoftFail;
}

int cmd_sweep(Settings& s, const std::string& json_path) {
  merge_config(s);
  if (!s.n) throw UsageError("sweep: --n is required");
  const double lo = s.alpha_min.value_or(1.0);
  const double hi = s.alpha_max.value_or(12.0);
  const int steps = s.steps.value_or(23);
  if (!(lo < hi)) throw UsageError("sweep: --alpha-min must be below --alpha-max");
  if (steps < 2) throw UsageError("sweep: --steps must be at least 2");
  if (*s.n < 4 || *s.n % 2 != 0) throw UsageError("sweep: --n must be even and at least 4");
  const OptimizationConfig cfg = make_config(s);
  Json config = to_json(cfg);
  config["n"] = *s.n;
  config["alpha_min"] = lo;
  config["alpha_max"] = hi;
  config["steps"] = steps;

  const std::vector<double> alphas = alpha_grid(lo, hi, steps);
  const SweepReport r = *s.n == 4 ? sweep_n4(alphas) : find_threshold_n(*s.n, alphas, cfg);
  RunManifest manifest = make_manifest("sweep", s, config, cfg.seed);
  if (!json_path.empty()) manifest.outputs.push_back(json_path);
  emit(s, sweep_csv(r, &manifest));
  if (!json_path.empty()) {
    Json doc = to_json(r);
    doc["manifest"] = to_json(manifest);
    write_text_file(json_path, dump(doc));
  }
  return kExitOk;
}

void print_chain(const PointChain& chain) {
  std::printf("chain, n = %ld\n", static_cast<long>(chain.size()));
  for (Index i = 0; i < chain.size(); ++i) {
    const Point3 p = chain.point(i);
    std::printf("  A%-3ld % .12f % .12f % .12f   |A%ldA%ld| = %.12f\n", static_cast<long>(i + 1),
                p.x(), p.y(), p.z(), static_cast<long>(i + 1),
                static_cast<long>(wrap(i + 1, chain.size()) + 1), chain.edge_length(i));
  }
  const Diagnostics d = diagnose(chain);
  std::printf("  planar deviation %.3e, convex %s, max edge gap %.3e\n", d.planar_deviation,
              d.convexity_ok ? "yes" : "no", d.max_edge_gap);
  std::printf("  distance to regular %.3e, to double arc %.3e\n", d.distance_to_regular,
              d.distance_to_double_arc);
  for (double a : {0.0, 1.0, 2.0}) {
    std::printf("  E(alpha=%g) = %.15g\n", a, total_energy(chain, EnergyFamily::power(a)));
  }
}

int cmd_show(Settings& s) {
  Json doc;
  try {
    doc = Json::parse(read_text_file(s.input));
  } catch (const Json::parse_error& e) {
    throw UsageError("show: " + s.input + " is not valid JSON");
  }
  if (doc.contains("best_chain")) {
    std::printf("best energy %s (restart %d)\n",
                doc["best_energy"].is_null() ? "-inf" : format_double(doc["best_energy"].get<double>()).c_str(),
                doc.value("best_restart", 0));
    print_chain(chain_from_json(doc["best_chain"]));
  } else if (doc.contains("points")) {
    print_chain(chain_from_json(doc));
  } else if (doc.contains("turning_angles")) {
    const ConvexEquilateralPolygon poly = polygon_from_json(doc);
    std::printf("polygon, n = %ld, turning angles:", static_cast<long>(poly.size()));
    for (Index i = 0; i < poly.size(); ++i) std::printf(" %.12f", poly.turning_angles[i]);
    std::printf("\n");
    print_chain(angles_to_points(poly));
  } else {
    std::cout << doc.dump(2) << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Maximize and check pairwise energies of closed chains with unit edges", "ngon"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  Settings s;
  std::string json_path;

  auto* opt = app.add_subcommand("optimize", "Search for a maximizing chain");
  opt->add_option("--n", s.n, "Number of points (>= 3)");
  opt->add_option("--alpha", s.alpha, "Power-law exponent (default 1)");
  opt->add_option("--method", s.method, "anneal, ascend, local or multistart");
  opt->add_option("--initial-temperature", s.initial_temperature);
  opt->add_option("--cooling-rate", s.cooling_rate);
  opt->add_option("--step-size", s.step_size);
  opt->add_option("--step-decay", s.step_decay);
  opt->add_option("--convergence-tol", s.convergence_tol);
  add_run_options(opt, s);

  auto* ver = app.add_subcommand("verify", "Run a check suite");
  ver->add_option("--suite", s.suite, "n4, inertia, decomposition, luko or regular");
  ver->add_option("--samples", s.samples, "Samples for the randomized suites");
  ver->add_option("--n", s.n, "Restrict luko/regular to one n");
  ver->add_option("--alpha", s.alpha, "Restrict luko/regular to one alpha");
  add_run_options(ver, s);

  auto* sw = app.add_subcommand("sweep", "Tabulate the maximizer's shape over alpha (CSV)");
  sw->add_option("--n", s.n, "Even number of points (>= 4)");
  sw->add_option("--alpha-min", s.alpha_min, "Default 1");
  sw->add_option("--alpha-max", s.alpha_max, "Default 12");
  sw->add_option("--steps", s.steps, "Grid points including both ends (default 23)");
  sw->add_option("--json", json_path, "Also write the report as JSON");
  add_run_options(sw, s);

  auto* show = app.add_subcommand("show", "Pretty-print a serialized chain, polygon or result");
  show->add_option("file", s.input, "JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "ngon: " << e.what() << " (see --help)\n";
    return kExitUsage;
  }

  try {
    if (app.got_subcommand(opt)) return cmd_optimize(s);
    if (app.got_subcommand(ver)) return cmd_verify(s);
    if (app.got_subcommand(sw)) return cmd_sweep(s, json_path);
    return cmd_show(s);
  } catch (const UsageError& e) {
    std::cerr << "ngon: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "ngon: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "ngon: " << e.what() << "\n";
    return kExitSoftFail;
  }
}
