#include "ngon/serialize.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ngon {

namespace {

Json number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

Json luko_case(const LukoCase& c) {
  return Json{{"n", c.n},
              {"k", c.k},
              {"alpha", number(c.alpha)},
              {"sample", c.sample},
              {"value", number(c.value)},
              {"bound", number(c.bound)},
              {"distance_to_regular", number(c.distance_to_regular)}};
}

const Json& require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw std::invalid_argument(std::string("missing key '") + key + "'");
  }
  return j.at(key);
}

}  // namespace

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<TracePoint> downsample_trace(const std::vector<TracePoint>& trace,
                                         std::size_t max_points) {
  if (trace.size() <= max_points || max_points < 2) return trace;
  std::vector<TracePoint> out;
  out.reserve(max_points);
  const std::size_t last = trace.size() - 1;
  for (std::size_t i = 0; i < max_points; ++i) {
    out.push_back(trace[i * last / (max_points - 1)]);
  }
  return out;
}

Json to_json(const RunManifest& m) {
  return Json{{"command", m.command}, {"version", m.version}, {"seed", m.seed},
              {"timestamp", m.timestamp}, {"inputs", m.inputs}, {"outputs", m.outputs},
              {"config", m.config}};
}

Json to_json(const OptimizationConfig& c) {
  return Json{{"method", to_string(c.method)},
              {"seed", c.seed},
              {"restarts", c.restarts},
              {"max_iters", c.max_iters},
              {"initial_temperature", number(c.initial_temperature)},
              {"cooling_rate", number(c.cooling_rate)},
              {"step_size", number(c.step_size)},
              {"step_decay", number(c.step_decay)},
              {"convergence_tol", number(c.convergence_tol)},
              {"threads", c.threads}};
}

Json to_json(const PointChain& chain) {
  Json pts = Json::array();
  for (Index i = 0; i < chain.size(); ++i) {
    const Point3 p = chain.point(i);
    pts.push_back(Json::array({number(p.x()), number(p.y()), number(p.z())}));
  }
  return Json{{"n", chain.size()}, {"points", pts}};
}

Json to_json(const ConvexEquilateralPolygon& poly) {
  Json th = Json::array();
  for (Index i = 0; i < poly.size(); ++i) th.push_back(number(poly.turning_angles[i]));
  return Json{{"n", poly.size()}, {"turning_angles", th}};
}

Json to_json(const EnergyBreakdown& b) {
  Json steps = Json::array();
  for (const auto& t : b.per_step) {
    steps.push_back(Json{{"k", t.k}, {"mu", number(t.mu)}, {"value", number(t.value)}});
  }
  return Json{{"total", number(b.total)}, {"per_step", steps}};
}

Json to_json(const Diagnostics& d) {
  return Json{{"planar_deviation", number(d.planar_deviation)},
              {"convexity_ok", d.convexity_ok},
              {"max_edge_gap", number(d.max_edge_gap)},
              {"distance_to_regular", number(d.distance_to_regular)},
              {"distance_to_double_arc", number(d.distance_to_double_arc)}};
}

Json to_json(const OptimizationResult& r) {
  Json trace = Json::array();
  for (const auto& t : downsample_trace(r.trace)) {
    trace.push_back(Json::array({t.iteration, number(t.energy)}));
  }
  return Json{{"best_energy", number(r.best_energy)},
              {"best_restart", r.best_restart},
              {"projection_failed", r.projection_failed},
              {"diagnostics", to_json(r.diagnostics)},
              {"best_chain", to_json(r.best_chain)},
              {"trace_length", r.trace.size()},
              {"trace", trace}};
}

Json to_json(const N4Report& r) {
  Json classes = Json::array();
  for (const auto& [alpha, c] : r.classes) {
    classes.push_back(Json{{"alpha", number(alpha)}, {"class", to_string(c)}});
  }
  return Json{{"suite", "n4"},
              {"passed", r.passed},
              {"threshold", number(r.threshold)},
              {"rhombi", r.rhombi},
              {"max_constant_deviation", number(r.max_constant_deviation)},
              {"tie_tol", kAnalyticTieTol},
              {"classes", classes}};
}

Json to_json(const RegularOptimalityReport& r) {
  return Json{{"suite", "regular"},
              {"passed", r.passed},
              {"n", r.n},
              {"alpha", number(r.alpha)},
              {"best_energy", number(r.best_energy)},
              {"reference", number(r.reference)},
              {"relative_gap", number(r.relative_gap)},
              {"restarts", r.restarts},
              {"seed", r.seed},
              {"diagnostics", to_json(r.diagnostics)},
              {"message", r.message}};
}

Json to_json(const LukoReport& r) {
  Json near = Json::array();
  for (const auto& c : r.near_equality) near.push_back(luko_case(c));
  Json j{{"suite", "luko"},
         {"passed", r.passed},
         {"polygons", r.polygons},
         {"checks", r.checks},
         {"violations", r.violations},
         {"max_violation", number(r.max_violation)},
         {"violation_tol", kLukoViolationTol},
         {"equality_tol", kLukoEqualityTol},
         {"equality_shape_tol", kLukoShapeTol},
         {"equality_only_at_regular", r.equality_only_at_regular},
         {"near_equality", near}};
  j["offending_case"] = r.offending_case ? luko_case(*r.offending_case) : Json(nullptr);
  j["offending_polygon"] = r.offending ? to_json(*r.offending) : Json(nullptr);
  return j;
}

Json to_json(const IdentityReport& r) {
  return Json{{"passed", r.passed},
              {"samples", r.samples},
              {"max_residual", number(r.max_residual)},
              {"tolerance", kIdentityTol},
              {"worst_case", r.worst_case}};
}

Json to_json(const SweepReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    rows.push_back(Json{{"alpha", number(row.alpha)},
                        {"winner", to_string(row.winner)},
                        {"energy_best", number(row.energy_best)},
                        {"energy_regular", number(row.energy_regular)},
                        {"energy_double_arc", number(row.energy_double_arc)},
                        {"gap", number(row.gap)},
                        {"distance_to_regular", number(row.distance_to_regular)},
                        {"distance_to_double_arc", number(row.distance_to_double_arc)},
                        {"restarts", row.restarts},
                        {"seed", row.seed}});
  }
  Json bracket = nullptr;
  if (r.bracket) bracket = Json::array({r.bracket->first, r.bracket->second});
  return Json{{"n", r.n},
              {"tie_tol", r.tie_tol},
              {"method_notes", r.method_notes},
              {"bracket", bracket},
              {"monotone", winners_monotone(r)},
              {"rows", rows}};
}

PointChain chain_from_json(const Json& j) {
  const Json& pts = require(j, "points");
  if (!pts.is_array()) throw std::invalid_argument("'points' must be an array");
  Points p(3, static_cast<Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!pts[i].is_array() || pts[i].size() != 3) {
      throw std::invalid_argument("each point must have three coordinates");
    }
    for (int d = 0; d < 3; ++d) {
      if (!pts[i][d].is_number()) throw std::invalid_argument("non-numeric coordinate");
      p(d, static_cast<Index>(i)) = pts[i][d].get<double>();
    }
  }
  return PointChain(p);
}

ConvexEquilateralPolygon polygon_from_json(const Json& j) {
  const Json& th = require(j, "turning_angles");
  if (!th.is_array()) throw std::invalid_argument("'turning_angles' must be an array");
  ConvexEquilateralPolygon poly;
  poly.turning_angles.resize(static_cast<Index>(th.size()));
  for (std::size_t i = 0; i < th.size(); ++i) {
    if (!th[i].is_number()) throw std::invalid_argument("non-numeric turning angle");
    poly.turning_angles[static_cast<Index>(i)] = th[i].get<double>();
  }
  return poly;
}

OptimizationConfig config_from_json(const Json& j) {
  OptimizationConfig c;
  try {
    if (j.contains("method")) c.method = method_from_string(j.at("method").get<std::string>());
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("restarts")) c.restarts = j.at("restarts").get<int>();
    if (j.contains("max_iters")) c.max_iters = j.at("max_iters").get<long>();
    if (j.contains("initial_temperature")) c.initial_temperature = j.at("initial_temperature").get<double>();
    if (j.contains("cooling_rate")) c.cooling_rate = j.at("cooling_rate").get<double>();
    if (j.contains("step_size")) c.step_size = j.at("step_size").get<double>();
    if (j.contains("step_decay")) c.step_decay = j.at("step_decay").get<double>();
    if (j.contains("convergence_tol")) c.convergence_tol = j.at("convergence_tol").get<double>();
    if (j.contains("threads")) c.threads = j.at("threads").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad config: ") + e.what());
  }
  c.validate();
  return c;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json without_timestamps(Json j) {
  if (j.is_object()) {
    j.erase("timestamp");
    for (auto& [key, value] : j.items()) value = without_timestamps(value);
  } else if (j.is_array()) {
    for (auto& value : j) value = without_timestamps(value);
  }
  return j;
}

std::string sweep_csv(const SweepReport& r, const RunManifest* manifest) {
  std::ostringstream out;
  if (manifest) out << "# manifest " << to_json(*manifest).dump() << "\n";
  out << "# n=" << r.n << " tie_tol=" << format_double(r.tie_tol) << "\n";
  out << "# " << r.method_notes << "\n";
  if (r.bracket) {
    out << "# bracket " << format_double(r.bracket->first) << " "
        << format_double(r.bracket->second) << "\n";
  } else {
    out << "# bracket none\n";
  }
  out << "alpha,winner,energy_best,energy_regular,energy_double_arc,gap,restarts,seed\n";
  for (const auto& row : r.rows) {
    out << format_double(row.alpha) << ',' << to_string(row.winner) << ','
        << format_double(row.energy_best) << ',' << format_double(row.energy_regular) << ','
        << format_double(row.energy_double_arc) << ',' << format_double(row.gap) << ','
        << row.restarts << ',' << row.seed << "\n";
  }
  return out.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << text;
  if (!f) throw std::runtime_error("failed writing " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace ngon
