// Acceptance run: one PASS/FAIL line per criterion, thresholds pinned here.

#include "ngon/energy.hpp"
#include "ngon/geometry.hpp"
#include "ngon/optimize.hpp"
#include "ngon/serialize.hpp"
#include "ngon/verify.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>

using namespace ngon;

namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& title, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = limit_s <= 0 || dt < limit_s;
  const bool ok = o.ok && in_time;
  if (!ok) ++failures;
  std::printf("%s  %d  %s | %s | %.2f s", ok ? "PASS" : "FAIL", id, title.c_str(), o.detail.c_str(), dt);
  if (limit_s > 0) std::printf(" (limit %.0f s)", limit_s);
  std::printf("\n");
  std::fflush(stdout);
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

const std::uint64_t kSeed = 20240501;
const std::filesystem::path kReportDir = "acceptance_reports";

RunManifest manifest(const std::string& command, const Json& config) {
  RunManifest m;
  m.command = command;
  m.config = config;
  m.seed = kSeed;
  m.timestamp = utc_timestamp();
  return m;
}

// Criterion 2 report.
Json threshold_report() {
  Json doc = to_json(check_n4());
  doc["manifest"] = to_json(manifest("acceptance n4", Json::object()));
  return doc;
}

// Criterion 3 report.
Json regular_report(bool& passed, double& worst_rel, double& worst_dist) {
  OptimizationConfig cfg;
  cfg.restarts = 16;
  cfg.seed = kSeed;
  Json cases = Json::array();
  passed = true;
  worst_rel = 0.0;
  worst_dist = 0.0;
  for (Index n = 5; n <= 10; ++n) {
    for (double a : {-1.0, 0.0, 0.5, 1.0, 2.0}) {
      const RegularOptimalityReport r = verify_regular_optimality(n, a, cfg);
      cases.push_back(to_json(r));
      worst_rel = std::max(worst_rel, r.relative_gap);
      worst_dist = std::max(worst_dist, r.diagnostics.distance_to_regular);
      passed = passed && r.relative_gap <= 1e-3 && r.diagnostics.distance_to_regular <= 1e-3 &&
               r.best_energy <= r.reference + 1e-6;
    }
  }
  Json doc{{"suite", "regular"}, {"passed", passed}, {"cases", cases}};
  doc["manifest"] = to_json(manifest("acceptance regular", to_json(cfg)));
  return doc;
}

// Criterion 5 report.
Json luko_report(const LukoReport& r) {
  Json doc = to_json(r);
  doc["manifest"] = to_json(manifest("acceptance luko", Json{{"samples", 1000}}));
  return doc;
}

LukoReport run_luko() {
  std::vector<Index> ns;
  for (Index n = 4; n <= 12; ++n) ns.push_back(n);
  return check_luko_bounds(ns, {-1.0, 0.0, 1.0, 2.0}, 1000, kSeed);
}

void save(const std::string& name, const Json& doc) {
  write_text_file((kReportDir / name).string(), dump(doc));
}

std::string load_stripped(const std::string& name) {
  return dump(without_timestamps(Json::parse(read_text_file((kReportDir / name).string()))));
}

}  // namespace

int main() {
  std::filesystem::create_directories(kReportDir);

  criterion(1, "n=4 invariance at alpha=2", 1.0, [] {
    const EnergyFamily quad = EnergyFamily::power(2.0);
    double worst = 0.0;
    const int count = 10000;
    for (int i = 1; i <= count; ++i) {
      const double phi = kPi * i / (count + 1.0);
      Points p(3, 4);
      p.col(0) = Point3::Zero();
      p.col(1) = Point3::UnitX();
      p.col(2) = Point3(1 + std::cos(phi), std::sin(phi), 0);
      p.col(3) = Point3(std::cos(phi), std::sin(phi), 0);
      worst = std::max(worst, std::abs(total_energy(PointChain(p), quad) - 8.0));
    }
    return Outcome{worst <= 1e-9, "10000 rhombi, max |E - 8| = " + fmt("%.3e", worst) + " (tol 1e-9)"};
  });

  criterion(2, "n=4 threshold", 1.0, [] {
    const Json doc = threshold_report();
    save("threshold_n4.json", doc);
    const double t = doc["threshold"].get<double>();
    return Outcome{std::abs(t - 2.0) <= 1e-6,
                   "threshold = " + fmt("%.12f", t) + " (2 +- 1e-6)"};
  });

  criterion(3, "regular polygon optimality, n=5..10, alpha in {-1,0,0.5,1,2}", 300.0, [] {
    bool passed = false;
    double rel = 0, dist = 0;
    const Json doc = regular_report(passed, rel, dist);
    save("regular.json", doc);
    return Outcome{passed, "30 cases, worst relative gap " + fmt("%.3e", rel) + " (tol 1e-3), worst " +
                               "distance_to_regular " + fmt("%.3e", dist) + " (tol 1e-3)"};
  });

  criterion(4, "annealed chains are planar convex equilateral, n=5,6,7, alpha=1", 300.0, [] {
    const EnergyFamily f = EnergyFamily::power(1.0);
    std::ostringstream detail;
    bool ok = true;
    for (Index n = 5; n <= 7; ++n) {
      int good = 0;
      for (int run = 0; run < 50; ++run) {
        OptimizationConfig cfg;
        cfg.seed = derive_seed(kSeed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(run));
        const OptimizationResult r = anneal_chain(n, f, cfg);
        const Diagnostics& d = r.diagnostics;
        if (d.planar_deviation <= 1e-3 && d.convexity_ok && d.max_edge_gap <= 1e-3) ++good;
      }
      ok = ok && good >= 48;  // 95% of 50, rounded up
      detail << "n=" << n << ": " << good << "/50  ";
    }
    detail << "(need >= 95%)";
    return Outcome{ok, detail.str()};
  });

  criterion(5, "chord bound sweep, n=4..12, alpha in {-1,0,1,2}", 120.0, [] {
    const LukoReport r = run_luko();
    save("luko.json", luko_report(r));
    const bool ok = r.violations == 0 && r.max_violation <= 1e-9 && r.equality_only_at_regular;
    return Outcome{ok, std::to_string(r.polygons) + " polygons, " + std::to_string(r.checks) +
                           " checks, violations " + std::to_string(r.violations) + ", max excess " +
                           fmt("%.3e", r.max_violation) + " (tol 1e-9), " +
                           std::to_string(r.near_equality.size()) + " equality cases, all regular: " +
                           (r.equality_only_at_regular ? "yes" : "no")};
  });

  criterion(6, "decomposition and inertia identities", 30.0, [] {
    const IdentityReport dec = check_decomposition_identity(10000, kSeed);
    const IdentityReport in = check_inertia_identity(10000, kSeed);
    return Outcome{dec.passed && in.passed && dec.max_residual <= 1e-9 && in.max_residual <= 1e-9,
                   "decomposition max residual " + fmt("%.3e", dec.max_residual) + ", inertia max residual " +
                       fmt("%.3e", in.max_residual) + " (tol 1e-9, relative)"};
  });

  criterion(7, "diameter limit at alpha=200", 1.0, [] {
    const DiameterLimit sq = check_diameter_limit(angles_to_points(regular_ngon(4)), 200.0);
    const DiameterLimit arc = check_diameter_limit(angles_to_points(double_straight_arc(6)), 200.0);
    return Outcome{sq.relative_error <= 0.05 && arc.relative_error <= 0.05,
                   "square " + fmt("%.4f", sq.root) + " vs " + fmt("%.4f", sq.diameter) +
                       ", double arc " + fmt("%.4f", arc.root) + " vs " + fmt("%.4f", arc.diameter) +
                       ", worst relative error " +
                       fmt("%.3e", std::max(sq.relative_error, arc.relative_error)) + " (tol 0.05)"};
  });

  criterion(8, "n=6 exploratory sweep over alpha in [1, 12]", 600.0, [] {
    OptimizationConfig cfg;
    cfg.restarts = 16;
    cfg.seed = kSeed;
    const SweepReport r = find_threshold_n(6, alpha_grid(1.0, 12.0, 23), cfg);
    Json doc = to_json(r);
    doc["manifest"] = to_json(manifest("acceptance sweep", to_json(cfg)));
    save("sweep_n6.json", doc);
    const std::string csv = sweep_csv(r);
    write_text_file((kReportDir / "sweep_n6.csv").string(), csv);

    bool formed = r.rows.size() == 23 && r.n == 6 &&
                  r.method_notes.find("exploratory") != std::string::npos &&
                  Json::parse(dump(doc))["rows"].size() == 23;
    for (const auto& row : r.rows) {
      formed = formed && std::isfinite(row.energy_best) && std::isfinite(row.energy_regular) &&
               row.restarts == 16 && row.seed == kSeed;
    }
    const bool starts_regular = !r.rows.empty() && r.rows.front().winner == Winner::Regular;
    const bool ends_arc = !r.rows.empty() && r.rows.back().winner == Winner::DoubleArc;
    const bool ok = formed && r.bracket.has_value() && winners_monotone(r) && starts_regular && ends_arc;
    std::string seq;
    Winner last = Winner::Tie;
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
      if (i == 0 || r.rows[i].winner != last) {
        if (i > 0) seq += " -> ";
        seq += to_string(r.rows[i].winner);
        last = r.rows[i].winner;
      }
    }
    std::string bracket = "none";
    if (r.bracket) bracket = "[" + fmt("%g", r.bracket->first) + ", " + fmt("%g", r.bracket->second) + "]";
    return Outcome{ok, "winners " + seq + ", bracket " + bracket + ", well-formed " +
                           (formed ? "yes" : "no")};
  });

  criterion(9, "determinism of criteria 2, 3, 5", 0.0, [] {
    const std::string t1 = load_stripped("threshold_n4.json");
    const std::string r1 = load_stripped("regular.json");
    const std::string l1 = load_stripped("luko.json");
    save("threshold_n4.json", threshold_report());
    bool passed = false;
    double rel = 0, dist = 0;
    save("regular.json", regular_report(passed, rel, dist));
    save("luko.json", luko_report(run_luko()));
    const bool t = t1 == load_stripped("threshold_n4.json");
    const bool r = r1 == load_stripped("regular.json");
    const bool l = l1 == load_stripped("luko.json");
    return Outcome{t && r && l, std::string("threshold ") + (t ? "identical" : "DIFFERS") + ", regular " +
                                    (r ? "identical" : "DIFFERS") + ", luko " +
                                    (l ? "identical" : "DIFFERS") + " (timestamps excluded)"};
  });

  std::printf("%s: %d criteria failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
