#include "ngon/optimize.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <optional>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace ngon {

namespace {

// Polishing budgets inside multi_start.
constexpr long kPolishRounds = 400;
constexpr long kRefineIters = 5000;

void require(bool cond, const char* what) {
  if (!cond) throw std::invalid_argument(what);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Point3 gaussian3(Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double x = normal(rng);
  const double y = normal(rng);
  const double z = normal(rng);
  return {x, y, z};
}

Point3 any_perpendicular(const Point3& w) {
  const Point3 trial = std::abs(w.x()) < 0.9 ? Point3::UnitX() : Point3::UnitY();
  return w.cross(trial).normalized();
}

OptimizationResult make_result(PointChain chain, const EnergyFamily& fam,
                               std::vector<TracePoint> trace) {
  const double e = total_energy(chain, fam);
  Diagnostics diag = diagnose(chain);
  return OptimizationResult{std::move(chain), e, std::move(trace), diag, false, 0};
}

double angle_energy(const Eigen::VectorXd& theta, const EnergyFamily& fam) {
  return total_energy(unit_step_walk(theta), fam);
}

/// Gradient projected onto the tangent of the closure constraints, with
/// coordinates pinned at [0, pi] removed when the gradient pushes outward.
Eigen::VectorXd projected_gradient(const Eigen::VectorXd& theta, const Eigen::VectorXd& grad) {
  const Index n = theta.size();
  Eigen::Matrix3Xd jac = closure_jacobian(theta);
  Eigen::VectorXd g = grad;
  for (Index l = 0; l < n; ++l) {
    const bool pinned = (theta[l] <= 0.0 && g[l] < 0.0) || (theta[l] >= kPi && g[l] > 0.0);
    if (pinned) {
      g[l] = 0.0;
      jac.col(l).setZero();
    }
  }
  const Eigen::Matrix3d gram = jac * jac.transpose();
  const Eigen::Vector3d y = gram.completeOrthogonalDecomposition().solve(jac * g);
  return g - jac.transpose() * y;
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::AnnealChain: return "anneal";
    case Method::AscendAngles: return "ascend";
    case Method::LocalMoves: return "local";
    case Method::MultiStart: return "multistart";
  }
  return "unknown";
}

Method method_from_string(const std::string& s) {
  if (s == "anneal") return Method::AnnealChain;
  if (s == "ascend") return Method::AscendAngles;
  if (s == "local") return Method::LocalMoves;
  if (s == "multistart") return Method::MultiStart;
  throw std::invalid_argument("unknown method '" + s + "' (anneal, ascend, local, multistart)");
}

void OptimizationConfig::validate() const {
  require(restarts >= 1, "restarts must be >= 1");
  require(max_iters >= 1, "max_iters must be >= 1");
  require(cooling_rate > 0.0 && cooling_rate < 1.0, "cooling_rate must lie in (0, 1)");
  require(step_size > 0.0, "step_size must be > 0");
  require(step_decay > 0.0 && step_decay <= 1.0, "step_decay must lie in (0, 1]");
  require(initial_temperature >= 0.0, "initial_temperature must be >= 0");
  require(convergence_tol >= 0.0, "convergence_tol must be >= 0");
  require(threads >= 0, "threads must be >= 0");
}

Diagnostics diagnose(const PointChain& chain) {
  const ConvexityReport conv = is_convex_equilateral(chain, GeometryTolerances::annealed());
  const Eigen::VectorXd theta = turning_angles_of(chain);
  return {conv.planar_deviation, conv.ok, conv.max_edge_gap, distance_to_regular(theta),
          distance_to_double_arc(theta)};
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(splitmix64(base) ^ a) ^ b);
}

PointChain random_chain(Index n, Rng& rng, bool planar) {
  require(n >= 3, "random_chain requires n >= 3");
  std::uniform_real_distribution<double> unit(-0.5, 0.5);
  Points pts(3, n);
  for (Index i = 0; i < n; ++i) {
    Point3 p;
    do {
      p = {unit(rng), unit(rng), planar ? 0.0 : unit(rng)};
    } while (p.norm() > 0.5);
    pts.col(i) = p;
  }
  return PointChain(std::move(pts));
}

ConvexEquilateralPolygon sample_convex_polygon(Index n, std::uint64_t seed) {
  require(n >= 4, "sample_convex_polygon requires n >= 4");
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(n)));
  std::gamma_distribution<double> gamma(4.0, 1.0);
  for (int attempt = 0; attempt < 100; ++attempt) {
    Eigen::VectorXd theta(n);
    for (Index i = 0; i < n; ++i) theta[i] = gamma(rng);
    theta *= kTwoPi / theta.sum();
    if (auto projected = project_to_closure(theta, 1e-13)) {
      ConvexEquilateralPolygon poly{*projected};
      const double tail = projected->minCoeff();
      if (tail > 0.0 && projected->maxCoeff() < kPi) return poly;
    }
  }
  throw std::runtime_error("sample_convex_polygon: closure projection failed 100 times for n = " +
                           std::to_string(n));
}

Point3 project_to_lens(const Point3& p, const Point3& a, const Point3& b) {
  const double da = (p - a).norm();
  const double db = (p - b).norm();
  if (da <= 1.0 && db <= 1.0) return p;
  if (da > 1.0) {
    const Point3 q = a + (p - a) / da;
    if ((q - b).norm() <= 1.0) return q;
  }
  if (db > 1.0) {
    const Point3 q = b + (p - b) / db;
    if ((q - a).norm() <= 1.0) return q;
  }
  // Both spheres active: nearest point on their intersection circle.
  const Point3 axis = b - a;
  const double d = axis.norm();
  const Point3 center = 0.5 * (a + b);
  const double radius = std::sqrt(std::max(0.0, 1.0 - 0.25 * d * d));
  const Point3 w = d > 0.0 ? Point3(axis / d) : Point3::UnitZ();
  Point3 radial = (p - center) - (p - center).dot(w) * w;
  const double len = radial.norm();
  radial = len > 0.0 ? Point3(radial / len) : any_perpendicular(w);
  return center + radius * radial;
}

OptimizationResult anneal_chain(Index n, const EnergyFamily& fam, const OptimizationConfig& cfg) {
  require(n >= 3, "anneal_chain requires n >= 3");
  cfg.validate();
  Rng rng(derive_seed(cfg.seed, 0x616e6e65616cULL));
  PointChain start = random_chain(n, rng);
  for (int tries = 0; tries < 100 && total_energy(start, fam) == kNegInf; ++tries) {
    start = random_chain(n, rng);
  }
  OptimizationConfig inner = cfg;
  inner.seed = derive_seed(cfg.seed, 1);
  return anneal_chain(start, fam, inner);
}

OptimizationResult anneal_chain(const PointChain& start, const EnergyFamily& fam,
                                const OptimizationConfig& cfg) {
  cfg.validate();
  const Index n = start.size();
  Rng rng(derive_seed(cfg.seed, 0x6d6574726fULL));
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  Points pts = start.points();
  Eigen::MatrixXd pair = Eigen::MatrixXd::Zero(n, n);
  auto full_energy = [&] {
    double e = 0.0;
    for (Index p = 0; p < n; ++p) {
      for (Index q = p + 1; q < n; ++q) e += pair(p, q);
    }
    return e;
  };
  for (Index p = 0; p < n; ++p) {
    for (Index q = p + 1; q < n; ++q) {
      pair(p, q) = pair(q, p) = fam.from_squared((pts.col(p) - pts.col(q)).squaredNorm());
    }
  }
  double energy = full_energy();
  Points best = pts;
  double best_energy = energy;

  const double scale = std::isfinite(energy) && std::abs(energy) > 0.0 ? std::abs(energy) : 1.0;
  const double t0 = cfg.initial_temperature * scale;
  // Metropolis step for a proposal that moves the vertices flagged in `moving`
  // to their columns in `trial`.  Rigid proposals keep the distances inside
  // the moved set, so only cross pairs are re-evaluated.
  std::vector<char> moving(static_cast<std::size_t>(n), 0);
  std::vector<Index> moved;
  Points trial = pts;
  Eigen::MatrixXd fresh(n, n);
  auto metropolis = [&](double temperature, bool rigid) {
    double delta = 0.0;
    for (Index m : moved) {
      for (Index s = 0; s < n; ++s) {
        if (s == m) continue;
        const bool both = moving[static_cast<std::size_t>(s)] != 0;
        if (both && (rigid || s < m)) continue;
        const Point3 other = both ? Point3(trial.col(s)) : Point3(pts.col(s));
        const double v = fam.from_squared((trial.col(m) - other).squaredNorm());
        if (v == kNegInf) return false;
        fresh(m, s) = fresh(s, m) = v;
        delta += v - pair(m, s);
      }
    }
    const double u = uniform(rng);
    if (!std::isfinite(delta)) return false;
    if (delta < 0.0 && !(temperature > 0.0 && u < std::exp(delta / temperature))) return false;
    for (Index m : moved) {
      for (Index s = 0; s < n; ++s) {
        if (s == m) continue;
        const bool both = moving[static_cast<std::size_t>(s)] != 0;
        if (both && rigid) continue;
        pair(m, s) = pair(s, m) = fresh(m, s);
      }
    }
    for (Index m : moved) pts.col(m) = trial.col(m);
    energy = std::isfinite(energy) ? energy + delta : full_energy();
    if (energy > best_energy) {
      best_energy = energy;
      best = pts;
    }
    return true;
  };
  auto move_vertex = [&](Index k, const Point3& to) {
    trial.col(k) = to;
    moved.push_back(k);
    moving[static_cast<std::size_t>(k)] = 1;
  };
  auto clear_moved = [&] {
    for (Index m : moved) moving[static_cast<std::size_t>(m)] = 0;
    moved.clear();
  };

  std::vector<TracePoint> trace;
  trace.reserve(static_cast<std::size_t>(cfg.max_iters) + 1);
  trace.push_back({0, energy});

  const Index max_span = std::max<Index>(2, n - 2);
  std::uniform_int_distribution<Index> pick_vertex(0, n - 1);
  std::uniform_int_distribution<Index> pick_span(2, max_span);
  std::normal_distribution<double> normal(0.0, 1.0);

  for (long sweep = 0; sweep < cfg.max_iters; ++sweep) {
    const double temperature = t0 * std::pow(cfg.cooling_rate, static_cast<double>(sweep));
    const double shrink = std::pow(cfg.step_decay, static_cast<double>(sweep));
    const double sigma = cfg.step_size * shrink;
    for (Index i = 0; i < n; ++i) {
      const Point3 prev = pts.col(wrap(i - 1, n));
      const Point3 next = pts.col(wrap(i + 1, n));

      // Single vertex: Gaussian kick, then back inside both incident edges.
      const Point3 kicked = pts.col(i) + sigma * gaussian3(rng);
      move_vertex(i, project_to_lens(kicked, prev, next));
      metropolis(temperature, true);
      clear_moved();

      // Linkage: kick A_i against A_{i-1} only, then re-seat A_{i+1} in the
      // lens of its new neighbours.
      const Point3 seated = project_to_lens(pts.col(i) + sigma * gaussian3(rng), prev, prev);
      const Point3 after = pts.col(wrap(i + 2, n));
      if ((seated - after).norm() <= 2.0) {
        move_vertex(i, seated);
        move_vertex(wrap(i + 1, n), project_to_lens(next, seated, after));
        metropolis(temperature, false);
        clear_moved();
      }

      // Crankshaft: rotate the open arc between A_a and A_b about the chord.
      const Index a = pick_vertex(rng);
      const Index b = wrap(a + pick_span(rng), n);
      const double angle = kPi * shrink * normal(rng);
      const Point3 chord = pts.col(b) - pts.col(a);
      if (chord.norm() < 1e-12) continue;
      const Eigen::Matrix3d rot = Eigen::AngleAxisd(angle, chord.normalized()).toRotationMatrix();
      for (Index k = wrap(a + 1, n); k != b; k = wrap(k + 1, n)) {
        move_vertex(k, pts.col(a) + rot * (pts.col(k) - pts.col(a)));
      }
      metropolis(temperature, true);
      clear_moved();
    }
    if (sweep % 64 == 63) energy = full_energy();
    trace.push_back({sweep + 1, energy});
  }

  return make_result(PointChain(std::move(best)), fam, std::move(trace));
}

Eigen::VectorXd angle_energy_gradient(const Eigen::VectorXd& theta, const EnergyFamily& fam,
                                      double h) {
  Eigen::VectorXd grad(theta.size());
  Eigen::VectorXd probe = theta;
  for (Index l = 0; l < theta.size(); ++l) {
    probe[l] = theta[l] + h;
    const double up = angle_energy(probe, fam);
    probe[l] = theta[l] - h;
    const double down = angle_energy(probe, fam);
    probe[l] = theta[l];
    grad[l] = (up - down) / (2.0 * h);
  }
  return grad;
}

OptimizationResult ascend_angles(Index n, const EnergyFamily& fam, const OptimizationConfig& cfg,
                                 const ConvexEquilateralPolygon& init) {
  cfg.validate();
  require(init.size() == n, "initial polygon has the wrong vertex count");
  // Tighter than tol_closure so the closing edge stays at length 1 to ~1e-13.
  constexpr double kClosure = 1e-13;
  auto start = project_to_closure(init.turning_angles, kClosure);
  if (!start) throw InvalidPolygon("initial polygon cannot be projected onto the closure manifold");

  Eigen::VectorXd theta = *start;
  double energy = angle_energy(theta, fam);
  std::vector<TracePoint> trace{{0, energy}};
  double step = std::min(cfg.step_size, 0.5);
  bool projection_failed = false;

  for (long iter = 1; iter <= cfg.max_iters; ++iter) {
    const Eigen::VectorXd dir = projected_gradient(theta, angle_energy_gradient(theta, fam));
    const double norm = dir.norm();
    if (!(norm > 1e-8 * (1.0 + std::abs(energy)))) break;

    bool moved = false;
    bool last_failed_projection = false;
    while (step > 1e-14) {
      auto candidate = project_to_closure(theta + (step / norm) * dir, kClosure);
      if (!candidate) {
        last_failed_projection = true;
        step *= 0.5;
        continue;
      }
      last_failed_projection = false;
      const double e = angle_energy(*candidate, fam);
      if (e - energy > cfg.convergence_tol) {
        theta = *candidate;
        energy = e;
        moved = true;
        step = std::min(step * 1.5, 0.5);
        break;
      }
      step *= 0.5;
    }
    if (!moved) {
      projection_failed = last_failed_projection;
      break;
    }
    trace.push_back({iter, energy});
  }

  OptimizationResult res =
      make_result(angles_to_points(ConvexEquilateralPolygon{theta}), fam, std::move(trace));
  res.projection_failed = projection_failed;
  return res;
}

OptimizationResult local_moves(const PointChain& chain, const EnergyFamily& fam,
                               const OptimizationConfig& cfg) {
  cfg.validate();
  constexpr double kDeltas[] = {1e-1, -1e-1, 1e-2, -1e-2, 1e-3, -1e-3};
  const double tol_edge = GeometryTolerances{}.tol_edge;
  const Index n = chain.size();

  PointChain current = chain;
  double energy = total_energy(current, fam);
  std::vector<TracePoint> trace{{0, energy}};

  for (long round = 1; round <= cfg.max_iters; ++round) {
    const Point3 normal = fit_plane(current.points()).normal;
    std::optional<PointChain> best_move;
    double best_gain = cfg.convergence_tol;
    auto consider = [&](std::optional<PointChain> moved) {
      if (!moved) return;
      const double gain = total_energy(*moved, fam) - energy;
      if (gain > best_gain) {
        best_gain = gain;
        best_move = std::move(moved);
      }
    };

    for (Index i = 0; i < n; ++i) {
      for (Index j = i + 2; j < n; ++j) consider(reflect_subchain(current, i, j, normal));
    }
    for (Index pivot = 0; pivot < n; ++pivot) {
      for (Index edge = 0; edge < n; ++edge) {
        if (edge == pivot || wrap(edge + 1, n) == pivot) continue;
        for (double delta : kDeltas) consider(hinge_rotate(current, pivot, edge, delta, tol_edge));
      }
    }
    if (!best_move) break;
    current = std::move(*best_move);
    energy += best_gain;
    trace.push_back({round, energy});
  }
  return make_result(std::move(current), fam, std::move(trace));
}

namespace {

OptimizationResult single_restart(Index n, const EnergyFamily& fam, const OptimizationConfig& cfg) {
  OptimizationResult annealed = anneal_chain(n, fam, cfg);

  OptimizationConfig polish_cfg = cfg;
  polish_cfg.max_iters = std::min(cfg.max_iters, kPolishRounds);
  OptimizationResult polished = local_moves(annealed.best_chain, fam, polish_cfg);

  std::vector<TracePoint> trace = std::move(annealed.trace);
  const long offset = trace.empty() ? 0 : trace.back().iteration;
  for (const auto& tp : polished.trace) trace.push_back({offset + tp.iteration, tp.energy});
  OptimizationResult best = std::move(polished);

  // Angle-space refinement: the chain moves above cannot slide along the
  // equilateral manifold, so finish with projected ascent on turning angles.
  {
    Eigen::VectorXd theta = turning_angles_of(best.best_chain);
    if (auto closed = project_to_closure(theta.cwiseMax(0.0).cwiseMin(kPi))) {
      OptimizationConfig refine_cfg = cfg;
      refine_cfg.max_iters = std::min(cfg.max_iters, kRefineIters);
      refine_cfg.step_size = 1e-2;
      try {
        OptimizationResult refined = ascend_angles(n, fam, refine_cfg, {*closed});
        const double slack = 1e-9 * (1.0 + std::abs(best.best_energy));
        if (refined.best_energy >= best.best_energy - slack) {
          const long off = trace.back().iteration;
          for (const auto& tp : refined.trace) trace.push_back({off + tp.iteration, tp.energy});
          best = std::move(refined);
        }
      } catch (const InvalidPolygon&) {
        // keep the polished chain
      }
    }
  }
  best.trace = std::move(trace);
  return best;
}

}  // namespace

OptimizationResult multi_start(Index n, const EnergyFamily& fam, const OptimizationConfig& cfg) {
  require(n >= 3, "multi_start requires n >= 3");
  cfg.validate();
  const int restarts = cfg.restarts;
  std::vector<std::optional<OptimizationResult>> results(static_cast<std::size_t>(restarts));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (int r = next++; r < restarts; r = next++) {
      try {
        OptimizationConfig local = cfg;
        local.seed = cfg.seed + static_cast<std::uint64_t>(r);
        results[static_cast<std::size_t>(r)] = single_restart(n, fam, local);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  int threads = cfg.threads > 0 ? cfg.threads
                                : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, restarts);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  int best_index = 0;
  for (int r = 1; r < restarts; ++r) {
    if (results[static_cast<std::size_t>(r)]->best_energy >
        results[static_cast<std::size_t>(best_index)]->best_energy) {
      best_index = r;
    }
  }
  OptimizationResult best = std::move(*results[static_cast<std::size_t>(best_index)]);
  best.best_restart = best_index;
  return best;
}

OptimizationResult optimize(Index n, const EnergyFamily& fam, const OptimizationConfig& cfg) {
  switch (cfg.method) {
    case Method::AnnealChain: return anneal_chain(n, fam, cfg);
    case Method::AscendAngles:
      return ascend_angles(n, fam, cfg, n >= 4 ? sample_convex_polygon(n, cfg.seed) : regular_ngon(n));
    case Method::LocalMoves: {
      Rng rng(derive_seed(cfg.seed, 0x6c6f63616cULL));
      return local_moves(random_chain(n, rng), fam, cfg);
    }
    case Method::MultiStart: return multi_start(n, fam, cfg);
  }
  throw std::invalid_argument("unknown optimization method");
}

}  // namespace ngon
