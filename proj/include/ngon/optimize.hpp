#pragma once

// Maximizers of E^f_n over closed chains (3-space) and over convex
// equilateral polygons (turning angles).

#include "ngon/energy.hpp"
#include "ngon/geometry.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace ngon {

enum class Method { AnnealChain, AscendAngles, LocalMoves, MultiStart };

std::string to_string(Method m);
Method method_from_string(const std::string& s);

struct OptimizationConfig {
  Method method = Method::MultiStart;
  std::uint64_t seed = 0;
  int restarts = 16;
  long max_iters = 20000;
  double initial_temperature = 1.0;  // multiplied by |E| of the start
  double cooling_rate = 0.995;       // per sweep
  double step_size = 0.3;            // proposal sigma (annealing) or initial step (ascent)
  double step_decay = 0.9995;        // per sweep
  double convergence_tol = 1e-12;
  int threads = 0;  // 0: hardware concurrency

  void validate() const;
};

struct Diagnostics {
  double planar_deviation = 0.0;
  bool convexity_ok = false;
  double max_edge_gap = 0.0;
  double distance_to_regular = 0.0;
  double distance_to_double_arc = 0.0;
};

/// Structural diagnostics of a chain, using the relaxed annealing tolerances.
Diagnostics diagnose(const PointChain& chain);

struct TracePoint {
  long iteration = 0;
  double energy = 0.0;
};

struct OptimizationResult {
  PointChain best_chain;
  double best_energy = 0.0;
  std::vector<TracePoint> trace;
  Diagnostics diagnostics;
  /// Set when a closure projection failed and the result is best-so-far.
  bool projection_failed = false;
  /// Which restart produced the result (multi-start only).
  int best_restart = 0;
};

using Rng = std::mt19937_64;

/// Mixes several integers into one well-spread seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

/// n points drawn uniformly from a ball of diameter 1 (every pair within 1).
PointChain random_chain(Index n, Rng& rng, bool planar = false);

/// Dirichlet-distributed turning angles projected onto the closure manifold.
/// Throws std::runtime_error after 100 consecutive projection failures.
ConvexEquilateralPolygon sample_convex_polygon(Index n, std::uint64_t seed);

/// Nearest point to `p` within distance 1 of both `a` and `b`.
Point3 project_to_lens(const Point3& p, const Point3& a, const Point3& b);

OptimizationResult anneal_chain(Index n, const EnergyFamily& fam, const OptimizationConfig& cfg);

/// Same search from a given start chain.
OptimizationResult anneal_chain(const PointChain& start, const EnergyFamily& fam,
                                const OptimizationConfig& cfg);

/// Central-difference gradient of theta -> E(unit_step_walk(theta)).
Eigen::VectorXd angle_energy_gradient(const Eigen::VectorXd& theta, const EnergyFamily& fam,
                                      double h = 1e-6);

OptimizationResult ascend_angles(Index n, const EnergyFamily& fam, const OptimizationConfig& cfg,
                                 const ConvexEquilateralPolygon& init);

OptimizationResult local_moves(const PointChain& chain, const EnergyFamily& fam,
                               const OptimizationConfig& cfg);

/// Independent annealing restarts (seeds seed + r), each polished by
/// local_moves and an angle-space ascent; the best restart wins, ties to the
/// lowest restart index.
OptimizationResult multi_start(Index n, const EnergyFamily& fam, const OptimizationConfig& cfg);

/// Dispatches on cfg.method.  AscendAngles starts from the regular polygon,
/// LocalMoves from a random chain.
OptimizationResult optimize(Index n, const EnergyFamily& fam, const OptimizationConfig& cfg);

}  // namespace ngon
