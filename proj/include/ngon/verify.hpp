#pragma once

// Numerical checks of the structural results: the n = 4 classification, the
// regular polygon's optimality for alpha <= 2, the k-step chord bounds, the
// energy identities, and an exploratory symmetry-breaking sweep.

#include "ngon/energy.hpp"
#include "ngon/optimize.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ngon {

/// Relative tie tolerance for closed-form comparisons.
inline constexpr double kAnalyticTieTol = 1e-9;
/// Relative tie tolerance for optimizer-based comparisons.
inline constexpr double kOptimizerTieTol = 1e-3;
/// Angle-space distance under which an optimizer result counts as a shape.
inline constexpr double kShapeTol = 1e-3;

enum class N4Class { Square, DoubleArc, Tie };
std::string to_string(N4Class c);

/// Grid argmax of the rhombus diagonal energy over phi in (0, pi) with the
/// degenerate endpoints included.
N4Class classify_n4(double alpha, int grid_points = 100000);

/// Square energy minus double-arc energy for n = 4 (closed form; +inf when
/// the double arc collides).
double n4_square_minus_arc(double alpha);

/// Bisection on the sign of n4_square_minus_arc.
double find_threshold_n4(double lo = 1.0, double hi = 3.0, int iterations = 40);

struct N4Report {
  bool passed = false;
  double threshold = 0.0;
  /// max |E^2(rhombus) - 8| over the rhombus grid
  double max_constant_deviation = 0.0;
  long rhombi = 0;
  std::vector<std::pair<double, N4Class>> classes;
};

/// Threshold, alpha = 2 invariance on `rhombi` rhombi and classification of a
/// few alphas.  Passes when the threshold is 2 within 1e-6, the invariance
/// holds within 1e-9 and the classes match {Square, Tie, DoubleArc}.
N4Report check_n4(long rhombi = 10000);

struct RegularOptimalityReport {
  bool passed = false;
  Index n = 0;
  double alpha = 0.0;
  double best_energy = 0.0;
  double reference = 0.0;
  double relative_gap = 0.0;
  Diagnostics diagnostics;
  int restarts = 0;
  std::uint64_t seed = 0;
  std::string message;
};

/// Runs multi_start and checks the result against the regular polygon.
/// Requires n >= 5 and alpha <= 2; never throws on a failed check.
RegularOptimalityReport verify_regular_optimality(Index n, double alpha,
                                                  const OptimizationConfig& cfg);

struct LukoCase {
  Index n = 0;
  Index k = 0;
  double alpha = 0.0;
  int sample = -1;  // -1: the regular polygon
  double value = 0.0;
  double bound = 0.0;
  double distance_to_regular = 0.0;
};

struct LukoReport {
  bool passed = false;
  long polygons = 0;
  long checks = 0;
  long violations = 0;
  double max_violation = 0.0;  // max(value - bound)
  std::vector<LukoCase> near_equality;
  bool equality_only_at_regular = true;
  std::optional<ConvexEquilateralPolygon> offending;
  std::optional<LukoCase> offending_case;
};

/// Tolerances of the bound sweep.
inline constexpr double kLukoViolationTol = 1e-9;
/// Relative to 1 + bound.  The slack grows quadratically with the angle
/// distance to the regular polygon, so 1e-11 corresponds to roughly 1e-6.
inline constexpr double kLukoEqualityTol = 1e-11;
/// Equality cases must be this close to the regular polygon (angle space).
inline constexpr double kLukoShapeTol = 1e-6;

/// For each n, `samples` random polygons plus the regular one; every k and
/// every alpha (all <= 2).  k = 1 is skipped in the equality analysis (every
/// edge is 1), as is n = 4 with alpha = 2 where every rhombus attains it.
LukoReport check_luko_bounds(const std::vector<Index>& ns, const std::vector<double>& alphas,
                             int samples, std::uint64_t seed);

struct IdentityReport {
  bool passed = false;
  long samples = 0;
  double max_residual = 0.0;  // relative: |a - b| / (1 + |b|)
  std::string worst_case;
};

inline constexpr double kIdentityTol = 1e-9;

/// E^2 against n * sum |A_i - c|^2 on random planar and 3D chains, the unit
/// square and a fully collapsed chain.
IdentityReport check_inertia_identity(int samples, std::uint64_t seed);

/// decompose().total against total_energy() on random chains, n in 3..16.
IdentityReport check_decomposition_identity(int samples, std::uint64_t seed,
                                            const std::vector<double>& alphas = {-1.0, 0.0, 0.5,
                                                                                 1.0, 2.0, 3.0});

struct DiameterLimit {
  double alpha = 0.0;
  double root = 0.0;      // E^alpha(chain)^(1/alpha)
  double diameter = 0.0;  // max pairwise distance
  double relative_error = 0.0;
};

double diameter(const PointChain& chain);

/// E^alpha(chain)^(1/alpha) against the diameter; requires alpha > 0.
DiameterLimit check_diameter_limit(const PointChain& chain, double alpha);

enum class Winner { Regular, DoubleArc, Other, Tie };
std::string to_string(Winner w);

struct SweepRow {
  double alpha = 0.0;
  Winner winner = Winner::Other;
  double energy_best = 0.0;
  double energy_regular = 0.0;
  double energy_double_arc = 0.0;  // -inf when the arc's collisions are singular
  double gap = 0.0;                // energy_best - max(energy_regular, energy_double_arc)
  double distance_to_regular = 0.0;
  double distance_to_double_arc = 0.0;
  int restarts = 0;
  std::uint64_t seed = 0;
};

struct SweepReport {
  Index n = 0;
  std::vector<SweepRow> rows;
  /// (last alpha before the first DoubleArc row, first DoubleArc alpha).
  std::optional<std::pair<double, double>> bracket;
  double tie_tol = kOptimizerTieTol;
  std::string method_notes;
};

/// Energy of the embedded double straight arc (-inf if singular, n even).
double double_arc_energy(Index n, double alpha);

/// Winner rule shared by both sweeps; `shape_ok_*` are angle-space matches.
Winner classify_winner(double best, double regular, double arc, double tie_tol,
                       bool shape_regular, bool shape_arc);

/// Exploratory sweep over alpha with multi_start at every grid point.
/// Requires an even n >= 4.
SweepReport find_threshold_n(Index n, const std::vector<double>& alphas,
                             const OptimizationConfig& cfg);

/// Closed-form sweep for n = 4 driven by classify_n4.
SweepReport sweep_n4(const std::vector<double>& alphas);

/// Evenly spaced grid with both ends included; requires steps >= 2, lo < hi.
std::vector<double> alpha_grid(double lo, double hi, int steps);

/// Regular -> (Other | Tie)* -> DoubleArc with no step backwards.
bool winners_monotone(const SweepReport& report);

}  // namespace ngon
