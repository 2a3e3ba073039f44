#pragma once

// Closed chains of unit-spaced particles and convex equilateral polygons.
//
// A PointChain is the general configuration: n points in 3-space whose
// cyclically consecutive distances are at most 1.  A ConvexEquilateralPolygon
// is the restricted configuration described by its exterior (turning) angles;
// every edge has length exactly 1 once it is embedded.

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>

namespace ngon {

using Index = Eigen::Index;
using Point3 = Eigen::Vector3d;
using Points = Eigen::Matrix3Xd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Cyclic index arithmetic; every vertex index in this library is taken mod n.
constexpr Index wrap(Index i, Index n) { return ((i % n) + n) % n; }

struct GeometryTolerances {
  double tol_edge = 1e-9;
  double tol_angle = 1e-9;
  double tol_closure = 1e-9;
  double tol_planar = 1e-6;
  double tol_convex = 1e-6;

  /// Relaxed tolerances for chains produced by the stochastic optimizers.
  static GeometryTolerances annealed() { return {1e-3, 1e-9, 1e-9, 1e-3, 1e-3}; }

  void validate() const;
};

class InvalidPolygon : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Closed chain A_1..A_n in 3-space with |A_i A_{i+1}| <= 1 (indices cyclic).
class PointChain {
 public:
  /// Throws std::invalid_argument if n < 3 or an edge exceeds 1 + tol_edge.
  explicit PointChain(Points points, double tol_edge = GeometryTolerances{}.tol_edge);

  Index size() const { return points_.cols(); }
  const Points& points() const { return points_; }
  auto point(Index i) const { return points_.col(wrap(i, size())); }

  /// |A_i A_{i+1}|
  double edge_length(Index i) const;
  double distance(Index i, Index j) const;

 private:
  Points points_;
};

/// Exterior-angle description of a (possibly degenerate) convex equilateral
/// polygon.  turning_angles[i] is the exterior angle at vertex A_{i+2} in
/// 1-based labels, i.e. edge i+1 has heading turning_angles[0] + ... +
/// turning_angles[i] and edge 0 points along +x.
struct ConvexEquilateralPolygon {
  Eigen::VectorXd turning_angles;

  Index size() const { return turning_angles.size(); }
};

/// (sum(theta) - 2 pi, sum cos(phi_i), sum sin(phi_i)) with phi_0 = 0.
Eigen::Vector3d closure_residual(const Eigen::VectorXd& theta);

/// Jacobian of closure_residual with respect to theta (3 x n).
Eigen::Matrix3Xd closure_jacobian(const Eigen::VectorXd& theta);

/// Newton projection of theta onto {closure_residual = 0} with theta kept in
/// [0, pi].  Coordinates that hit a bound are frozen for the remaining
/// iterations.  Returns nullopt when the residual is still above `tol`.
std::optional<Eigen::VectorXd> project_to_closure(Eigen::VectorXd theta, double tol = 1e-9,
                                                  int max_iters = 50);

/// Points of the open unit-step walk for theta; no closure check.
Points unit_step_walk(const Eigen::VectorXd& theta);

ConvexEquilateralPolygon regular_ngon(Index n);

/// Degenerate polygon folded onto a segment of length n/2, visited as
/// 0, 1, ..., m, m-1, ..., 1.  Requires n even and n >= 4.
ConvexEquilateralPolygon double_straight_arc(Index n);

/// Embeds the polygon in z = 0 with A_1 at the origin and the first edge on +x.
/// Throws InvalidPolygon if an angle is outside [0, pi] or closure fails.
PointChain angles_to_points(const ConvexEquilateralPolygon& poly,
                            const GeometryTolerances& tol = {});

struct PlaneFit {
  Point3 centroid = Point3::Zero();
  Point3 normal = Point3::UnitZ();
  Point3 major = Point3::UnitX();  // largest principal direction
  double max_deviation = 0.0;
};

/// Least-squares plane through the centroid (smallest principal direction).
PlaneFit fit_plane(const Points& points);

struct PlanarityReport {
  bool planar = true;
  double deviation = 0.0;
};

PlanarityReport is_planar(const PointChain& chain, double tol = GeometryTolerances{}.tol_planar);

/// Exterior angles of the chain after projecting onto its best-fit plane and
/// orienting it counterclockwise.  Reversals (angle within 1e-9 of +-pi) are
/// reported as +pi; zero-length edges contribute 0.
Eigen::VectorXd turning_angles_of(const PointChain& chain);

struct ConvexityReport {
  bool ok = false;
  bool planar = false;
  bool degenerate = false;  // collinear double-arc traversal
  double planar_deviation = 0.0;
  double max_edge_gap = 0.0;  // max | |A_i A_{i+1}| - 1 |
  double min_turning = 0.0;
  double turning_sum = 0.0;
};

ConvexityReport is_convex_equilateral(const PointChain& chain, const GeometryTolerances& tol = {});

/// Reflects the open arc A_{i+1}..A_{j-1} (cyclic, forward from i) across the
/// plane through A_i and A_j perpendicular to the chain's best-fit plane.
PointChain reflect_subchain(const PointChain& chain, Index i, Index j);

/// Same move with the best-fit plane normal supplied explicitly.
PointChain reflect_subchain(const PointChain& chain, Index i, Index j, const Point3& fit_normal);

/// Rigidly rotates the arc A_{edge+1}..A_{pivot-1} about A_pivot (axis: best-fit
/// plane normal).  Positive delta opens the angle A_{pivot-1} A_pivot A_{pivot+1}.
/// Returns nullopt when the angle would reach pi or when the loose edge
/// (A_edge, A_{edge+1}) would exceed 1 + tol_edge.
std::optional<PointChain> hinge_rotate(const PointChain& chain, Index pivot, Index edge,
                                       double delta, double tol_edge = GeometryTolerances{}.tol_edge);

/// Unsigned angle A_{pivot-1} A_pivot A_{pivot+1}.
double interior_angle(const PointChain& chain, Index pivot);

/// max_i |theta_i - 2 pi / n|
double distance_to_regular(const Eigen::VectorXd& theta);

/// Sup distance to the (pi at two antipodal vertices, 0 elsewhere) pattern,
/// minimized over cyclic alignments.  +inf for odd n.
double distance_to_double_arc(const Eigen::VectorXd& theta);

}  // namespace ngon
