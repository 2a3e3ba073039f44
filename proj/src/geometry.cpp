#include "ngon/geometry.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <limits>

namespace ngon {

namespace {

constexpr double kFoldTol = 1e-9;

void require(bool cond, const char* what) {
  if (!cond) throw std::invalid_argument(what);
}

Eigen::VectorXd headings(const Eigen::VectorXd& theta) {
  const Index n = theta.size();
  Eigen::VectorXd phi(n);
  double acc = 0.0;
  for (Index i = 0; i < n; ++i) {
    phi[i] = acc;
    acc += theta[i];
  }
  return phi;
}

}  // namespace

void GeometryTolerances::validate() const {
  require(tol_edge > 0 && tol_angle > 0 && tol_closure > 0 && tol_planar > 0 && tol_convex > 0,
          "geometry tolerances must be strictly positive");
}

PointChain::PointChain(Points points, double tol_edge) : points_(std::move(points)) {
  require(points_.cols() >= 3, "a chain needs at least 3 points");
  require(points_.allFinite(), "chain coordinates must be finite");
  for (Index i = 0; i < size(); ++i) {
    if (edge_length(i) > 1.0 + tol_edge) {
      throw std::invalid_argument("chain edge " + std::to_string(i) + " has length " +
                                  std::to_string(edge_length(i)) + " > 1");
    }
  }
}

double PointChain::edge_length(Index i) const { return (point(i + 1) - point(i)).norm(); }

double PointChain::distance(Index i, Index j) const { return (point(j) - point(i)).norm(); }

Eigen::Vector3d closure_residual(const Eigen::VectorXd& theta) {
  const Eigen::VectorXd phi = headings(theta);
  return {theta.sum() - kTwoPi, phi.array().cos().sum(), phi.array().sin().sum()};
}

Eigen::Matrix3Xd closure_jacobian(const Eigen::VectorXd& theta) {
  const Index n = theta.size();
  const Eigen::VectorXd phi = headings(theta);
  Eigen::Matrix3Xd jac(3, n);
  // d phi_i / d theta_l = 1 for i > l, so accumulate suffix sums.
  double sin_tail = 0.0;
  double cos_tail = 0.0;
  for (Index l = n - 1; l >= 0; --l) {
    jac(0, l) = 1.0;
    jac(1, l) = -sin_tail;
    jac(2, l) = cos_tail;
    sin_tail += std::sin(phi[l]);
    cos_tail += std::cos(phi[l]);
  }
  return jac;
}

std::optional<Eigen::VectorXd> project_to_closure(Eigen::VectorXd theta, double tol,
                                                  int max_iters) {
  const Index n = theta.size();
  if (n < 3) return std::nullopt;
  theta = theta.cwiseMax(0.0).cwiseMin(kPi);
  std::vector<bool> frozen(static_cast<std::size_t>(n), false);

  for (int iter = 0; iter <= max_iters; ++iter) {
    const Eigen::Vector3d r = closure_residual(theta);
    if (r.norm() <= tol) return theta;
    if (iter == max_iters) break;

    Eigen::Matrix3Xd jac = closure_jacobian(theta);
    for (Index l = 0; l < n; ++l) {
      if (frozen[static_cast<std::size_t>(l)]) jac.col(l).setZero();
    }
    // Minimum-norm Newton step: delta = J^T (J J^T)^+ (-r).
    const Eigen::Matrix3d gram = jac * jac.transpose();
    const Eigen::Vector3d y = gram.completeOrthogonalDecomposition().solve(-r);
    const Eigen::VectorXd delta = jac.transpose() * y;
    if (!delta.allFinite()) return std::nullopt;
    theta += delta;

    for (Index l = 0; l < n; ++l) {
      if (theta[l] < 0.0) {
        theta[l] = 0.0;
        frozen[static_cast<std::size_t>(l)] = true;
      } else if (theta[l] > kPi) {
        theta[l] = kPi;
        frozen[static_cast<std::size_t>(l)] = true;
      }
    }
  }
  return std::nullopt;
}

Points unit_step_walk(const Eigen::VectorXd& theta) {
  const Index n = theta.size();
  const Eigen::VectorXd phi = headings(theta);
  Points pts = Points::Zero(3, n);
  for (Index i = 1; i < n; ++i) {
    pts(0, i) = pts(0, i - 1) + std::cos(phi[i - 1]);
    pts(1, i) = pts(1, i - 1) + std::sin(phi[i - 1]);
  }
  return pts;
}

ConvexEquilateralPolygon regular_ngon(Index n) {
  require(n >= 3, "regular_ngon requires n >= 3");
  return {Eigen::VectorXd::Constant(n, kTwoPi / static_cast<double>(n))};
}

ConvexEquilateralPolygon double_straight_arc(Index n) {
  require(n >= 4 && n % 2 == 0, "double_straight_arc requires an even n >= 4");
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(n);
  theta[n / 2 - 1] = kPi;
  theta[n - 1] = kPi;
  return {theta};
}

PointChain angles_to_points(const ConvexEquilateralPolygon& poly, const GeometryTolerances& tol) {
  const Eigen::VectorXd& theta = poly.turning_angles;
  if (theta.size() < 3) throw InvalidPolygon("polygon needs at least 3 turning angles");
  if (!theta.allFinite() || theta.minCoeff() < -tol.tol_angle ||
      theta.maxCoeff() > kPi + tol.tol_angle) {
    throw InvalidPolygon("turning angles must lie in [0, pi]");
  }
  const Eigen::Vector3d r = closure_residual(theta);
  if (std::abs(r[0]) > tol.tol_angle * static_cast<double>(theta.size()) ||
      r.tail<2>().norm() > tol.tol_closure) {
    throw InvalidPolygon("polygon does not close (residual " + std::to_string(r.norm()) + ")");
  }
  // Degenerate arcs land on integer lattice points; snap the rounding noise.
  Points pts = unit_step_walk(theta);
  if (theta.cwiseMin((kPi - theta.array()).matrix()).maxCoeff() <= tol.tol_angle) pts = pts.array().round().matrix();
  return PointChain(std::move(pts), tol.tol_edge);
}

PlaneFit fit_plane(const Points& points) {
  PlaneFit fit;
  if (points.cols() == 0) return fit;
  fit.centroid = points.rowwise().mean();
  const Points centered = points.colwise() - fit.centroid;
  const Eigen::Matrix3d scatter = centered * centered.transpose();
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(scatter);
  fit.normal = eig.eigenvectors().col(0).normalized();
  fit.major = eig.eigenvectors().col(2).normalized();
  fit.max_deviation = (fit.normal.transpose() * centered).cwiseAbs().maxCoeff();
  return fit;
}

PlanarityReport is_planar(const PointChain& chain, double tol) {
  const PlaneFit fit = fit_plane(chain.points());
  return {fit.max_deviation <= tol, fit.max_deviation};
}

Eigen::VectorXd turning_angles_of(const PointChain& chain) {
  const Index n = chain.size();
  const PlaneFit fit = fit_plane(chain.points());
  const Point3 u = fit.major;
  const Point3 v = fit.normal.cross(u);
  Eigen::Matrix2Xd flat(2, n);
  for (Index i = 0; i < n; ++i) {
    const Point3 p = chain.point(i) - fit.centroid;
    flat.col(i) << p.dot(u), p.dot(v);
  }

  double area2 = 0.0;
  for (Index i = 0; i < n; ++i) {
    const Index j = wrap(i + 1, n);
    area2 += flat(0, i) * flat(1, j) - flat(0, j) * flat(1, i);
  }
  const double orientation = area2 < 0.0 ? -1.0 : 1.0;

  Eigen::VectorXd theta(n);
  for (Index i = 0; i < n; ++i) {
    const Eigen::Vector2d in = flat.col(wrap(i + 1, n)) - flat.col(i);
    const Eigen::Vector2d out = flat.col(wrap(i + 2, n)) - flat.col(wrap(i + 1, n));
    if (in.norm() == 0.0 || out.norm() == 0.0) {
      theta[i] = 0.0;
      continue;
    }
    const double cross = in.x() * out.y() - in.y() * out.x();
    const double angle = std::atan2(cross, in.dot(out));
    theta[i] = (kPi - std::abs(angle) <= kFoldTol) ? kPi : orientation * angle;
  }
  return theta;
}

ConvexityReport is_convex_equilateral(const PointChain& chain, const GeometryTolerances& tol) {
  ConvexityReport rep;
  const Index n = chain.size();
  const PlanarityReport planar = is_planar(chain, tol.tol_planar);
  rep.planar = planar.planar;
  rep.planar_deviation = planar.deviation;

  for (Index i = 0; i < n; ++i) {
    rep.max_edge_gap = std::max(rep.max_edge_gap, std::abs(chain.edge_length(i) - 1.0));
  }

  const Eigen::VectorXd theta = turning_angles_of(chain);
  rep.min_turning = theta.minCoeff();
  rep.turning_sum = theta.sum();
  const double sum_tol = static_cast<double>(n) * tol.tol_convex + tol.tol_angle;
  const Index folds = (theta.array() >= kPi - tol.tol_angle).count();
  rep.degenerate = folds == 2 && theta.cwiseAbs().sum() - 2.0 * kPi <= sum_tol;

  rep.ok = rep.planar && rep.max_edge_gap <= tol.tol_edge && rep.min_turning >= -tol.tol_convex &&
           std::abs(rep.turning_sum - kTwoPi) <= sum_tol;
  return rep;
}

PointChain reflect_subchain(const PointChain& chain, Index i, Index j) {
  return reflect_subchain(chain, i, j, fit_plane(chain.points()).normal);
}

PointChain reflect_subchain(const PointChain& chain, Index i, Index j, const Point3& fit_normal) {
  const Index n = chain.size();
  i = wrap(i, n);
  j = wrap(j, n);
  require(i != j, "reflect_subchain requires distinct endpoints");

  const Point3 anchor = chain.point(i);
  const Point3 mirror = (chain.point(j) - anchor).cross(fit_normal);
  const double len = mirror.norm();
  Points pts = chain.points();
  if (len < 1e-14) return chain;
  const Point3 m = mirror / len;
  for (Index k = wrap(i + 1, n); k != j; k = wrap(k + 1, n)) {
    const Point3 p = pts.col(k);
    pts.col(k) = p - 2.0 * (p - anchor).dot(m) * m;
  }
  return PointChain(std::move(pts), std::numeric_limits<double>::infinity());
}

double interior_angle(const PointChain& chain, Index pivot) {
  const Point3 a = chain.point(pivot - 1) - chain.point(pivot);
  const Point3 b = chain.point(pivot + 1) - chain.point(pivot);
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

std::optional<PointChain> hinge_rotate(const PointChain& chain, Index pivot, Index edge,
                                       double delta, double tol_edge) {
  const Index n = chain.size();
  pivot = wrap(pivot, n);
  edge = wrap(edge, n);
  require(pivot != edge && pivot != wrap(edge + 1, n),
          "hinge pivot must not be an endpoint of the loose edge");
  if (delta == 0.0) return chain;

  const Point3 axis = fit_plane(chain.points()).normal;
  const Point3 center = chain.point(pivot);
  const Point3 to_next = chain.point(pivot + 1) - center;
  const Point3 to_prev = chain.point(pivot - 1) - center;
  const double signed_angle = std::atan2(axis.dot(to_next.cross(to_prev)), to_next.dot(to_prev));
  if (std::abs(signed_angle) + delta >= kPi) return std::nullopt;

  const double turn = signed_angle >= 0.0 ? delta : -delta;
  const Eigen::Matrix3d rot = Eigen::AngleAxisd(turn, axis).toRotationMatrix();
  Points pts = chain.points();
  for (Index k = wrap(edge + 1, n); k != pivot; k = wrap(k + 1, n)) {
    pts.col(k) = center + rot * (pts.col(k) - center);
  }
  if ((pts.col(wrap(edge + 1, n)) - pts.col(edge)).norm() > 1.0 + tol_edge) return std::nullopt;
  return PointChain(std::move(pts), std::numeric_limits<double>::infinity());
}

double distance_to_regular(const Eigen::VectorXd& theta) {
  const double target = kTwoPi / static_cast<double>(theta.size());
  return (theta.array() - target).abs().maxCoeff();
}

double distance_to_double_arc(const Eigen::VectorXd& theta) {
  const Index n = theta.size();
  if (n % 2 != 0 || n < 4) return std::numeric_limits<double>::infinity();
  const Index m = n / 2;
  double best = std::numeric_limits<double>::infinity();
  for (Index shift = 0; shift < m; ++shift) {
    double worst = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double target = (wrap(i - shift, n) % m == 0) ? kPi : 0.0;
      worst = std::max(worst, std::abs(theta[i] - target));
    }
    best = std::min(best, worst);
  }
  return best;
}

}  // namespace ngon
