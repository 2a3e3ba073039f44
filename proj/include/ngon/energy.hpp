#pragma once

// Pairwise energies E^f_n(G) = sum_{p<q} f(|A_p A_q|) and their closed forms.

#include "ngon/geometry.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace ngon {

/// Pair distances below this count as collisions for singular families.
inline constexpr double kCollisionDistance = 1e-12;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Power law f_alpha: x^a (a > 0), ln x (a = 0), -x^a (a < 0).
template <typename Scalar>
Scalar power_law(Scalar x, Scalar alpha) {
  using std::log;
  using std::pow;
  if (alpha > Scalar(0)) return pow(x, alpha);
  if (x < Scalar(kCollisionDistance)) return Scalar(kNegInf);
  if (alpha == Scalar(0)) return log(x);
  return -pow(x, alpha);
}

/// g_alpha(s) = f_alpha(sqrt(s)), evaluated without the square root.
template <typename Scalar>
Scalar power_law_squared(Scalar s, Scalar alpha) {
  using std::log;
  using std::pow;
  if (alpha > Scalar(0)) return pow(s, alpha / Scalar(2));
  if (s < Scalar(kCollisionDistance * kCollisionDistance)) return Scalar(kNegInf);
  if (alpha == Scalar(0)) return Scalar(0.5) * log(s);
  return -pow(s, alpha / Scalar(2));
}

/// An increasing continuous pair function on (0, inf).  Either the power law
/// family or a user-supplied function.
class EnergyFamily {
 public:
  static EnergyFamily power(double alpha);
  /// `singular` marks f(x) -> -inf as x -> 0; collisions then evaluate to -inf.
  static EnergyFamily custom(std::function<double(double)> f, std::string name,
                             bool singular = false);

  bool is_power_law() const { return !custom_; }
  double alpha() const { return alpha_; }
  const std::string& name() const { return name_; }
  bool singular_at_zero() const;

  /// f(x).  Throws std::invalid_argument for x < 0.
  double operator()(double x) const;
  /// f(sqrt(s)) for a squared distance s >= 0.
  double from_squared(double s) const;

 private:
  double alpha_ = 1.0;
  bool singular_ = false;
  std::function<double(double)> custom_;
  std::string name_;
};

double f_eval(const EnergyFamily& fam, double x);
double g_eval(const EnergyFamily& fam, double s);

/// Sum over all unordered pairs; -inf if a singular family sees a collision.
double total_energy(const PointChain& chain, const EnergyFamily& fam);
double total_energy(const Points& points, const EnergyFamily& fam);

/// sum_i f(|A_i A_{i+k}|) for 1 <= k <= floor(n/2).  For even n and k = n/2
/// every diameter chord is visited from both ends.
double k_step_energy(const PointChain& chain, Index k, const EnergyFamily& fam);

/// 1/2 for the diameter step of an even polygon, 1 otherwise.
double step_weight(Index n, Index k);

struct StepTerm {
  Index k = 0;
  double mu = 1.0;
  double value = 0.0;
};

struct EnergyBreakdown {
  double total = 0.0;
  std::vector<StepTerm> per_step;
};

EnergyBreakdown decompose(const PointChain& chain, const EnergyFamily& fam);

/// sin(k pi / n) / sin(pi / n): the k-step chord of the unit regular n-gon.
double chord_ratio(Index n, Index k);

/// Energy of the unit regular n-gon from its chord lengths.
double regular_max_energy(Index n, double alpha);

/// n * g_alpha(chord_ratio(n, k)^2).  Only defined for alpha <= 2.
double luko_kstep_bound(Index n, Index k, double alpha);

/// f(2 cos(phi/2)) + f(2 sin(phi/2)): the two diagonals of the unit rhombus
/// with interior angle phi.  Endpoints give the degenerate limits.
double n4_diagonal_energy(double phi, double alpha);

/// n * sum_i |A_i - c|^2 with c the vertex centroid.
double centroid_inertia(const PointChain& chain);

}  // namespace ngon
