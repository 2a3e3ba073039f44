#include "ngon/energy.hpp"

#include <stdexcept>

namespace ngon {

EnergyFamily EnergyFamily::power(double alpha) {
  if (!std::isfinite(alpha)) throw std::invalid_argument("alpha must be finite");
  EnergyFamily fam;
  fam.alpha_ = alpha;
  fam.singular_ = alpha <= 0.0;
  fam.name_ = "power";
  return fam;
}

EnergyFamily EnergyFamily::custom(std::function<double(double)> f, std::string name,
                                  bool singular) {
  if (!f) throw std::invalid_argument("custom energy function is empty");
  EnergyFamily fam;
  fam.alpha_ = std::numeric_limits<double>::quiet_NaN();
  fam.singular_ = singular;
  fam.custom_ = std::move(f);
  fam.name_ = std::move(name);
  return fam;
}

bool EnergyFamily::singular_at_zero() const { return singular_; }

double EnergyFamily::operator()(double x) const {
  if (!(x >= 0.0)) throw std::invalid_argument("pair distance must be non-negative");
  if (custom_) {
    if (singular_ && x < kCollisionDistance) return kNegInf;
    return custom_(x);
  }
  return power_law(x, alpha_);
}

double EnergyFamily::from_squared(double s) const {
  if (!(s >= 0.0)) throw std::invalid_argument("squared distance must be non-negative");
  if (custom_) return (*this)(std::sqrt(s));
  return power_law_squared(s, alpha_);
}

double f_eval(const EnergyFamily& fam, double x) { return fam(x); }

double g_eval(const EnergyFamily& fam, double s) { return fam.from_squared(s); }

double total_energy(const Points& points, const EnergyFamily& fam) {
  const Index n = points.cols();
  double sum = 0.0;
  for (Index p = 0; p < n; ++p) {
    for (Index q = p + 1; q < n; ++q) {
      const double v = fam.from_squared((points.col(p) - points.col(q)).squaredNorm());
      if (v == kNegInf) return kNegInf;
      sum += v;
    }
  }
  return sum;
}

double total_energy(const PointChain& chain, const EnergyFamily& fam) {
  return total_energy(chain.points(), fam);
}

double k_step_energy(const PointChain& chain, Index k, const EnergyFamily& fam) {
  const Index n = chain.size();
  if (k < 1 || k > n / 2) throw std::invalid_argument("k_step_energy requires 1 <= k <= n/2");
  double sum = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double v = fam.from_squared((chain.point(i + k) - chain.point(i)).squaredNorm());
    if (v == kNegInf) return kNegInf;
    sum += v;
  }
  return sum;
}

double step_weight(Index n, Index k) { return (n % 2 == 0 && 2 * k == n) ? 0.5 : 1.0; }

EnergyBreakdown decompose(const PointChain& chain, const EnergyFamily& fam) {
  const Index n = chain.size();
  EnergyBreakdown out;
  for (Index k = 1; k <= n / 2; ++k) {
    const StepTerm term{k, step_weight(n, k), k_step_energy(chain, k, fam)};
    out.total += term.mu * term.value;
    out.per_step.push_back(term);
  }
  return out;
}

double chord_ratio(Index n, Index k) {
  const double dn = static_cast<double>(n);
  return std::sin(static_cast<double>(k) * kPi / dn) / std::sin(kPi / dn);
}

double regular_max_energy(Index n, double alpha) {
  if (n < 3) throw std::invalid_argument("regular_max_energy requires n >= 3");
  double sum = 0.0;
  for (Index k = 1; k <= n / 2; ++k) {
    const double r = chord_ratio(n, k);
    sum += step_weight(n, k) * static_cast<double>(n) * power_law_squared(r * r, alpha);
  }
  return sum;
}

double luko_kstep_bound(Index n, Index k, double alpha) {
  if (n < 4) throw std::invalid_argument("luko_kstep_bound requires n >= 4");
  if (k < 1 || k > n / 2) throw std::invalid_argument("luko_kstep_bound requires 1 <= k <= n/2");
  if (alpha > 2.0) throw std::domain_error("the k-step chord bound is only claimed for alpha <= 2");
  const double r = chord_ratio(n, k);
  return static_cast<double>(n) * power_law_squared(r * r, alpha);
}

double n4_diagonal_energy(double phi, double alpha) {
  if (!(phi >= 0.0 && phi <= kPi)) throw std::invalid_argument("rhombus angle must lie in [0, pi]");
  const double a = 2.0 * std::cos(0.5 * phi);
  const double b = 2.0 * std::sin(0.5 * phi);
  return power_law(std::max(a, 0.0), alpha) + power_law(std::max(b, 0.0), alpha);
}

double centroid_inertia(const PointChain& chain) {
  const Points& pts = chain.points();
  const Point3 c = pts.rowwise().mean();
  return static_cast<double>(pts.cols()) * (pts.colwise() - c).squaredNorm();
}

}  // namespace ngon
