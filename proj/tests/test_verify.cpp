#include "doctest.h"

#include "ngon/energy.hpp"
#include "ngon/geometry.hpp"
#include "ngon/verify.hpp"

#include <cmath>

using namespace ngon;

TEST_CASE("n = 4 classification") {
  CHECK(classify_n4(1.0) == N4Class::Square);
  CHECK(classify_n4(3.0) == N4Class::DoubleArc);
  CHECK(classify_n4(2.0) == N4Class::Tie);
  CHECK(classify_n4(-1.0) == N4Class::Square);
  CHECK(classify_n4(0.0) == N4Class::Square);
  for (int i = -40; i < 40; ++i) CHECK(classify_n4(i / 20.0) == N4Class::Square);
  for (int i = 41; i <= 160; ++i) CHECK(classify_n4(i / 20.0) == N4Class::DoubleArc);
  CHECK(to_string(N4Class::Tie) == "Tie");
}

TEST_CASE("rhombus energy is symmetric under phi -> pi - phi") {
  for (double a : {-1.0, 0.0, 1.0, 2.5}) {
    for (double phi = 0.01; phi < kPi; phi += 0.07) {
      CHECK(n4_diagonal_energy(phi, a) == doctest::Approx(n4_diagonal_energy(kPi - phi, a)));
    }
  }
}

TEST_CASE("n = 4 threshold") {
  CHECK(find_threshold_n4() == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(std::abs(find_threshold_n4() - 2.0) <= 1e-6);
  // Independent of the bracket.
  for (double lo : {1.1, 1.5, 1.9}) {
    for (double hi : {2.1, 2.5, 2.9}) CHECK(std::abs(find_threshold_n4(lo, hi) - 2.0) <= 1e-6);
  }
  // Closed-form signs: square minus arc = 2 * 2^(a/2) - 2^a.
  for (double a : {1.9, 2.1}) {
    const double oracle = 2 * std::pow(2.0, a / 2) - std::pow(2.0, a);
    CHECK(n4_square_minus_arc(a) == doctest::Approx(oracle));
  }
  CHECK(n4_square_minus_arc(1.9) > 0);
  CHECK(n4_square_minus_arc(2.1) < 0);
  CHECK_THROWS_AS(find_threshold_n4(3, 1), std::invalid_argument);
}

TEST_CASE("n = 4 report") {
  const N4Report r = check_n4();
  CHECK(r.passed);
  CHECK(r.rhombi == 10000);
  CHECK(r.max_constant_deviation <= 1e-9);
  CHECK(r.classes.size() == 7);
}

TEST_CASE("regular optimality") {
  OptimizationConfig cfg;
  cfg.seed = 5;
  for (auto [n, a] : {std::pair<Index, double>{5, 2.0}, {8, 0.0}, {6, -1.0}}) {
    const RegularOptimalityReport r = verify_regular_optimality(n, a, cfg);
    CHECK(r.passed);
    CHECK(r.message == "ok");
    CHECK(r.best_energy <= r.reference + 1e-6);
    CHECK(r.best_energy >= r.reference - 1e-3);
    CHECK(r.diagnostics.distance_to_regular <= 1e-3);
  }
  CHECK_THROWS_AS(verify_regular_optimality(4, 1.0, cfg), std::invalid_argument);
  CHECK_THROWS_AS(verify_regular_optimality(6, 2.5, cfg), std::invalid_argument);

  // A starved search is reported, not thrown.
  OptimizationConfig starved;
  starved.restarts = 1;
  starved.max_iters = 1;
  starved.seed = 2;
  const RegularOptimalityReport weak = verify_regular_optimality(9, 1.0, starved);
  CHECK_FALSE(weak.message.empty());
  CHECK(weak.passed == (weak.message == "ok"));
}

TEST_CASE("chord bound sweep") {
  const LukoReport r = check_luko_bounds({7}, {1.0}, 1000, 3);
  CHECK(r.passed);
  CHECK(r.violations == 0);
  CHECK(r.max_violation <= 1e-9);
  CHECK(r.polygons == 1001);
  // Only the regular heptagon attains the k = 2, 3 bounds.
  CHECK(r.near_equality.size() == 2);
  for (const auto& c : r.near_equality) {
    CHECK(c.sample == -1);
    CHECK(std::abs(c.value - c.bound) <= 1e-9);
  }
  CHECK_THROWS_AS(check_luko_bounds({6}, {3.0}, 1, 0), std::invalid_argument);

  // Regular polygons meet every bound.
  for (Index n = 4; n <= 12; ++n) {
    const PointChain c = angles_to_points(regular_ngon(n));
    for (double a : {-1.0, 0.0, 1.0, 2.0}) {
      for (Index k = 1; k <= n / 2; ++k) {
        CHECK(std::abs(k_step_energy(c, k, EnergyFamily::power(a)) - luko_kstep_bound(n, k, a)) <=
              1e-9);
      }
    }
  }
}

TEST_CASE("identities") {
  const IdentityReport in = check_inertia_identity(2000, 1);
  CHECK(in.passed);
  CHECK(in.samples == 2002);
  CHECK(in.max_residual <= 1e-9);
  const IdentityReport de = check_decomposition_identity(2000, 1);
  CHECK(de.passed);
  CHECK(de.max_residual <= 1e-9);
}

TEST_CASE("diameter limit") {
  const PointChain sq = angles_to_points(regular_ngon(4));
  const PointChain arc = angles_to_points(double_straight_arc(6));
  CHECK(diameter(sq) == doctest::Approx(std::sqrt(2.0)));
  CHECK(diameter(arc) == 3.0);
  const DiameterLimit a = check_diameter_limit(sq, 200);
  CHECK(a.relative_error <= 0.05);
  const DiameterLimit b = check_diameter_limit(arc, 200);
  CHECK(b.relative_error <= 0.05);
  // The error shrinks with alpha.
  CHECK(check_diameter_limit(sq, 400).relative_error < a.relative_error);
  CHECK_THROWS_AS(check_diameter_limit(sq, 0.0), std::invalid_argument);
}

TEST_CASE("winner rule") {
  const double t = kOptimizerTieTol;
  CHECK(classify_winner(10.0, 10.0, 8.0, t, true, false) == Winner::Regular);
  CHECK(classify_winner(12.0, 10.0, 12.0, t, false, true) == Winner::DoubleArc);
  CHECK(classify_winner(10.0, 10.0, 10.001, t, true, false) == Winner::Tie);
  CHECK(classify_winner(13.0, 10.0, 12.0, t, false, false) == Winner::Other);
  // Energy alone is not enough: the shape has to match as well.
  CHECK(classify_winner(10.0, 10.0, 8.0, t, false, false) == Winner::Other);
  CHECK(classify_winner(10.0, 10.0, kNegInf, t, true, false) == Winner::Regular);
}

TEST_CASE("alpha grid and monotone sequences") {
  const auto g = alpha_grid(1.0, 3.0, 21);
  REQUIRE(g.size() == 21);
  CHECK(g.front() == 1.0);
  CHECK(g.back() == 3.0);
  CHECK(g[10] == doctest::Approx(2.0));
  CHECK(alpha_grid(1.0, 2.0, 2).size() == 2);
  CHECK_THROWS_AS(alpha_grid(2.0, 1.0, 5), std::invalid_argument);
  CHECK_THROWS_AS(alpha_grid(1.0, 2.0, 1), std::invalid_argument);

  SweepReport r;
  auto row = [](double a, Winner w) {
    SweepRow x;
    x.alpha = a;
    x.winner = w;
    return x;
  };
  r.rows = {row(1, Winner::Regular), row(2, Winner::Other), row(3, Winner::DoubleArc)};
  CHECK(winners_monotone(r));
  r.rows.push_back(row(4, Winner::Regular));
  CHECK_FALSE(winners_monotone(r));
}

TEST_CASE("closed-form sweep for n = 4") {
  const SweepReport r = sweep_n4(alpha_grid(1.0, 3.0, 21));
  REQUIRE(r.rows.size() == 21);
  CHECK(r.tie_tol == kAnalyticTieTol);
  CHECK(winners_monotone(r));
  REQUIRE(r.bracket);
  CHECK(r.bracket->first == doctest::Approx(2.0));
  CHECK(r.bracket->second == doctest::Approx(2.1));
  for (const auto& row : r.rows) {
    if (row.alpha < 2.0 - 1e-3) CHECK(row.winner == Winner::Regular);
    if (row.alpha > 2.0 + 1e-3) CHECK(row.winner == Winner::DoubleArc);
    CHECK(row.energy_best == std::max(row.energy_regular, row.energy_double_arc));
  }
  CHECK(r.rows[10].winner == Winner::Tie);
}

TEST_CASE("optimizer sweep for n = 4 reduces to the closed form") {
  OptimizationConfig cfg;
  cfg.restarts = 4;
  cfg.seed = 8;
  const SweepReport r = find_threshold_n(4, alpha_grid(1.5, 2.5, 5), cfg);
  REQUIRE(r.bracket);
  CHECK(r.bracket->first <= 2.0);
  CHECK(r.bracket->second > 2.0);
  CHECK(r.bracket->second - r.bracket->first <= 0.25 + 1e-12);
  CHECK(winners_monotone(r));
  CHECK(r.method_notes.find("exploratory") != std::string::npos);
  for (const auto& row : r.rows) {
    CHECK(row.restarts == 4);
    CHECK(row.gap >= -1e-3 * (1 + std::abs(row.energy_best)));
  }
  CHECK_THROWS_AS(find_threshold_n(5, {1.0}, cfg), std::invalid_argument);
}

TEST_CASE("large alpha maximizer stretches toward the diameter") {
  OptimizationConfig cfg;
  cfg.restarts = 4;
  cfg.seed = 2;
  const OptimizationResult r = multi_start(6, EnergyFamily::power(50), cfg);
  CHECK(diameter(r.best_chain) >= 2.9);
  CHECK(r.diagnostics.distance_to_double_arc <= 1e-3);
}
