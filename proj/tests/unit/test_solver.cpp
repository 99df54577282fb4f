#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "anisolve/diagnostics.hpp"
#include "anisolve/error.hpp"
#include "anisolve/solver.hpp"
#include "psor.hpp"

using namespace anisolve;

namespace {

Problem make(const Grid& g, MonotoneGraph beta, const std::function<double(std::array<double, 2>)>& f,
             std::vector<Atom> atoms = {}) {
  NodalArray density(g.size(), 0.0);
  for (std::size_t n = 0; n < g.size(); ++n) density[n] = f(g.position(n));
  return Problem{g, LerayLionsField::model(g), std::move(beta), MeasureData(g, density, FluxField::zero(g), atoms)};
}

double max_error(const Grid& g, const GridFunction& u, const std::function<double(std::array<double, 2>)>& exact) {
  double err = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n) err = std::max(err, std::abs(u[n] - exact(g.position(n))));
  return err;
}

double sine_exact(std::array<double, 2> x) { return std::sin(std::numbers::pi * x[0]); }
double sine_load(std::array<double, 2> x) {
  return (std::numbers::pi * std::numbers::pi + 1) * std::sin(std::numbers::pi * x[0]);
}

}  // namespace

TEST(EpsilonSchedule, GeometricAndValidated) {
  EpsilonSchedule s;
  EXPECT_DOUBLE_EQ(s.eps(0), 1.0);
  EXPECT_DOUBLE_EQ(s.eps(3), 0.125);
  EXPECT_NO_THROW(s.validate());
  for (auto bad : {EpsilonSchedule{0.0}, EpsilonSchedule{1.0, 1.0}, EpsilonSchedule{1.0, 0.5, 0},
                   EpsilonSchedule{1.0, 0.5, 3, 0.0}})
    EXPECT_THROW(bad.validate(), InvalidInput);
}

TEST(Scheme, ZeroDataGivesZeroTriple) {
  const Grid g({17, 9}, {1, 1}, {2.5, 1.6});
  const Problem pb{g, LerayLionsField::model(g), MonotoneGraph::indicator(-1, 1), MeasureData::zero(g)};
  const auto b = run_scheme(pb, {});
  EXPECT_TRUE(b.converged);
  EXPECT_EQ(b.u.max_abs(), 0.0);
  for (double v : b.w) EXPECT_EQ(v, 0.0);
  for (double v : b.nu) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(b.trace.size(), 1u);
}

TEST(Scheme, ManufacturedSolutionConvergesAtSecondOrder) {
  std::vector<double> errors;
  for (int n : {33, 65, 129}) {
    const Grid g({n}, {1}, {2});
    const auto b = run_scheme(make(g, MonotoneGraph::identity(), sine_load), {});
    errors.push_back(max_error(g, b.u, sine_exact));
    for (double v : b.nu) EXPECT_EQ(v, 0.0);
  }
  for (std::size_t i = 1; i < errors.size(); ++i) EXPECT_GE(std::log2(errors[i - 1] / errors[i]), 1.9);
  EXPECT_LT(errors.back(), 1e-4);
}

TEST(Scheme, DiracDatumReproducesGreenFunction) {
  const Grid g({129}, {1}, {2});
  const double half[1] = {0.5};
  const auto pb = make(g, MonotoneGraph::zero(), [](auto) { return 0.0; }, {{g.nearest_node(half), 1.0}});
  const auto b = run_scheme(pb, {});
  EXPECT_LT(max_error(g, b.u, [](auto x) { return std::min(x[0], 1 - x[0]) / 2; }), 2 * g.spacing(0));
}

TEST(Scheme, ObstacleMatchesProjectedSor1D) {
  const Grid g({129}, {1}, {2});
  const auto b = run_scheme(make(g, MonotoneGraph::indicator(-1, 1), [](auto) { return 10.0; }), {});
  const auto ref = oracle::psor_obstacle({{129}, {g.spacing(0)}}, std::vector<double>(129, 10.0), -1, 1);
  double diff = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n) diff = std::max(diff, std::abs(b.u[n] - ref[n]));
  EXPECT_LE(diff, 1e-6);
  const auto inv = bundle_invariants(b, b.contact_tolerance);
  EXPECT_LE(inv.complementarity_defect, 1e-8);
  EXPECT_LE(inv.confinement_violation, 1e-6);
  EXPECT_EQ(inv.nu_off_contact, 0.0);
  double mass = 0.0;
  for (double v : b.nu) {
    EXPECT_GE(v, 0.0);
    mass += v;
  }
  EXPECT_GT(mass, 0.0);
}

TEST(Scheme, ObstacleMatchesProjectedSor2D) {
  const Grid g({33, 33}, {2, 2}, {2, 2});
  const auto b = run_scheme(make(g, MonotoneGraph::indicator(-1, 1), [](auto) { return 10.0; }), {});
  const auto ref = oracle::psor_obstacle({{33, 33}, {g.spacing(0), g.spacing(1)}},
                                         std::vector<double>(g.size(), 10.0), -1, 1);
  double diff = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n) diff = std::max(diff, std::abs(b.u[n] - ref[n]));
  EXPECT_LE(diff, 1e-6);
  for (double v : b.nu) EXPECT_GE(v, 0.0);
}

TEST(RegularizedSolve, EnergyHistoryIsNonincreasing) {
  for (auto p : {std::vector<double>{3.0}, std::vector<double>{1.5, 2.5}}) {
    const Grid g = p.size() == 1 ? Grid({65}, {1}, p) : Grid({17, 17}, {1, 1}, p);
    const auto pb = make(g, MonotoneGraph::power(3.0), [](auto x) { return 20 * std::sin(7 * x[0]) + 5; });
    for (double eps : {1.0, 1e-3}) {
      const auto mu = regularize(pb.mu, eps);
      const auto s = solve_regularized(pb, mu, eps, std::nullopt);
      EXPECT_LE(s.residual, s.tolerance);
      for (std::size_t i = 1; i < s.energy_history.size(); ++i)
        EXPECT_LE(s.energy_history[i], s.energy_history[i - 1] + 1e-12 * (1 + std::abs(s.energy_history[i - 1])));
      EXPECT_NEAR(s.energy, regularized_energy(pb, mu, eps, s.u.values()), 1e-12 * (1 + std::abs(s.energy)));
    }
  }
}

TEST(RegularizedSolve, ReportsNonConvergence) {
  const Grid g({65}, {1}, {3});
  const auto pb = make(g, MonotoneGraph::identity(), [](auto) { return 50.0; });
  SolverOptions o;
  o.max_iter = 1;
  EXPECT_THROW(solve_regularized(pb, regularize(pb.mu, 1.0), 1.0, std::nullopt, o), NonConvergence);
}

TEST(Scheme, ReportsStalledSchedule) {
  const Grid g({33}, {1}, {2});
  const auto pb = make(g, MonotoneGraph::indicator(-1, 1), [](auto) { return 10.0; });
  EpsilonSchedule s;
  s.count = 1;
  EXPECT_THROW(run_scheme(pb, s), SchemeStalled);
}

TEST(Estimates, TruncationEnergyBoundedByVariation) {
  const Grid g({65, 33}, {1, 1}, {2.5, 1.7});
  const auto pb = make(g, MonotoneGraph::indicator(-0.2, 0.3), [](auto x) { return 8 * std::cos(5 * x[0] * x[1]); });
  const auto b = run_scheme(pb, {});
  const double var = variation(g, pb.mu);
  for (double k : {0.01, 0.05, 0.1, 0.3, 1.0}) EXPECT_LE(estimate_truncation_energy(b, k), k * var);
  const int top = static_cast<int>(std::ceil(b.u.max_abs()));
  for (int n = top; n < top + 3; ++n) EXPECT_EQ(tail_energy(b, n), 0.0);
  EXPECT_GT(tail_energy(b, 0), 0.0);
}

TEST(Scheme, LimitIsIndependentOfStart) {
  const Grid g({33}, {1}, {2});
  const auto obstacle = make(g, MonotoneGraph::indicator(-1, 1), [](auto) { return 10.0; });
  const auto r1 = solve_twice_uniqueness(obstacle, {}, 7, {}, 2);
  EXPECT_LE(r1.u_difference, 1e-8);
  EXPECT_LE(r1.w_difference, 1e-8);
  EXPECT_LE(r1.nu_difference, 1e-8);

  const Grid g2({17, 17}, {1, 1}, {1.5, 3.0});
  const auto smooth = make(g2, MonotoneGraph::identity(), [](auto x) { return 4 * std::sin(3 * x[0]) * x[1]; });
  const auto r2 = solve_twice_uniqueness(smooth, {}, 11);
  EXPECT_LE(r2.u_difference, 1e-8);
}
