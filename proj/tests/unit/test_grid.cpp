#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "anisolve/error.hpp"
#include "anisolve/grid.hpp"
#include "anisolve/random.hpp"

using namespace anisolve;

namespace {

std::vector<double> random_function(const Grid& g, Rng& rng, double amp = 1.0) {
  std::vector<double> u(g.size(), 0.0);
  for (std::size_t n : g.interior()) u[n] = rng.uniform(-amp, amp);
  return u;
}

}  // namespace

TEST(Grid, Construction) {
  const Grid g({5, 9}, {1.0, 2.0}, {2.0, 3.0});
  EXPECT_EQ(g.size(), 45u);
  EXPECT_DOUBLE_EQ(g.spacing(0), 0.25);
  EXPECT_DOUBLE_EQ(g.spacing(1), 0.25);
  EXPECT_DOUBLE_EQ(g.cell_volume(), 0.0625);
  EXPECT_EQ(g.interior().size(), 3u * 7u);
  EXPECT_NEAR(g.mean_exponent(), 2.0 / (0.5 + 1.0 / 3.0), 1e-15);
  EXPECT_EQ(g.min_exponent(), 2.0);
  const int c[2] = {2, 3};
  const std::size_t idx = g.index(c);
  EXPECT_EQ(g.coords(idx)[0], 2);
  EXPECT_EQ(g.coords(idx)[1], 3);
  EXPECT_DOUBLE_EQ(g.position(idx)[1], 0.75);
  const double x[2] = {0.49, 1.1};
  EXPECT_EQ(g.coords(g.nearest_node(x))[0], 2);
  EXPECT_EQ(g.coords(g.nearest_node(x))[1], 4);
}

TEST(Grid, RejectsInvalidShapes) {
  EXPECT_THROW(Grid({2}, {1.0}, {2.0}), InvalidInput);
  EXPECT_THROW(Grid({5}, {1.0}, {1.0}), InvalidInput);
  EXPECT_THROW(Grid({5}, {-1.0}, {2.0}), InvalidInput);
  EXPECT_THROW(Grid({5, 5, 5}, {1, 1, 1}, {2, 2, 2}), InvalidInput);
  EXPECT_THROW(Grid({5, 5}, {1.0}, {2.0, 2.0}), InvalidInput);
}

TEST(GridFunction, EnforcesDirichletTrace) {
  const Grid g({5}, {1.0}, {2.0});
  EXPECT_THROW(GridFunction(g, {1, 0, 0, 0, 0}), InvalidInput);
  EXPECT_THROW(GridFunction(g, {0, NAN, 0, 0, 0}), InvalidInput);
  EXPECT_THROW(GridFunction(g, {0, 0, 0}), InvalidInput);
  const auto u = GridFunction::interpolate(g, [](auto x) { return 1.0 + x[0]; });
  EXPECT_EQ(u[0], 0.0);
  EXPECT_EQ(u[4], 0.0);
  EXPECT_DOUBLE_EQ(u[2], 1.5);
}

TEST(Derivative, Examples) {
  const Grid g1({5}, {1.0}, {2.0});
  for (double d : derivative(g1, std::vector<double>(5, 0.0), 0)) EXPECT_EQ(d, 0.0);

  const auto u = GridFunction::interpolate(g1, [](auto x) { return x[0] * (1 - x[0]); });
  const auto d = derivative(g1, u.values(), 0);
  for (int j = 0; j < 4; ++j) {
    const double a = j * 0.25, b = a + 0.25;
    EXPECT_NEAR(d[j], (b * (1 - b) - a * (1 - a)) / 0.25, 1e-14);
  }

  const Grid g2({9, 9}, {1.0, 1.0}, {2.0, 2.0});
  const auto v = GridFunction::interpolate(g2, [](auto x) { return x[0] + 2 * x[1]; });
  const auto d0 = derivative(g2, v.values(), 0);
  const auto d1 = derivative(g2, v.values(), 1);
  for (std::size_t n = 0; n < g2.size(); ++n) {
    const auto c = g2.coords(n);
    if (c[0] >= 1 && c[0] + 2 < 9 && c[1] >= 1 && c[1] < 8) EXPECT_NEAR(d0[n], 1.0, 1e-12);
    if (c[1] >= 1 && c[1] + 2 < 9 && c[0] >= 1 && c[0] < 8) EXPECT_NEAR(d1[n], 2.0, 1e-12);
  }
}

TEST(Energy, Examples) {
  const Grid g({3}, {1.0}, {2.0});
  EXPECT_EQ(anisotropic_energy(g, std::vector<double>(3, 0.0)), 0.0);
  EXPECT_DOUBLE_EQ(anisotropic_energy(g, std::vector<double>{0, 1, 0}), 2.0);
}

TEST(Energy, Homogeneity) {
  Rng rng(1);
  const Grid g({17, 17}, {1, 1}, {3.0, 3.0});
  const auto u = random_function(g, rng);
  std::vector<double> cu = u;
  for (double& v : cu) v *= -2.5;
  EXPECT_NEAR(anisotropic_energy(g, cu), std::pow(2.5, 3.0) * anisotropic_energy(g, u),
              1e-12 * anisotropic_energy(g, cu));
  EXPECT_GT(anisotropic_energy(g, u), 0.0);
}

TEST(Operator, ZeroAndLaplacianConsistency) {
  const Grid g0({9}, {1.0}, {2.0});
  const auto m0 = LerayLionsField::model(g0);
  EXPECT_EQ(apply_operator(g0, m0, std::vector<double>(9, 0.0)).max_abs(), 0.0);

  double previous = 0.0;
  for (int n : {33, 65, 129}) {
    const Grid g({n}, {1.0}, {2.0});
    const auto u = GridFunction::interpolate(g, [](auto x) { return std::sin(std::numbers::pi * x[0]); });
    const auto au = apply_operator(g, LerayLionsField::model(g), u.values());
    double err = 0.0;
    for (std::size_t node : g.interior())
      err = std::max(err, std::abs(au[node] - std::numbers::pi * std::numbers::pi * u[node]));
    if (previous > 0.0) EXPECT_NEAR(std::log2(previous / err), 2.0, 0.1);
    previous = err;
  }
}

TEST(Operator, FivePointStencil) {
  const Grid g({5, 5}, {1, 1}, {2, 2});
  std::vector<double> u(g.size(), 0.0);
  const int c[2] = {2, 2};
  u[g.index(c)] = 1.0;
  const auto au = apply_operator(g, LerayLionsField::model(g), u);
  EXPECT_DOUBLE_EQ(au[g.index(c)], 4.0 / (0.25 * 0.25));
  const int nb[2] = {1, 2};
  EXPECT_DOUBLE_EQ(au[g.index(nb)], -1.0 / (0.25 * 0.25));
}

TEST(OperatorProperties, MonotonePairing) {
  Rng rng(2);
  const Grid g({21, 13}, {1, 1.5}, {1.5, 3.2});
  const auto a = LerayLionsField::weighted(g, {[](auto x) { return 1 + x[0]; }, [](auto x) { return 2 - x[1] / 2; }});
  for (int t = 0; t < 50; ++t) {
    const auto u = random_function(g, rng, 2.0);
    const auto v = random_function(g, rng, 2.0);
    const auto au = apply_operator(g, a, u);
    const auto av = apply_operator(g, a, v);
    double pair = 0.0;
    for (std::size_t n = 0; n < g.size(); ++n) pair += (au[n] - av[n]) * (u[n] - v[n]);
    EXPECT_GE(pair, 0.0);
  }
}

TEST(OperatorProperties, SummationByParts) {
  Rng rng(3);
  const Grid g({11, 8}, {1, 0.7}, {2, 2});
  for (int t = 0; t < 20; ++t) {
    FluxField G = FluxField::zero(g);
    for (int axis = 0; axis < 2; ++axis)
      for (std::size_t n = 0; n < g.size(); ++n)
        if (g.has_edge(n, axis)) G.components[axis][n] = rng.uniform(-1, 1);
    const auto v = random_function(g, rng);
    const auto div = negative_divergence(g, G);
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t n = 0; n < g.size(); ++n) lhs += div[n] * v[n];
    for (int axis = 0; axis < 2; ++axis) {
      const auto dv = derivative(g, v, axis);
      for (std::size_t n = 0; n < g.size(); ++n)
        if (g.has_edge(n, axis)) rhs += G.components[axis][n] * dv[n];
    }
    EXPECT_NEAR(lhs, rhs, 1e-12 * (1 + std::abs(rhs)));
  }
}

TEST(OperatorProperties, OperatorIsEnergyGradient) {
  Rng rng(4);
  for (auto p : {std::vector<double>{2.0}, std::vector<double>{1.5}, std::vector<double>{3.0, 1.7}}) {
    const Grid g = p.size() == 1 ? Grid({15}, {1}, p) : Grid({9, 11}, {1, 1}, p);
    const auto u = random_function(g, rng);
    const auto au = apply_operator(g, LerayLionsField::model(g), u);
    for (int t = 0; t < 10; ++t) {
      const std::size_t node = g.interior()[rng.below(g.interior().size())];
      const double h = 1e-6;
      auto up = u, um = u;
      up[node] += h;
      um[node] -= h;
      const double fd = (anisotropic_energy(g, up) - anisotropic_energy(g, um)) / (2 * h);
      const double value = au[node] * g.cell_volume();
      EXPECT_LE(std::abs(fd - value), 1e-6 * (1 + std::abs(value)));
    }
  }
}

TEST(LerayLions, HypothesesHoldForModelAndWeightedFields) {
  const Grid g({9, 9}, {1, 1}, {1.4, 3.5});
  const auto model = LerayLionsField::model(g);
  EXPECT_EQ(model.coercivity(), 1.0);
  const auto r = check_hypotheses(g, model, 2000, 5);
  EXPECT_GE(r.coercivity_margin, -1e-12);
  EXPECT_GE(r.growth_margin, -1e-12);
  EXPECT_GE(r.monotonicity_margin, -1e-12);
  const auto w = LerayLionsField::weighted(g, {[](auto x) { return 0.5 + x[0]; }, [](auto) { return 3.0; }},
                                           {[](auto) { return 0.1; }, [](auto x) { return x[1]; }});
  EXPECT_NEAR(w.coercivity(), 0.5 + 1.0 / 16, 1e-12);
  EXPECT_EQ(w.growth(), 3.0);
  const auto rw = check_hypotheses(g, w, 2000, 6);
  EXPECT_GE(rw.coercivity_margin, -1e-12);
  EXPECT_GE(rw.growth_margin, -1e-12);
  EXPECT_GE(rw.monotonicity_margin, -1e-12);
  EXPECT_THROW(LerayLionsField::weighted(g, {[](auto) { return -1.0; }, [](auto) { return 1.0; }}), InvalidInput);
}

TEST(LerayLions, RegularizedSlopeMatchesFluxDerivative) {
  const Grid g({5}, {1}, {3.0});
  const auto a = LerayLionsField::model(g);
  for (double xi : {-2.0, -0.3, 0.4, 1.7}) {
    const double h = 1e-6;
    const double fd = (a.flux(0, 1, xi + h) - a.flux(0, 1, xi - h)) / (2 * h);
    EXPECT_NEAR(a.regularized_slope(0, 1, xi, 1e-8), fd, 1e-6 * (1 + std::abs(fd)));
    EXPECT_NEAR(a.secant_slope(0, 1, xi, 1e-8) * xi, a.flux(0, 1, xi), 1e-9);
  }
}

TEST(Embeddings, ZeroFunctionReportsZeroRatios) {
  const Grid g({9}, {1}, {2});
  const auto r = check_embeddings(g, std::vector<double>(9, 0.0), 2.0);
  EXPECT_EQ(r.lq_norm, 0.0);
  EXPECT_EQ(r.axis_ratios[0], 0.0);
  EXPECT_EQ(r.sum_ratio, 0.0);
  EXPECT_THROW(check_embeddings(g, std::vector<double>(9, 0.0), 0.5), InvalidInput);
}

TEST(Embeddings, HatFamilyHasBoundedRatios) {
  double worst = 0.0;
  for (int n : {9, 17, 33, 65, 129, 257}) {
    const Grid g({n}, {1}, {2});
    const auto u = GridFunction::interpolate(g, [](auto x) { return std::min(x[0], 1 - x[0]); });
    const auto r = check_embeddings(g, u.values(), 4.0);
    EXPECT_TRUE(std::isinf(r.critical_exponent));
    worst = std::max(worst, r.axis_ratios[0]);
  }
  EXPECT_LT(worst, 1.0);
}

TEST(Embeddings, SupercriticalConcentrationBlowsUp) {
  // Two dimensions with p = (1.5, 1.5): the critical exponent is 6; spikes at
  // a point make the L^12 ratio grow under refinement.
  std::vector<double> ratios;
  for (int n : {9, 17, 33, 65}) {
    const Grid g({n, n}, {1, 1}, {1.5, 1.5});
    std::vector<double> u(g.size(), 0.0);
    const double centre[2] = {0.5, 0.5};
    u[g.nearest_node(centre)] = 1.0;
    const auto r = check_embeddings(g, u, 12.0);
    EXPECT_NEAR(r.critical_exponent, 6.0, 1e-12);
    EXPECT_TRUE(r.supercritical);
    ratios.push_back(r.sum_ratio);
  }
  for (std::size_t i = 1; i < ratios.size(); ++i) EXPECT_GT(ratios[i], ratios[i - 1]);
}

TEST(Csv, RoundTripAndValidation) {
  Rng rng(8);
  const Grid g({7, 5}, {1, 2}, {2, 2});
  const auto u = random_function(g, rng);
  std::stringstream ss;
  write_csv(ss, g, u);
  const std::string text = ss.str();
  EXPECT_EQ(text.rfind("# axes=x,y", 0), 0u);
  EXPECT_EQ(read_csv(ss, g), u);
  const Grid other({7, 6}, {1, 2}, {2, 2});
  std::stringstream again(text);
  EXPECT_THROW(read_csv(again, other), InvalidInput);
  std::stringstream broken("# axes=x,y n=7,5 h=0.16666666666666666,0.5\ni,j,value\n0,0\n");
  EXPECT_THROW(read_csv(broken, g), InvalidInput);
}
