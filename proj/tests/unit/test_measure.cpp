#include <gtest/gtest.h>

#include <cmath>

#include "anisolve/calculus.hpp"
#include "anisolve/error.hpp"
#include "anisolve/measure.hpp"
#include "anisolve/random.hpp"

using namespace anisolve;

namespace {

MeasureData random_measure(const Grid& g, Rng& rng, bool with_atom) {
  NodalArray f(g.size());
  for (double& v : f) v = rng.uniform(-3, 3);
  FluxField F = FluxField::zero(g);
  for (int axis = 0; axis < g.dim(); ++axis)
    for (std::size_t n = 0; n < g.size(); ++n)
      if (g.has_edge(n, axis)) F.components[axis][n] = rng.uniform(-1, 1);
  std::vector<Atom> atoms;
  if (with_atom) atoms.push_back({g.interior()[rng.below(g.interior().size())], rng.uniform(-2, 2)});
  return MeasureData(g, f, F, atoms);
}

std::vector<double> random_function(const Grid& g, Rng& rng, double amp) {
  std::vector<double> u(g.size(), 0.0);
  for (std::size_t n : g.interior()) u[n] = rng.uniform(-amp, amp);
  return u;
}

}  // namespace

TEST(Pairing, Examples) {
  const Grid g({129}, {1}, {2});
  const auto zero = std::vector<double>(g.size(), 0.0);
  Rng rng(1);
  EXPECT_EQ(pairing(g, random_measure(g, rng, true), zero), 0.0);

  const double half[1] = {0.5};
  const MeasureData dirac(g, NodalArray(g.size(), 0.0), FluxField::zero(g), {{g.nearest_node(half), 1.0}});
  const auto v = GridFunction::interpolate(g, [](auto x) { return x[0] * (1 - x[0]); });
  EXPECT_NEAR(pairing(g, dirac, v.values()), 0.25, 1e-14);

  const Grid g2({65, 65}, {1, 1}, {2, 2});
  const MeasureData one(g2, NodalArray(g2.size(), 1.0), FluxField::zero(g2));
  const auto ones = GridFunction::interpolate(g2, [](auto) { return 1.0; });
  const double expected = 63.0 * 63.0 / (64.0 * 64.0);
  EXPECT_NEAR(pairing(g2, one, ones.values()), expected, 1e-12);
  EXPECT_NEAR(pairing(g2, one, ones.values()), 1.0, 4.0 / 64);
}

TEST(Pairing, MatchesNodalLoad) {
  Rng rng(2);
  for (int dim : {1, 2}) {
    const Grid g = dim == 1 ? Grid({33}, {1}, {2}) : Grid({9, 12}, {1, 2}, {2, 3});
    const auto mu = random_measure(g, rng, dim == 1);
    const auto v = random_function(g, rng, 1.0);
    const auto load = mu.nodal_load(g);
    double acc = 0.0;
    for (std::size_t n = 0; n < g.size(); ++n) acc += load[n] * v[n];
    EXPECT_NEAR(pairing(g, mu, v), acc * g.cell_volume(), 1e-12);
  }
}

TEST(Regularize, Examples) {
  const Grid g({9}, {1}, {2});
  Rng rng(3);
  const auto mu = random_measure(g, rng, true);
  const auto same = regularize(mu, 0.1);
  EXPECT_EQ(same.density(), mu.density());
  EXPECT_EQ(same.atoms().size(), 1u);
  EXPECT_EQ(same.atoms()[0].weight, mu.atoms()[0].weight);

  const MeasureData big(g, NodalArray(g.size(), 100.0), FluxField::zero(g));
  const MeasureData capped = regularize(big, 0.1);
  for (double v : capped.density()) EXPECT_DOUBLE_EQ(v, 10.0);
}

TEST(Regularize, PairingConvergesAsEpsVanishes) {
  const Grid g({65}, {1}, {2});
  NodalArray f(g.size());
  for (std::size_t n = 0; n < g.size(); ++n) f[n] = 1.0 / std::sqrt(g.coordinate(n, 0) + 1e-6);
  const MeasureData mu(g, f, FluxField::zero(g));
  Rng rng(4);
  const auto v = random_function(g, rng, 1.0);
  double previous = INFINITY;
  for (double eps : {1.0, 0.3, 0.1, 0.03, 0.01, 1e-3, 1e-4}) {
    const double gap = std::abs(pairing(g, regularize(mu, eps), v) - pairing(g, mu, v));
    EXPECT_LE(gap, previous + 1e-15);
    previous = gap;
  }
  EXPECT_EQ(previous, 0.0);
}

TEST(Variation, Examples) {
  const Grid g({33}, {1}, {2});
  EXPECT_EQ(variation(g, MeasureData::zero(g)), 0.0);
  const MeasureData atom(g, NodalArray(g.size(), 0.0), FluxField::zero(g), {{10, -2.0}});
  EXPECT_EQ(variation(g, atom), 2.0);
  const Grid g2({65, 65}, {1, 1}, {2, 2});
  EXPECT_NEAR(variation(g2, MeasureData(g2, NodalArray(g2.size(), 1.0), FluxField::zero(g2))), 1.0, 4.0 / 64);
}

TEST(MeasureProperties, HolderAndTruncationBounds) {
  Rng rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const int dim = 1 + trial % 2;
    const Grid g = dim == 1 ? Grid({41}, {1}, {1.7}) : Grid({13, 9}, {1, 1}, {2.5, 1.5});
    const auto mu = random_measure(g, rng, dim == 1);
    const auto v = random_function(g, rng, 3.0);
    double vmax = 0.0;
    for (double x : v) vmax = std::max(vmax, std::abs(x));
    double grad = 0.0;
    for (int axis = 0; axis < dim; ++axis)
      grad += edge_norm(g, derivative(g, v, axis), axis, g.exponent(axis));
    const double pair = pairing(g, mu, v);
    // Hölder splitting of the flux part.
    double fpart = 0.0;
    for (std::size_t n = 0; n < g.size(); ++n) fpart += std::abs(mu.density()[n] * v[n]);
    fpart *= g.cell_volume();
    for (const Atom& a : mu.atoms()) fpart += std::abs(a.weight * v[a.node]);
    EXPECT_LE(std::abs(pair), fpart + flux_dual_norm(g, mu) * grad + 1e-12);
    EXPECT_LE(std::abs(pair), variation(g, mu) * vmax + 1e-12);
    for (double k : {0.1, 0.5, 2.0}) EXPECT_LE(pairing(g, mu, truncate(k, v)), k * variation(g, mu) + 1e-12);
  }
}

TEST(MeasureData, RejectsInvalidData) {
  const Grid g1({9}, {1}, {2});
  const Grid g2({9, 9}, {1, 1}, {2, 2});
  EXPECT_THROW(MeasureData(g2, NodalArray(g2.size(), 0.0), FluxField::zero(g2), {{40, 1.0}}), InvalidInput);
  EXPECT_THROW(MeasureData(g1, NodalArray(g1.size(), 0.0), FluxField::zero(g1), {{0, 1.0}}), InvalidInput);
  EXPECT_THROW(MeasureData(g1, NodalArray(3, 0.0), FluxField::zero(g1)), InvalidInput);
  EXPECT_THROW(MeasureData(g1, NodalArray(g1.size(), NAN), FluxField::zero(g1)), InvalidInput);
  try {
    MeasureData(g2, NodalArray(g2.size(), 0.0), FluxField::zero(g2), {{40, 1.0}});
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("diffuse"), std::string::npos);
  }
}
