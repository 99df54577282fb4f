#include "anisolve/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "anisolve/calculus.hpp"
#include "anisolve/error.hpp"
#include "anisolve/random.hpp"

namespace anisolve {

namespace {

// Sum_i Sum_edges a_i(D^i u) D^i v vol.
double flux_pairing(const Grid& g, const LerayLionsField& a, std::span<const double> u, std::span<const double> v) {
  const FluxField flux = coefficient_flux(g, a, u);
  double acc = 0.0;
  for (int axis = 0; axis < g.dim(); ++axis) {
    const EdgeArray dv = derivative(g, v, axis);
    for (std::size_t node = 0; node < g.size(); ++node)
      if (g.has_edge(node, axis)) acc += flux.components[axis][node] * dv[node];
  }
  return acc * g.cell_volume();
}

double weighted_sum(const Grid& g, std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t node : g.interior()) acc += a[node] * b[node];
  return acc * g.cell_volume();
}

void require_shape(const Grid& g, std::span<const double> xi) {
  if (xi.size() != g.size()) throw InvalidInput("test function does not match the grid");
  for (std::size_t n = 0; n < g.size(); ++n)
    if (g.on_boundary(n) && xi[n] != 0.0) throw InvalidInput("test function must vanish on the boundary");
}

}  // namespace

std::vector<TestFunction> test_family(const Grid& g, std::span<const double> u, std::uint64_t seed) {
  std::vector<TestFunction> family;
  auto sample = [&](auto&& fn) {
    NodalArray v(g.size(), 0.0);
    for (std::size_t node : g.interior()) v[node] = fn(g.position(node));
    return v;
  };
  const double lx = g.length(0);
  const double ly = g.dim() > 1 ? g.length(1) : 1.0;
  for (double c : {0.25, 0.5, 0.75}) {
    family.push_back({"hat" + std::to_string(static_cast<int>(c * 100)), sample([&](std::array<double, 2> x) {
                        double v = std::max(0.0, 1.0 - std::abs(x[0] / lx - c) * 4.0);
                        if (g.dim() > 1) v *= std::max(0.0, 1.0 - std::abs(x[1] / ly - c) * 4.0);
                        return v;
                      }),
                      true});
  }
  family.push_back({"bump", sample([&](std::array<double, 2> x) {
                      double r2 = std::pow(2.0 * x[0] / lx - 1.0, 2);
                      if (g.dim() > 1) r2 += std::pow(2.0 * x[1] / ly - 1.0, 2);
                      return r2 < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - r2)) : 0.0;
                    }),
                    true});
  family.push_back({"sine", sample([&](std::array<double, 2> x) {
                      double v = std::sin(2.0 * std::numbers::pi * x[0] / lx);
                      if (g.dim() > 1) v *= std::sin(std::numbers::pi * x[1] / ly);
                      return v;
                    }),
                    false});
  NodalArray self(g.size(), 0.0);
  for (std::size_t node : g.interior()) self[node] = u[node];
  family.push_back({"u", std::move(self), false});
  Rng rng(seed);
  NodalArray noise(g.size(), 0.0);
  for (std::size_t node : g.interior()) noise[node] = std::clamp(rng.uniform(-1.0, 1.0), -0.5, 0.5);
  family.push_back({"noise", std::move(noise), false});
  return family;
}

double renormalized_residual(const SolutionBundle& bundle, double l, std::span<const double> xi) {
  const Problem& pb = bundle.problem;
  const Grid& g = pb.grid;
  require_shape(g, xi);
  NodalArray test(g.size(), 0.0);
  for (std::size_t node : g.interior()) test[node] = plateau_cutoff(l, bundle.u[node]) * xi[node];
  const double t1 = flux_pairing(g, pb.field, bundle.u.values(), test);
  const double t2 = weighted_sum(g, bundle.w, test);
  const double t3 = weighted_sum(g, bundle.nu, test);
  const double t4 = pairing(g, pb.mu, test);
  return std::abs(t1 + t2 + t3 - t4);
}

double entropy_residual(const SolutionBundle& bundle, std::span<const double> xi, double k) {
  const Problem& pb = bundle.problem;
  const Grid& g = pb.grid;
  require_shape(g, xi);
  if (!(k > 0.0)) throw InvalidInput("entropy test needs k > 0");
  for (double v : xi)
    if (v < pb.beta.dom_lo() || v > pb.beta.dom_hi())
      throw InvalidInput("entropy test function must take values in the domain of beta");
  NodalArray test(g.size(), 0.0);
  for (std::size_t node : g.interior()) test[node] = truncate(k, bundle.u[node] - xi[node]);
  const double lhs = flux_pairing(g, pb.field, bundle.u.values(), test) + weighted_sum(g, bundle.w, test);
  return lhs - pairing(g, pb.mu, test);
}

LevelSetMeasure level_set_decay(const SolutionBundle& bundle, double k) {
  if (!(k > 0.0)) throw InvalidInput("level must be positive");
  const Grid& g = bundle.problem.grid;
  std::vector<EdgeArray> d;
  for (int axis = 0; axis < g.dim(); ++axis) d.push_back(derivative(g, bundle.u.values(), axis));
  LevelSetMeasure out{0.0, 0.0};
  for (std::size_t node = 0; node < g.size(); ++node) {
    if (std::abs(bundle.u[node]) > k) out.value_above += 1.0;
    double norm2 = 0.0;
    for (int axis = 0; axis < g.dim(); ++axis) norm2 += d[axis][node] * d[axis][node];
    if (std::sqrt(norm2) > k) out.gradient_above += 1.0;
  }
  out.value_above *= g.cell_volume();
  out.gradient_above *= g.cell_volume();
  return out;
}

std::optional<double> decay_exponent(const Grid& g) {
  const double n = g.dim();
  const double pbar = g.mean_exponent();
  if (pbar >= n) return std::nullopt;
  return n * (pbar - 1.0) / (n - pbar);
}

ConcentrationTrace concentration_check(const SolutionBundle& bundle, double lambda, Side side,
                                       std::span<const double> xi) {
  const Problem& pb = bundle.problem;
  const Grid& g = pb.grid;
  require_shape(g, xi);
  const GridFunction z = apply_operator(g, pb.field, bundle.u.values());
  ConcentrationTrace trace;
  for (int n : {4, 16, 64, 256}) {
    double acc = 0.0;
    for (std::size_t node : g.interior()) {
      const double r = bundle.u[node];
      const double phi =
          side == Side::Above ? level_indicator_ramp(n, lambda, r) : level_indicator_ramp(n, -lambda, -r);
      acc += xi[node] * phi * z[node];
    }
    trace.n.push_back(n);
    trace.values.push_back(acc * g.cell_volume());
  }
  trace.limit = trace.values.back();
  return trace;
}

InvariantReport bundle_invariants(const SolutionBundle& bundle, double tol_contact) {
  const Problem& pb = bundle.problem;
  const Grid& g = pb.grid;
  const double m = pb.beta.dom_lo();
  const double big_m = pb.beta.dom_hi();
  InvariantReport r{0.0, 0.0, 0.0, 0.0, 0.0};
  for (std::size_t node = 0; node < g.size(); ++node) {
    const double u = bundle.u[node];
    const double nu = bundle.nu[node];
    if (nu == 0.0) r.graph_defect = std::max(r.graph_defect, graph_membership_defect(pb.beta, u, bundle.w[node]));
    if (nu > 0.0) {
      r.complementarity_defect = std::max(r.complementarity_defect, nu * (big_m - u));
      r.support_violation = std::max(r.support_violation, big_m - u);
    }
    if (nu < 0.0) {
      r.complementarity_defect = std::max(r.complementarity_defect, -nu * (u - m));
      r.support_violation = std::max(r.support_violation, u - m);
    }
    r.confinement_violation = std::max({r.confinement_violation, m - u, u - big_m});
    if (u > m + tol_contact && u < big_m - tol_contact) r.nu_off_contact = std::max(r.nu_off_contact, std::abs(nu));
  }
  return r;
}

}  // namespace anisolve
