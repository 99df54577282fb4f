#include "anisolve/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "anisolve/error.hpp"

namespace anisolve {

namespace {

double abs_pow(double x, double p) { return p == 2.0 ? x * x : std::pow(std::abs(x), p); }

// Energy and its gradient in one sweep over the edges.
double energy_and_gradient(const Grid& g, std::span<const double> phi, NodalArray* grad) {
  const double vol = g.cell_volume();
  if (grad) grad->assign(g.size(), 0.0);
  double acc = 0.0;
  for (int axis = 0; axis < g.dim(); ++axis) {
    const double p = g.exponent(axis);
    const std::size_t s = g.stride(axis);
    const double inv_h = 1.0 / g.spacing(axis);
    for (std::size_t node = 0; node < g.size(); ++node) {
      if (!g.has_edge(node, axis)) continue;
      const double xi = (phi[node + s] - phi[node]) * inv_h;
      acc += abs_pow(xi, p);
      if (grad) {
        const double flux = p * (p == 2.0 ? xi : std::copysign(std::pow(std::abs(xi), p - 1.0), xi)) * inv_h * vol;
        (*grad)[node] -= flux;
        (*grad)[node + s] += flux;
      }
    }
  }
  if (grad)
    for (std::size_t node = 0; node < g.size(); ++node)
      if (g.on_boundary(node)) (*grad)[node] = 0.0;
  return acc * vol;
}

}  // namespace

NodeSet NodeSet::make(const Grid& g, std::vector<std::size_t> nodes, SetKind kind) {
  for (std::size_t n : nodes)
    if (n >= g.size()) throw InvalidInput("node index " + std::to_string(n) + " lies outside the grid");
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return NodeSet{std::move(nodes), kind};
}

bool NodeSet::touches_boundary(const Grid& g) const {
  return std::any_of(nodes.begin(), nodes.end(), [&](std::size_t n) { return g.on_boundary(n); });
}

NodeSet set_union(const NodeSet& a, const NodeSet& b) {
  NodeSet out;
  out.kind = a.kind == b.kind ? a.kind : SetKind::Arbitrary;
  std::set_union(a.nodes.begin(), a.nodes.end(), b.nodes.begin(), b.nodes.end(), std::back_inserter(out.nodes));
  return out;
}

double capacity_energy(const Grid& g, std::span<const double> phi) { return energy_and_gradient(g, phi, nullptr); }

CapacityResult capacity_potential(const Grid& g, const NodeSet& set, const CapacityOptions& options) {
  CapacityResult result;
  if (set.empty()) {
    result.potential.assign(g.size(), 0.0);
    return result;
  }
  if (set.touches_boundary(g)) {
    result.value = std::numeric_limits<double>::infinity();
    return result;
  }

  NodalArray lower(g.size(), 0.0);
  for (std::size_t n : set.nodes) lower[n] = 1.0;
  auto project = [&](NodalArray& v) {
    for (std::size_t n = 0; n < g.size(); ++n) v[n] = g.on_boundary(n) ? 0.0 : std::max(v[n], lower[n]);
  };

  NodalArray x = lower;
  NodalArray y = x;
  NodalArray trial(g.size());
  NodalArray grad;
  double fx = capacity_energy(g, x);
  double t = 1.0;
  double step = 1.0;
  for (int axis = 0; axis < g.dim(); ++axis) step = std::min(step, g.spacing(axis) * g.spacing(axis));
  step /= 4.0 * g.dim() * g.max_exponent() * g.cell_volume();
  std::vector<double> history{fx};

  int it = 0;
  for (; it < options.max_iter; ++it) {
    const double fy = energy_and_gradient(g, y, &grad);
    double ft = 0.0;
    for (int bt = 0; bt < 60; ++bt) {
      for (std::size_t n = 0; n < g.size(); ++n) trial[n] = y[n] - step * grad[n];
      project(trial);
      ft = capacity_energy(g, trial);
      double model = fy;
      double dist2 = 0.0;
      for (std::size_t n = 0; n < g.size(); ++n) {
        const double d = trial[n] - y[n];
        model += grad[n] * d;
        dist2 += d * d;
      }
      if (ft <= model + dist2 / (2.0 * step) + 1e-15 * std::abs(fy)) break;
      step *= 0.5;
    }
    if (ft > fx) {
      // Restart the momentum when the objective goes up.
      y = x;
      t = 1.0;
      history.push_back(fx);
    } else {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      const double beta = (t - 1.0) / t_next;
      for (std::size_t n = 0; n < g.size(); ++n) y[n] = trial[n] + beta * (trial[n] - x[n]);
      project(y);
      x.swap(trial);
      fx = ft;
      t = t_next;
      step *= 1.1;
      history.push_back(fx);
    }
    const auto w = static_cast<std::size_t>(options.window);
    if (history.size() > w && history[history.size() - 1 - w] - fx <= options.rel_tol * fx) break;
  }
  result.value = fx;
  result.potential = std::move(x);
  result.iterations = it;
  return result;
}

double capacity_compact(const Grid& g, const NodeSet& set) { return capacity_potential(g, set).value; }
double capacity_open(const Grid& g, const NodeSet& set) { return capacity_compact(g, set); }
double capacity_general(const Grid& g, const NodeSet& set) { return capacity_compact(g, set); }

}  // namespace anisolve
