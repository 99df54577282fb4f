#include "anisolve/measure.hpp"

#include <cmath>

#include "anisolve/calculus.hpp"
#include "anisolve/error.hpp"

namespace anisolve {

MeasureData::MeasureData(const Grid& g, NodalArray density, FluxField flux, std::vector<Atom> atoms)
    : density_(std::move(density)), flux_(std::move(flux)), atoms_(std::move(atoms)) {
  if (density_.size() != g.size()) throw InvalidInput("density does not match the grid");
  if (static_cast<int>(flux_.components.size()) != g.dim()) throw InvalidInput("flux needs one component per axis");
  for (const auto& c : flux_.components) {
    if (c.size() != g.size()) throw InvalidInput("flux component does not match the grid");
    for (double v : c)
      if (!std::isfinite(v)) throw InvalidInput("flux values must be finite");
  }
  for (double v : density_)
    if (!std::isfinite(v)) throw InvalidInput("density values must be finite");
  if (!atoms_.empty() && g.dim() != 1)
    throw InvalidInput(
        "point masses are only accepted on one-dimensional grids: in two dimensions a point has zero "
        "capacity and a Dirac mass is not a diffuse measure");
  for (const Atom& a : atoms_) {
    if (a.node >= g.size() || g.on_boundary(a.node)) throw InvalidInput("point masses must sit on interior nodes");
    if (!std::isfinite(a.weight)) throw InvalidInput("point mass weights must be finite");
  }
}

MeasureData MeasureData::zero(const Grid& g) { return MeasureData(g, NodalArray(g.size(), 0.0), FluxField::zero(g)); }

bool MeasureData::is_zero() const noexcept {
  for (double v : density_)
    if (v != 0.0) return false;
  for (const Atom& a : atoms_)
    if (a.weight != 0.0) return false;
  return flux_.is_zero();
}

MeasureData MeasureData::with_density(NodalArray density) const {
  if (density.size() != density_.size()) throw InvalidInput("density does not match the grid");
  MeasureData out = *this;
  out.density_ = std::move(density);
  return out;
}

NodalArray MeasureData::nodal_load(const Grid& g) const {
  NodalArray load = negative_divergence(g, flux_);
  for (std::size_t node : g.interior()) load[node] += density_[node];
  const double inv_vol = 1.0 / g.cell_volume();
  for (const Atom& a : atoms_) load[a.node] += a.weight * inv_vol;
  return load;
}

double pairing(const Grid& g, const MeasureData& mu, std::span<const double> v) {
  if (v.size() != g.size()) throw InvalidInput("test function does not match the grid");
  double acc = 0.0;
  for (std::size_t node = 0; node < g.size(); ++node) acc += mu.density()[node] * v[node];
  for (int axis = 0; axis < g.dim(); ++axis) {
    const EdgeArray d = derivative(g, v, axis);
    const EdgeArray& f = mu.flux().components[axis];
    for (std::size_t node = 0; node < g.size(); ++node)
      if (g.has_edge(node, axis)) acc += f[node] * d[node];
  }
  acc *= g.cell_volume();
  for (const Atom& a : mu.atoms()) acc += a.weight * v[a.node];
  return acc;
}

MeasureData regularize(const MeasureData& mu, double eps) {
  if (!(eps > 0.0)) throw InvalidInput("regularization needs eps > 0");
  return mu.with_density(truncate(1.0 / eps, std::span<const double>(mu.density())));
}

double variation(const Grid& g, const MeasureData& mu) {
  const NodalArray div = negative_divergence(g, mu.flux());
  double acc = 0.0;
  for (std::size_t node : g.interior()) acc += std::abs(mu.density()[node]) + std::abs(div[node]);
  acc *= g.cell_volume();
  for (const Atom& a : mu.atoms()) acc += std::abs(a.weight);
  return acc;
}

double flux_dual_norm(const Grid& g, const MeasureData& mu) {
  double acc = 0.0;
  for (int axis = 0; axis < g.dim(); ++axis) {
    const double p = g.exponent(axis);
    acc += edge_norm(g, mu.flux().components[axis], axis, p / (p - 1.0));
  }
  return acc;
}

}  // namespace anisolve
