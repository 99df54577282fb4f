#pragma once

// Diffuse measure data mu = f - div F (+ point masses in one dimension),
// paired against nodal test functions with the grid quadrature.

#include <cstddef>
#include <span>
#include <vector>

#include "anisolve/grid.hpp"

namespace anisolve {

struct Atom {
  std::size_t node;
  double weight;
};

class MeasureData {
 public:
  /// Throws InvalidInput on shape mismatch, non-finite data, atoms on a
  /// two-dimensional grid or atoms on boundary nodes.
  MeasureData(const Grid& g, NodalArray density, FluxField flux, std::vector<Atom> atoms = {});

  static MeasureData zero(const Grid& g);

  const NodalArray& density() const noexcept { return density_; }
  const FluxField& flux() const noexcept { return flux_; }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  bool is_zero() const noexcept;
  /// Copy with the density replaced; flux and atoms are kept.
  MeasureData with_density(NodalArray density) const;

  /// Strong-form load at each node: f - div_h F + atom weight / cell volume
  /// (zero on the boundary).  Pairing with v equals sum(load * v) * volume.
  NodalArray nodal_load(const Grid& g) const;

 private:
  NodalArray density_;
  FluxField flux_;
  std::vector<Atom> atoms_;
};

/// Sum f v vol + Sum_i Sum_edges F_i D^i v vol + Sum_atoms weight v(node).
double pairing(const Grid& g, const MeasureData& mu, std::span<const double> v);

/// Same measure with density truncated at 1/eps.
MeasureData regularize(const MeasureData& mu, double eps);

/// Total-variation proxy: Sum |f| vol + Sum |div_h F| vol + Sum |atom weights|,
/// over interior nodes.  Dominates |pairing(mu, v)| for ||v||_inf <= 1.
double variation(const Grid& g, const MeasureData& mu);

/// Sum_i ||F_i||_{p_i'}, the dual norm used in the Holder bound.
double flux_dual_norm(const Grid& g, const MeasureData& mu);

}  // namespace anisolve
