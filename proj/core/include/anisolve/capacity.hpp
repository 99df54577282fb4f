#pragma once

// Discrete anisotropic capacity of node sets:
//
//   cap(E) = min { Sum_i Sum_edges |D^i phi|^{p_i} vol : phi >= 1 on E, phi >= 0, phi = 0 on the boundary }.

#include <cstddef>
#include <vector>

#include "anisolve/grid.hpp"

namespace anisolve {

enum class SetKind { Compact, Open, Arbitrary };

struct NodeSet {
  std::vector<std::size_t> nodes;  ///< sorted, without duplicates
  SetKind kind = SetKind::Compact;

  /// Sorts and deduplicates; throws InvalidInput on an index outside the grid.
  static NodeSet make(const Grid& g, std::vector<std::size_t> nodes, SetKind kind = SetKind::Compact);
  bool empty() const noexcept { return nodes.empty(); }
  bool touches_boundary(const Grid& g) const;
};

NodeSet set_union(const NodeSet& a, const NodeSet& b);

struct CapacityOptions {
  double rel_tol = 1e-10;  ///< relative energy decrease ...
  int window = 20;         ///< ... measured over this many iterations
  int max_iter = 1'000'000;
};

struct CapacityResult {
  double value = 0.0;
  /// Minimizing potential; empty when the value is infinite.
  NodalArray potential;
  int iterations = 0;
};

/// Accelerated projected gradient with adaptive step and restart.  E = {} gives
/// 0, a set containing a boundary node gives +infinity.
CapacityResult capacity_potential(const Grid& g, const NodeSet& set, const CapacityOptions& options = {});

/// The capacity energy Sum_i Sum_edges |D^i phi|^{p_i} vol.
double capacity_energy(const Grid& g, std::span<const double> phi);

double capacity_compact(const Grid& g, const NodeSet& set);
/// On a finite grid the inner and outer regularizations collapse onto the
/// compact definition; both return capacity_compact of the same nodes.
double capacity_open(const Grid& g, const NodeSet& set);
double capacity_general(const Grid& g, const NodeSet& set);

}  // namespace anisolve
