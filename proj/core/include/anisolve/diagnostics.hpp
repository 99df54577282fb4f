#pragma once

// Post-hoc checks of a converged bundle: the renormalized identity, the entropy
// inequality, level-set decay, concentration on the contact levels and the
// structural invariants of (u, w, nu).

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "anisolve/solver.hpp"

namespace anisolve {

struct TestFunction {
  std::string name;
  NodalArray values;
  bool nonnegative;
};

/// Deterministic family: tensor hats centred at 1/4, 1/2, 3/4 of the box, a
/// smooth bump, a sine mode, u itself and clipped noise drawn from `seed`.
std::vector<TestFunction> test_family(const Grid& g, std::span<const double> u, std::uint64_t seed);

/// |a-term + w-term + nu-term - <mu, h(u) xi>| with h = plateau_cutoff(l, .).
double renormalized_residual(const SolutionBundle& bundle, double l, std::span<const double> xi);

/// Left side minus right side of the entropy inequality tested with T_k(u - xi).
/// Throws InvalidInput unless m <= xi <= M nodewise and xi vanishes on the boundary.
double entropy_residual(const SolutionBundle& bundle, std::span<const double> xi, double k);

struct LevelSetMeasure {
  double value_above;     ///< meas [|u| > k]
  double gradient_above;  ///< meas [|D u| > k]
};
LevelSetMeasure level_set_decay(const SolutionBundle& bundle, double k);

/// N (pbar - 1) / (N - pbar) when the harmonic mean pbar is below N.
std::optional<double> decay_exponent(const Grid& g);

enum class Side { Above, Below };

struct ConcentrationTrace {
  std::vector<int> n;
  std::vector<double> values;
  double limit = 0.0;  ///< value at the largest n
};

/// Sum xi phi_n(u) Z vol with Z = -div_h a(x, D_h u) over n in {4, 16, 64, 256}.
/// Below the level the ramp is reflected: phi_n(-u) with level -lambda.
ConcentrationTrace concentration_check(const SolutionBundle& bundle, double lambda, Side side,
                                       std::span<const double> xi);

struct InvariantReport {
  double graph_defect;            ///< max over nodes with nu = 0
  double complementarity_defect;  ///< max of the positive parts of nu (M - u) and -nu (u - m)
  double support_violation;       ///< max distance from a nonzero nu to its contact level
  double confinement_violation;   ///< max distance of u outside [m, M]
  double nu_off_contact;          ///< max |nu| on nodes strictly inside (m, M) by tol
};
InvariantReport bundle_invariants(const SolutionBundle& bundle, double tol_contact);

}  // namespace anisolve
