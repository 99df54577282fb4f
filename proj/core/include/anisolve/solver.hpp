#pragma once

// Approximation scheme for  beta(u) - div a(x, Du) ∋ mu  with homogeneous
// Dirichlet data.  For each eps the Yosida-regularized problem
//
//   -div_h a(x, D_h u) + beta_eps(u) = mu_eps,   mu_eps = T_{1/eps}(f) - div F,
//
// is solved as the minimization of the strictly convex discrete functional
//
//   J_eps(u) = sum_edges a-potential + vol * sum_nodes j_eps(u) - <mu_eps, u>.
//
// run_scheme drives eps to zero along a geometric schedule with warm starts
// and splits the limit into a regular part w in beta(u) and a singular part nu
// supported on the contact sets [u = M], [u = m].

#include <cstdint>
#include <optional>
#include <vector>

#include "anisolve/graph.hpp"
#include "anisolve/grid.hpp"
#include "anisolve/measure.hpp"

namespace anisolve {

/// Everything that defines an instance of the inclusion.
struct Problem {
  Grid grid;
  LerayLionsField field;
  MonotoneGraph beta;
  MeasureData mu;
};

struct EpsilonSchedule {
  double eps0 = 1.0;
  double factor = 0.5;
  int count = 30;
  double tol_scheme = 1e-7;

  double eps(int k) const;
  /// Throws InvalidInput unless eps0 > 0, 0 < factor < 1, count >= 1, tol > 0.
  void validate() const;
};

struct SolverOptions {
  /// Residual tolerance is tol_res_factor * (1 + variation(mu)), raised to the
  /// rounding floor of a Jacobian row when that is larger.
  double tol_res_factor = 1e-9;
  int max_iter = 500;
  /// Regularization of |xi|^(p-2) inside the Newton Jacobian only.
  double delta = 1e-8;
};

struct RegularizedSolve {
  GridFunction u;
  int iterations = 0;
  int fallback_steps = 0;
  double residual = 0.0;   ///< max-norm of the strong-form nodal residual
  double tolerance = 0.0;  ///< tolerance the residual was tested against
  double energy = 0.0;     ///< J_eps at the returned iterate
  std::vector<double> energy_history;  ///< J_eps after each accepted iteration
};

/// J_eps(u) for a measure already regularized with eps.
double regularized_energy(const Problem& problem, const MeasureData& mu_eps, double eps, std::span<const double> u);

/// -div_h a(x, D_h u) + beta_eps(u) - mu_eps at interior nodes (strong form).
NodalArray regularized_residual(const Problem& problem, const MeasureData& mu_eps, double eps,
                                std::span<const double> u);

/// Damped Newton on the residual with a line search on J_eps and proximal
/// gradient fallback; axes with p_i < 2 use the secant linearization.  `mu_eps` must already be regularized with `eps`.
/// Throws NonConvergence when the tolerance is not reached in max_iter steps.
RegularizedSolve solve_regularized(const Problem& problem, const MeasureData& mu_eps, double eps,
                                   const std::optional<GridFunction>& warm_start, const SolverOptions& options = {});

struct TraceRow {
  double eps;
  int iterations;
  double residual;
  double energy;
  std::vector<double> estimates;  ///< estimate_truncation_energy at the trace levels
};

struct SolutionBundle {
  Problem problem;
  GridFunction u;
  NodalArray w;   ///< regular part, w in beta(u) off the contact set
  NodalArray nu;  ///< singular part as a nodal density (pairs with volume weights)
  std::vector<TraceRow> trace;
  std::vector<double> trace_levels;
  bool converged = false;
  double last_increment = 0.0;
  double final_eps = 0.0;
  double residual_tolerance = 0.0;
  double contact_tolerance = 0.0;
};

struct SchemeOptions {
  SolverOptions inner;
  /// Contact detection tolerance as a multiple of the schedule tolerance.
  double contact_factor = 10.0;
  std::vector<double> trace_levels;
  /// Starting iterate for the first eps (zero when absent).
  std::optional<GridFunction> initial;
};

/// Throws NonConvergence from inner solves and SchemeStalled when the last two
/// iterates fail the Cauchy test.
SolutionBundle run_scheme(const Problem& problem, const EpsilonSchedule& schedule, const SchemeOptions& options = {});

/// Splits a converged iterate into (w, nu); used by run_scheme and by readers
/// that rebuild a bundle.
void extract_limit(SolutionBundle& bundle, double eps);

/// Sum_i Sum_{edges with both ends in [|u| <= k]} |D^i u|^{p_i} vol.
double estimate_truncation_energy(const SolutionBundle& bundle, double k);
double estimate_truncation_energy(const Grid& g, std::span<const double> u, double k);

/// Sum_i Sum_edges |D^i (T_{n+1}(u) - T_n(u))|^{p_i} vol with T_0 = 0.
double tail_energy(const SolutionBundle& bundle, int n);

struct UniquenessReport {
  double u_difference;   ///< max-norm
  double w_difference;   ///< max-norm over nodes where both nu vanish
  double nu_difference;  ///< volume-weighted l1 norm
};

/// Runs the scheme from zero and from a bounded random start drawn with
/// `seed`; the two branches run concurrently when max_threads > 1.
UniquenessReport solve_twice_uniqueness(const Problem& problem, const EpsilonSchedule& schedule,
                                        std::uint64_t seed, const SchemeOptions& options = {}, int max_threads = 1);

}  // namespace anisolve
