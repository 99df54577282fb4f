#include "anisolve/solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include "anisolve/calculus.hpp"
#include "anisolve/error.hpp"
#include "anisolve/random.hpp"

namespace anisolve {

namespace {

constexpr double kMachEps = std::numeric_limits<double>::epsilon();
constexpr double kInf = std::numeric_limits<double>::infinity();

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double abs_pow(double x, double p) { return p == 2.0 ? x * x : std::pow(std::abs(x), p); }

struct EnergyParts {
  double value;
  double magnitude;  // sum of absolute contributions, the scale for roundoff
};

EnergyParts energy_parts(const Problem& pb, std::span<const double> load, double eps, std::span<const double> u) {
  const Grid& g = pb.grid;
  const double field = field_energy(g, pb.field, u);
  double envelope = 0.0;
  double work = 0.0;
  double work_abs = 0.0;
  for (std::size_t node : g.interior()) {
    envelope += moreau(pb.beta, eps, u[node]);
    work += load[node] * u[node];
    work_abs += std::abs(load[node] * u[node]);
  }
  const double vol = g.cell_volume();
  return {field + vol * (envelope - work), field + vol * (envelope + work_abs)};
}

// Strong-form residual at interior nodes.
NodalArray residual_with_load(const Problem& pb, std::span<const double> load, double eps, std::span<const double> u) {
  const GridFunction a = apply_operator(pb.grid, pb.field, u);
  NodalArray r(pb.grid.size(), 0.0);
  for (std::size_t node : pb.grid.interior()) r[node] = a[node] + yosida(pb.beta, eps, u[node]) - load[node];
  return r;
}

class NewtonSystem {
 public:
  explicit NewtonSystem(const Grid& g) : g_(g), slot_(g.size(), -1) {
    int k = 0;
    for (std::size_t node : g.interior()) slot_[node] = k++;
    unknowns_ = k;
    matrix_.resize(k, k);
  }

  int unknowns() const noexcept { return unknowns_; }
  int slot(std::size_t node) const { return slot_[node]; }

  // Assembles and factors the delta-regularized Jacobian.  Absolute row sums
  // are available through row_sum(node).
  void assemble(const Problem& pb, double eps, std::span<const double> u, double delta) {
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(unknowns_) * (2 * g_.dim() + 1) * 2);
    std::vector<double>& row_sum = row_sum_;
    row_sum.assign(static_cast<std::size_t>(unknowns_), 0.0);
    for (int axis = 0; axis < g_.dim(); ++axis) {
      const std::size_t s = g_.stride(axis);
      const double inv_h = 1.0 / g_.spacing(axis);
      for (std::size_t node = 0; node < g_.size(); ++node) {
        if (!g_.has_edge(node, axis)) continue;
        const int a = slot_[node];
        const int b = slot_[node + s];
        if (a < 0 && b < 0) continue;
        const double xi = (u[node + s] - u[node]) * inv_h;
        // Axes with p < 2 are linearized with the secant slope.
        const double slope = pb.field.exponent(axis) < 2.0 ? pb.field.secant_slope(axis, node, xi, delta)
                                                           : pb.field.regularized_slope(axis, node, xi, delta);
        const double c = slope * inv_h * inv_h;
        if (a >= 0) {
          triplets.emplace_back(a, a, c);
          row_sum[a] += c;
        }
        if (b >= 0) {
          triplets.emplace_back(b, b, c);
          row_sum[b] += c;
        }
        if (a >= 0 && b >= 0) {
          triplets.emplace_back(a, b, -c);
          triplets.emplace_back(b, a, -c);
          row_sum[a] += c;
          row_sum[b] += c;
        }
      }
    }
    for (std::size_t node : g_.interior()) {
      const int a = slot_[node];
      const double slope = yosida_with_slope(pb.beta, eps, u[node]).slope;
      triplets.emplace_back(a, a, slope);
      row_sum[a] += std::abs(slope);
    }
    matrix_.setFromTriplets(triplets.begin(), triplets.end());
    if (!analyzed_) {
      solver_.analyzePattern(matrix_);
      analyzed_ = true;
    }
    solver_.factorize(matrix_);
  }

  double row_sum(std::size_t node) const { return row_sum_[slot_[node]]; }

  // Solves J d = -r; false if the factorization or solve broke down.
  bool direction(std::span<const double> r, NodalArray& d) {
    if (solver_.info() != Eigen::Success) return false;
    Eigen::VectorXd rhs(unknowns_);
    for (std::size_t node : g_.interior()) rhs[slot_[node]] = -r[node];
    const Eigen::VectorXd x = solver_.solve(rhs);
    if (solver_.info() != Eigen::Success) return false;
    d.assign(g_.size(), 0.0);
    for (std::size_t node : g_.interior()) {
      d[node] = x[slot_[node]];
      if (!std::isfinite(d[node])) return false;
    }
    return true;
  }

 private:
  const Grid& g_;
  std::vector<int> slot_;
  int unknowns_ = 0;
  Eigen::SparseMatrix<double> matrix_;
  std::vector<double> row_sum_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver_;
  bool analyzed_ = false;
};

// One proximal-gradient step: explicit step on the operator and load, then the
// proximal map of tau * j_eps, which is v + tau/(tau+eps) (J_{tau+eps}(v) - v).
// Returns false if no step length decreases the energy.
bool proximal_gradient_step(const Problem& pb, std::span<const double> load, double eps, NodalArray& u,
                            EnergyParts& current, double& tau) {
  const Grid& g = pb.grid;
  const GridFunction a = apply_operator(g, pb.field, u);
  NodalArray trial(g.size(), 0.0);
  for (int halving = 0; halving < 80; ++halving) {
    for (std::size_t node : g.interior()) {
      const double v = u[node] - tau * (a[node] - load[node]);
      trial[node] = v + tau / (tau + eps) * (resolvent(pb.beta, tau + eps, v) - v);
    }
    const EnergyParts e = energy_parts(pb, load, eps, trial);
    if (e.value < current.value) {
      u = trial;
      current = e;
      tau *= 2.0;
      return true;
    }
    tau *= 0.5;
  }
  return false;
}

}  // namespace

// ---------------------------------------------------------------------------

double EpsilonSchedule::eps(int k) const { return eps0 * std::pow(factor, k); }

void EpsilonSchedule::validate() const {
  if (!(eps0 > 0.0) || !std::isfinite(eps0)) throw InvalidInput("schedule needs eps0 > 0");
  if (!(factor > 0.0 && factor < 1.0)) throw InvalidInput("schedule factor must lie in (0, 1)");
  if (count < 1) throw InvalidInput("schedule needs at least one step");
  if (!(tol_scheme > 0.0)) throw InvalidInput("schedule tolerance must be positive");
}

double regularized_energy(const Problem& problem, const MeasureData& mu_eps, double eps, std::span<const double> u) {
  return energy_parts(problem, mu_eps.nodal_load(problem.grid), eps, u).value;
}

NodalArray regularized_residual(const Problem& problem, const MeasureData& mu_eps, double eps,
                                std::span<const double> u) {
  return residual_with_load(problem, mu_eps.nodal_load(problem.grid), eps, u);
}

RegularizedSolve solve_regularized(const Problem& pb, const MeasureData& mu_eps, double eps,
                                   const std::optional<GridFunction>& warm_start, const SolverOptions& options) {
  if (!(eps > 0.0)) throw InvalidInput("regularized solve needs eps > 0");
  const Grid& g = pb.grid;
  const NodalArray load = mu_eps.nodal_load(g);
  const double tol_res = options.tol_res_factor * (1.0 + variation(g, mu_eps));

  NodalArray u = warm_start ? warm_start->vector() : NodalArray(g.size(), 0.0);
  if (u.size() != g.size()) throw InvalidInput("warm start does not match the grid");

  RegularizedSolve out;
  EnergyParts energy = energy_parts(pb, load, eps, u);
  out.energy_history.push_back(energy.value);

  NewtonSystem system(g);
  NodalArray direction;
  NodalArray trial(g.size(), 0.0);
  double tau = 1.0;
  for (int it = 0;; ++it) {
    const NodalArray r = residual_with_load(pb, load, eps, u);
    const double res = max_abs(r);
    system.assemble(pb, eps, u, options.delta);
    // Each row is tested against tol_res, or against the rounding floor of
    // that row when its Jacobian entries are too large to resolve tol_res.
    const double scale = 8.0 * kMachEps * (1.0 + max_abs(u));
    bool done = true;
    double tol = tol_res;
    for (std::size_t node : g.interior()) {
      const double row_tol = std::max(tol_res, scale * system.row_sum(node));
      tol = std::max(tol, row_tol);
      if (std::abs(r[node]) > row_tol) done = false;
    }
    out.residual = res;
    out.tolerance = tol;
    if (done) break;
    if (it >= options.max_iter) throw NonConvergence(it, res);
    out.iterations = it + 1;

    bool accepted = false;
    if (system.direction(r, direction)) {
      double slope = 0.0;
      for (std::size_t node : g.interior()) slope += r[node] * direction[node];
      slope *= g.cell_volume();
      if (slope < 0.0) {
        const double slack = 64.0 * kMachEps * (energy.magnitude + 1.0);
        double alpha = 1.0;
        for (int ls = 0; ls < 60 && !accepted; ++ls, alpha *= 0.5) {
          for (std::size_t node : g.interior()) trial[node] = u[node] + alpha * direction[node];
          const EnergyParts e = energy_parts(pb, load, eps, trial);
          bool ok = e.value <= energy.value + 1e-4 * alpha * slope;
          // Within roundoff of the current energy a smaller residual also accepts.
          if (!ok && e.value <= energy.value + slack)
            ok = max_abs(residual_with_load(pb, load, eps, trial)) < res;
          if (ok) {
            u.swap(trial);
            energy = e;
            accepted = true;
          }
        }
      }
    }
    if (!accepted) {
      if (!proximal_gradient_step(pb, load, eps, u, energy, tau)) throw NonConvergence(it + 1, res);
      ++out.fallback_steps;
    }
    out.energy_history.push_back(energy.value);
  }
  out.u = GridFunction(g, std::move(u));
  out.energy = energy.value;
  return out;
}

// ---------------------------------------------------------------------------

void extract_limit(SolutionBundle& bundle, double eps) {
  const Problem& pb = bundle.problem;
  const Grid& g = pb.grid;
  const MonotoneGraph& beta = pb.beta;
  const NodalArray load = pb.mu.nodal_load(g);
  const GridFunction a = apply_operator(g, pb.field, bundle.u.values());
  const double tol_conc = bundle.contact_tolerance;
  const double tol_res = bundle.residual_tolerance;

  bundle.w.assign(g.size(), 0.0);
  bundle.nu.assign(g.size(), 0.0);
  for (std::size_t node : g.interior()) {
    const double r = bundle.u[node];
    const double z = load[node] - a[node];
    if (beta.bounded_above() && r >= beta.dom_hi() - tol_conc) {
      const double finite = beta.pieces().back().value(beta.dom_hi());
      if (z - finite > tol_res) {
        bundle.w[node] = finite;
        bundle.nu[node] = z - finite;
        continue;
      }
    }
    if (beta.bounded_below() && r <= beta.dom_lo() + tol_conc) {
      const double finite = beta.pieces().front().value(beta.dom_lo());
      if (z - finite < -tol_res) {
        bundle.w[node] = finite;
        bundle.nu[node] = z - finite;
        continue;
      }
    }
    const double inside = std::clamp(r, beta.dom_lo(), beta.dom_hi());
    bundle.w[node] = beta.section(inside).project(yosida(beta, eps, r));
  }
}

SolutionBundle run_scheme(const Problem& problem, const EpsilonSchedule& schedule, const SchemeOptions& options) {
  schedule.validate();
  const Grid& g = problem.grid;
  SolutionBundle bundle{problem, GridFunction(g), {}, {}, {}, options.trace_levels};
  bundle.contact_tolerance = options.contact_factor * schedule.tol_scheme;
  bundle.residual_tolerance = options.inner.tol_res_factor * (1.0 + variation(g, problem.mu));

  auto trace_row = [&](double eps, const RegularizedSolve& s) {
    TraceRow row{eps, s.iterations, s.residual, s.energy, {}};
    for (double k : options.trace_levels) row.estimates.push_back(estimate_truncation_energy(g, s.u.values(), k));
    bundle.trace.push_back(std::move(row));
  };

  if (problem.mu.is_zero()) {
    // Zero data: the zero triple after a single step.
    RegularizedSolve zero;
    zero.u = GridFunction(g);
    trace_row(schedule.eps(0), zero);
    bundle.final_eps = schedule.eps(0);
    bundle.converged = true;
    bundle.w.assign(g.size(), 0.0);
    bundle.nu.assign(g.size(), 0.0);
    return bundle;
  }

  GridFunction previous = options.initial ? *options.initial : GridFunction(g);
  if (previous.size() != g.size()) throw InvalidInput("initial iterate does not match the grid");
  double increment = kInf;
  double eps = schedule.eps0;
  for (int k = 0; k < schedule.count; ++k) {
    eps = schedule.eps(k);
    const MeasureData mu_eps = regularize(problem.mu, eps);
    RegularizedSolve s = solve_regularized(problem, mu_eps, eps, previous, options.inner);
    trace_row(eps, s);
    double inc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) inc = std::max(inc, std::abs(s.u[i] - previous[i]));
    increment = inc;
    previous = std::move(s.u);
  }
  bundle.u = std::move(previous);
  bundle.final_eps = eps;
  bundle.last_increment = increment;
  bundle.converged = increment <= schedule.tol_scheme;
  if (!bundle.converged) throw SchemeStalled(increment);
  extract_limit(bundle, eps);
  return bundle;
}

// ---------------------------------------------------------------------------

double estimate_truncation_energy(const Grid& g, std::span<const double> u, double k) {
  if (!(k > 0.0)) throw InvalidInput("truncation level must be positive");
  double acc = 0.0;
  for (int axis = 0; axis < g.dim(); ++axis) {
    const double p = g.exponent(axis);
    const std::size_t s = g.stride(axis);
    const double inv_h = 1.0 / g.spacing(axis);
    for (std::size_t node = 0; node < g.size(); ++node) {
      if (!g.has_edge(node, axis)) continue;
      if (std::abs(u[node]) > k || std::abs(u[node + s]) > k) continue;
      acc += abs_pow((u[node + s] - u[node]) * inv_h, p);
    }
  }
  return acc * g.cell_volume();
}

double estimate_truncation_energy(const SolutionBundle& bundle, double k) {
  return estimate_truncation_energy(bundle.problem.grid, bundle.u.values(), k);
}

double tail_energy(const SolutionBundle& bundle, int n) {
  if (n < 0) throw InvalidInput("band index must be nonnegative");
  const Grid& g = bundle.problem.grid;
  NodalArray band(g.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = bundle.u[i];
    band[i] = truncate(n + 1.0, r) - (n == 0 ? 0.0 : truncate(static_cast<double>(n), r));
  }
  double acc = 0.0;
  for (int axis = 0; axis < g.dim(); ++axis) {
    const double p = g.exponent(axis);
    for (double d : derivative(g, band, axis)) acc += abs_pow(d, p);
  }
  return acc * g.cell_volume();
}

UniquenessReport solve_twice_uniqueness(const Problem& problem, const EpsilonSchedule& schedule, std::uint64_t seed,
                                        const SchemeOptions& options, int max_threads) {
  const Grid& g = problem.grid;
  Rng rng(seed);
  GridFunction start(g);
  for (std::size_t node : g.interior()) start[node] = rng.uniform(-1.0, 1.0);

  SchemeOptions from_zero = options;
  from_zero.initial.reset();
  SchemeOptions from_random = options;
  from_random.initial = start;

  auto branch = [&problem, &schedule](const SchemeOptions& o) { return run_scheme(problem, schedule, o); };
  std::future<SolutionBundle> pending;
  if (max_threads > 1) pending = std::async(std::launch::async, branch, std::cref(from_random));
  const SolutionBundle first = branch(from_zero);
  const SolutionBundle second = pending.valid() ? pending.get() : branch(from_random);

  UniquenessReport report{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < g.size(); ++i) {
    report.u_difference = std::max(report.u_difference, std::abs(first.u[i] - second.u[i]));
    if (first.nu[i] == 0.0 && second.nu[i] == 0.0)
      report.w_difference = std::max(report.w_difference, std::abs(first.w[i] - second.w[i]));
    report.nu_difference += std::abs(first.nu[i] - second.nu[i]);
  }
  report.nu_difference *= g.cell_volume();
  return report;
}

}  // namespace anisolve
