#pragma once

// Experiment configuration: a sectioned `key = value` text format.
//
//   [grid]      n, length, p            (one value per axis, or one broadcast value)
//   [operator]  weight, weight_1, weight_2, offset_1, offset_2
//   [beta]      graph
//   [mu]        f, F_1, F_2, atom = (x, weight)   (atom may repeat)
//   [schedule]  eps0, rho, count, tol_scheme, tol_res, max_iter, delta
//   [output]    trace_k
//   [verify]    exact, exact_tol, k_factors, entropy_k, plateau, concentration
//   [capacity]  set, refine
//
// `#` starts a comment.  Unknown sections or keys, repeated keys and malformed
// values raise ConfigError with the file, line and field.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "anisolve/capacity.hpp"
#include "anisolve/expression.hpp"
#include "anisolve/solver.hpp"

namespace anisolve {

struct VerifySettings {
  std::optional<Expression> exact;
  double exact_tol = 0.0;  ///< 0 disables the error check
  std::vector<double> k_factors{0.25, 0.5, 1.0, 2.0};
  std::vector<double> entropy_k{1.0, 2.0};
  std::vector<double> plateau{0.5, 2.0};
  bool concentration = true;
};

struct CapacitySettings {
  std::string kind = "empty";  ///< point, interval, box or empty
  std::vector<double> params;
  std::vector<int> refine;
};

struct ExperimentConfig {
  std::string file;
  std::vector<int> nodes;
  std::vector<double> lengths;
  std::vector<double> exponents;
  std::vector<Expression> weights;  ///< empty means the model field
  std::vector<Expression> offsets;
  std::string graph = "identity";
  Expression f = Expression::constant(0.0);
  std::vector<Expression> flux;
  std::vector<std::pair<double, double>> atoms;
  EpsilonSchedule schedule;
  SolverOptions inner;
  std::vector<double> trace_k;
  VerifySettings verify;
  std::optional<CapacitySettings> capacity;

  /// Builds the grid with `nodes` replaced by `override_nodes` when given.
  Grid make_grid(const std::optional<std::vector<int>>& override_nodes = std::nullopt) const;
  Problem make_problem() const;
  SchemeOptions scheme_options() const;
  /// The configured capacity set on `g`.
  NodeSet capacity_set(const Grid& g) const;
};

ExperimentConfig parse_config(std::istream& in, const std::string& file);
/// Throws ConfigError (line 0) if the file cannot be opened.
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace anisolve
