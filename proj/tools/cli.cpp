#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <future>
#include <limits>
#include <sstream>
#include <thread>

#include "anisolve/capacity.hpp"
#include "anisolve/config.hpp"
#include "anisolve/diagnostics.hpp"
#include "anisolve/error.hpp"
#include "anisolve/text.hpp"

namespace anisolve::cli {

namespace fs = std::filesystem;
using text::format_double;

namespace {

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

NodalArray read_nodal(const fs::path& path, const Grid& g) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("missing bundle file " + path.filename().string() + " in " + path.parent_path().string());
  try {
    return read_csv(in, g);
  } catch (const InvalidInput& err) {
    throw InvalidInput(path.filename().string() + ": " + err.what());
  }
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

class CheckTable {
 public:
  void add(const std::string& name, const std::string& params, double value, double threshold, bool pass) {
    rows_ << name << ',' << params << ',' << format_double(value) << ',' << format_double(threshold) << ','
          << (pass ? "pass" : "fail") << '\n';
    all_pass_ = all_pass_ && pass;
    ++count_;
    if (!pass) ++failed_;
  }
  void at_most(const std::string& name, const std::string& params, double value, double threshold) {
    add(name, params, value, threshold, value <= threshold);
  }
  void at_least(const std::string& name, const std::string& params, double value, double threshold) {
    add(name, params, value, threshold, value >= threshold);
  }
  bool all_pass() const noexcept { return all_pass_; }
  int count() const noexcept { return count_; }
  int failed() const noexcept { return failed_; }
  std::string str() const { return "check,parameters,value,threshold,pass\n" + rows_.str(); }

 private:
  std::ostringstream rows_;
  bool all_pass_ = true;
  int count_ = 0;
  int failed_ = 0;
};

template <class Fn>
int guarded(std::ostream& log, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NonConvergence& e) {
    log << "not converged: " << e.what() << '\n';
    return kNotConverged;
  } catch (const SchemeStalled& e) {
    log << "not converged: " << e.what() << '\n';
    return kNotConverged;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kConfigError;
  }
}

}  // namespace

int thread_cap() {
  if (const char* env = std::getenv("ANISOLVE_THREADS")) {
    const auto v = text::parse_integer(env);
    if (v && *v >= 1) return static_cast<int>(std::min<long long>(*v, 1024));
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void write_bundle(const fs::path& dir, const SolutionBundle& bundle) {
  const Grid& g = bundle.problem.grid;
  fs::create_directories(dir);
  {
    auto out = open_output(dir / "u.csv");
    write_csv(out, g, bundle.u.values());
  }
  {
    auto out = open_output(dir / "w.csv");
    write_csv(out, g, bundle.w);
  }
  {
    auto out = open_output(dir / "nu.csv");
    write_csv(out, g, bundle.nu);
  }
  auto out = open_output(dir / "trace.csv");
  out << "eps,iterations,residual,energy";
  for (double k : bundle.trace_levels) out << ",estimate_k=" << format_double(k);
  out << '\n';
  for (const TraceRow& row : bundle.trace) {
    out << format_double(row.eps) << ',' << row.iterations << ',' << format_double(row.residual) << ','
        << format_double(row.energy);
    for (double e : row.estimates) out << ',' << format_double(e);
    out << '\n';
  }
}

SolutionBundle read_bundle(const fs::path& dir, const Problem& problem) {
  const Grid& g = problem.grid;
  SolutionBundle b{problem, GridFunction(g, read_nodal(dir / "u.csv", g)), read_nodal(dir / "w.csv", g),
                   read_nodal(dir / "nu.csv", g), {}, {}};
  b.converged = true;
  return b;
}

int cmd_solve(const fs::path& config, const fs::path& out_dir, const CommonFlags& flags, std::ostream& log,
              std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig cfg = load_config(config);
    const Problem problem = cfg.make_problem();
    const SolutionBundle bundle = run_scheme(problem, cfg.schedule, cfg.scheme_options());
    write_bundle(out_dir, bundle);

    const Grid& g = problem.grid;
    const double umax = bundle.u.max_abs();
    const double var = variation(g, problem.mu);
    std::ostringstream report;
    report << "config: " << fs::path(config).filename().string() << '\n'
           << "grid: dim=" << g.dim() << " n=";
    for (int a = 0; a < g.dim(); ++a) report << (a ? "," : "") << g.nodes(a);
    report << " p=";
    for (int a = 0; a < g.dim(); ++a) report << (a ? "," : "") << format_double(g.exponent(a));
    report << "\ngraph: " << cfg.graph << '\n'
           << "converged: " << (bundle.converged ? "yes" : "no") << '\n'
           << "eps steps: " << bundle.trace.size() << '\n'
           << "final eps: " << format_double(bundle.final_eps) << '\n'
           << "last increment: " << format_double(bundle.last_increment) << '\n';
    double max_res = 0.0;
    for (const TraceRow& row : bundle.trace) max_res = std::max(max_res, row.residual);
    report << "max residual: " << format_double(max_res) << '\n'
           << "max |u|: " << format_double(umax) << '\n'
           << "variation(mu): " << format_double(var) << '\n'
           << "flux dual norm: " << format_double(flux_dual_norm(g, problem.mu)) << '\n';
    double nu_mass = 0.0;
    for (double v : bundle.nu) nu_mass += std::abs(v);
    report << "singular mass |nu|: " << format_double(nu_mass * g.cell_volume()) << '\n';
    if (cfg.verify.exact) {
      double err = 0.0;
      for (std::size_t node = 0; node < g.size(); ++node)
        err = std::max(err, std::abs(bundle.u[node] - (g.on_boundary(node) ? 0.0 : (*cfg.verify.exact)(g.position(node)))));
      report << "max error vs exact: " << format_double(err) << '\n';
    }
    report << "estimate table (k, truncation energy, variation * k / lambda):\n";
    for (double factor : cfg.verify.k_factors) {
      const double k = factor * (umax > 0.0 ? umax : 1.0);
      report << "  " << format_double(k) << ' ' << format_double(estimate_truncation_energy(bundle, k)) << ' '
             << format_double(var * k / problem.field.coercivity()) << '\n';
    }
    auto out = open_output(out_dir / "report.txt");
    out << report.str();
    if (!flags.quiet) log << report.str();
    return kOk;
  });
}

int cmd_capacity(const fs::path& config, const fs::path& out_dir, const CommonFlags& flags, std::ostream& log,
              std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig cfg = load_config(config);
    if (!cfg.capacity) throw ConfigError(cfg.file, 0, "capacity.set", "the capacity command needs a [capacity] section");
    const std::vector<int>& refine = cfg.capacity->refine;
    std::vector<double> values(refine.size());
    auto compute = [&](std::size_t i) {
      const Grid g = cfg.make_grid(std::vector<int>(cfg.nodes.size(), refine[i]));
      values[i] = capacity_compact(g, cfg.capacity_set(g));
    };
    const auto workers = static_cast<std::size_t>(thread_cap());
    for (std::size_t start = 0; start < refine.size(); start += workers) {
      std::vector<std::future<void>> batch;
      const std::size_t stop = std::min(refine.size(), start + workers);
      for (std::size_t i = start + 1; i < stop; ++i) batch.push_back(std::async(std::launch::async, compute, i));
      compute(start);
      for (auto& f : batch) f.get();
    }
    fs::create_directories(out_dir);
    std::ostringstream table;
    table << "set,n,value\n";
    std::string set = cfg.capacity->kind;
    for (double p : cfg.capacity->params) set += ' ' + format_double(p);
    for (std::size_t i = 0; i < refine.size(); ++i)
      table << set << ',' << refine[i] << ',' << format_double(values[i]) << '\n';
    auto out = open_output(out_dir / "capacity.csv");
    out << table.str();
    if (!flags.quiet) log << table.str();
    return kOk;
  });
}

int cmd_verify(const fs::path& bundle_dir, const fs::path& config, const fs::path& out_dir, const CommonFlags& flags,
               std::ostream& log, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const ExperimentConfig cfg = load_config(config);
    const Problem problem = cfg.make_problem();
    const SolutionBundle bundle = read_bundle(bundle_dir, problem);
    const Grid& g = problem.grid;
    const MonotoneGraph& beta = problem.beta;
    const double umax = bundle.u.max_abs();
    const double var = variation(g, problem.mu);
    const double tol_identity = 1e-6 * (1.0 + var);
    const double tol_contact = 10.0 * cfg.schedule.tol_scheme;
    CheckTable t;

    const InvariantReport inv = bundle_invariants(bundle, tol_contact);
    t.at_most("graph_membership", "nu=0", inv.graph_defect, 1e-6 * (1.0 + max_abs(bundle.w)));
    t.at_most("confinement", "", inv.confinement_violation, tol_contact);
    t.at_most("complementarity", "", inv.complementarity_defect, 1e-8);
    t.at_most("nu_support", "", inv.support_violation, 1e-6);
    t.at_most("nu_off_contact", "", inv.nu_off_contact, 0.0);

    if (cfg.verify.exact) {
      double err = 0.0;
      for (std::size_t node : g.interior())
        err = std::max(err, std::abs(bundle.u[node] - (*cfg.verify.exact)(g.position(node))));
      if (cfg.verify.exact_tol > 0.0) t.at_most("exact_error", "max_norm", err, cfg.verify.exact_tol);
    }

    const double scale = umax > 0.0 ? umax : 1.0;
    for (double factor : cfg.verify.k_factors) {
      const double k = factor * scale;
      t.at_most("truncation_estimate", "k=" + format_double(k), estimate_truncation_energy(bundle, k),
                var / problem.field.coercivity() * k * 1.05);
    }
    const int first_band = static_cast<int>(std::ceil(umax));
    for (int n = first_band; n < first_band + 3; ++n)
      t.at_most("tail_energy", "n=" + std::to_string(n), tail_energy(bundle, n), 0.0);

    const auto family = test_family(g, bundle.u.values(), flags.seed);
    std::vector<double> levels;
    for (double f : cfg.verify.plateau) levels.push_back(f * scale);
    levels.push_back(umax + 1.0);
    for (const TestFunction& xi : family) {
      for (double l : levels)
        t.at_most("renormalized", "xi=" + xi.name + " l=" + format_double(l),
                  renormalized_residual(bundle, l, xi.values), tol_identity);
      const double near = renormalized_residual(bundle, umax + 1.0, xi.values);
      const double far = renormalized_residual(bundle, umax + 10.0, xi.values);
      t.at_most("weak_form_limit", "xi=" + xi.name, std::abs(near - far), 1e-12);

      NodalArray clipped = xi.values;
      for (double& v : clipped) v = std::clamp(v, beta.dom_lo(), beta.dom_hi());
      for (double k : cfg.verify.entropy_k)
        t.at_most("entropy", "xi=" + xi.name + " k=" + format_double(k), entropy_residual(bundle, clipped, k),
                  tol_identity);

      if (cfg.verify.concentration && xi.nonnegative) {
        if (beta.bounded_above())
          t.at_least("concentration_above", "xi=" + xi.name + " lambda=" + format_double(beta.dom_hi()),
                     concentration_check(bundle, beta.dom_hi(), Side::Above, xi.values).limit, -tol_identity);
        if (beta.bounded_below())
          t.at_most("concentration_below", "xi=" + xi.name + " lambda=" + format_double(beta.dom_lo()),
                    concentration_check(bundle, beta.dom_lo(), Side::Below, xi.values).limit, tol_identity);
      }
    }

    double previous = std::numeric_limits<double>::infinity();
    const auto exponent = decay_exponent(g);
    for (int j = 4; j >= 0; --j) {
      const double k = scale * std::ldexp(1.0, -j);
      const LevelSetMeasure m = level_set_decay(bundle, k);
      t.at_most("level_set_monotone", "k=" + format_double(k), m.value_above, previous);
      previous = m.value_above;
      if (exponent)
        t.at_most("level_set_decay", "k=" + format_double(k) + " p1=" + format_double(*exponent),
                  m.value_above * std::pow(k, *exponent), std::numeric_limits<double>::max());
    }

    const UniquenessReport uq =
        solve_twice_uniqueness(problem, cfg.schedule, flags.seed, cfg.scheme_options(), thread_cap());
    t.at_most("uniqueness_u", "max_norm", uq.u_difference, 1e-8);
    t.at_most("uniqueness_w", "max_norm_off_contact", uq.w_difference, 1e-8);
    t.at_most("uniqueness_nu", "l1", uq.nu_difference, 1e-8);

    fs::create_directories(out_dir);
    auto out = open_output(out_dir / "checks.csv");
    out << t.str();
    if (!flags.quiet)
      log << "checks: " << t.count() << " run, " << t.failed() << " failed -> " << (out_dir / "checks.csv").string()
          << '\n';
    return t.all_pass() ? kOk : kNotConverged;
  });
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Anisotropic elliptic inclusions with monotone graphs and measure data"};
  app.require_subcommand(1);
  CommonFlags flags;
  std::string config;
  std::string out_dir;
  std::string bundle_dir;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "Experiment config file")->required();
    sub->add_option("--out", out_dir, "Output directory")->required();
    sub->add_option("--seed", flags.seed, "Seed for randomized test functions and starts");
    sub->add_flag("--quiet", flags.quiet, "Suppress the summary on stdout");
  };
  CLI::App* solve = app.add_subcommand("solve", "Run the epsilon scheme and write the bundle");
  add_common(solve);
  CLI::App* capacity = app.add_subcommand("capacity", "Capacity of the configured set across refinements");
  add_common(capacity);
  CLI::App* verify = app.add_subcommand("verify", "Check a stored bundle against the solution identities");
  add_common(verify);
  verify->add_option("--bundle", bundle_dir, "Directory written by solve")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }
  if (*solve) return cmd_solve(config, out_dir, flags, out, err);
  if (*capacity) return cmd_capacity(config, out_dir, flags, out, err);
  return cmd_verify(bundle_dir, config, out_dir, flags, out, err);
}

}  // namespace anisolve::cli
