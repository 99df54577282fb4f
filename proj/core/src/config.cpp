#include "anisolve/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <set>

#include "anisolve/error.hpp"
#include "anisolve/text.hpp"

namespace anisolve {

namespace {

struct Entry {
  std::string value;
  std::size_t line;
};

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"grid", {"n", "length", "p"}},
      {"operator", {"weight", "weight_1", "weight_2", "offset_1", "offset_2"}},
      {"beta", {"graph"}},
      {"mu", {"f", "F_1", "F_2", "atom"}},
      {"schedule", {"eps0", "rho", "count", "tol_scheme", "tol_res", "max_iter", "delta"}},
      {"output", {"trace_k"}},
      {"verify", {"exact", "exact_tol", "k_factors", "entropy_k", "plateau", "concentration"}},
      {"capacity", {"set", "refine"}},
  };
  return s;
}

class Reader {
 public:
  Reader(std::istream& in, std::string file) : file_(std::move(file)) {
    std::string raw;
    std::string section;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
      ++line;
      std::string_view body = raw;
      if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
      body = text::trim(body);
      if (body.empty()) continue;
      if (body.front() == '[') {
        if (body.back() != ']') fail(line, section, "unterminated section header");
        section = std::string(text::trim(body.substr(1, body.size() - 2)));
        if (!schema().contains(section)) fail(line, section, "unknown section");
        continue;
      }
      const auto eq = body.find('=');
      if (eq == std::string_view::npos) fail(line, section, "expected key = value");
      const std::string key(text::trim(body.substr(0, eq)));
      const std::string value(text::trim(body.substr(eq + 1)));
      const std::string field = section + "." + key;
      if (section.empty()) fail(line, key, "key outside of a section");
      if (!schema().at(section).contains(key)) fail(line, field, "unknown key");
      if (value.empty()) fail(line, field, "empty value");
      if (key == "atom") {
        atoms_.push_back({value, line});
        continue;
      }
      if (entries_.contains(field)) fail(line, field, "repeated key (first set on line " +
                                                          std::to_string(entries_.at(field).line) + ")");
      entries_.emplace(field, Entry{value, line});
    }
    if (in.bad()) fail(line, "", "read error");
  }

  [[noreturn]] void fail(std::size_t line, const std::string& field, const std::string& msg) const {
    throw ConfigError(file_, line, field, msg);
  }

  const Entry* find(const std::string& field) const {
    const auto it = entries_.find(field);
    return it == entries_.end() ? nullptr : &it->second;
  }

  std::size_t line_of(const std::string& field) const {
    const Entry* e = find(field);
    return e ? e->line : 0;
  }

  std::vector<double> numbers(const std::string& field, const std::vector<double>& fallback) const {
    const Entry* e = find(field);
    if (!e) return fallback;
    std::vector<double> out;
    for (const std::string& tok : tokens(e->value)) {
      const auto v = text::parse_double(tok);
      if (!v) fail(e->line, field, "'" + tok + "' is not a number");
      out.push_back(*v);
    }
    return out;
  }

  std::optional<double> number(const std::string& field) const {
    const Entry* e = find(field);
    if (!e) return std::nullopt;
    const auto v = text::parse_double(e->value);
    if (!v) fail(e->line, field, "'" + e->value + "' is not a number");
    return v;
  }

  std::optional<long long> integer(const std::string& field) const {
    const Entry* e = find(field);
    if (!e) return std::nullopt;
    const auto v = text::parse_integer(e->value);
    if (!v) fail(e->line, field, "'" + e->value + "' is not an integer");
    return v;
  }

  std::optional<Expression> expression(const std::string& field) const {
    const Entry* e = find(field);
    if (!e) return std::nullopt;
    try {
      return Expression::parse(e->value);
    } catch (const InvalidInput& err) {
      fail(e->line, field, err.what());
    }
  }

  const std::vector<Entry>& atoms() const noexcept { return atoms_; }
  const std::string& file() const noexcept { return file_; }

  static std::vector<std::string> tokens(std::string_view s) {
    std::string flat(s);
    for (char& c : flat)
      if (c == ',') c = ' ';
    return text::split_whitespace(flat);
  }

 private:
  std::string file_;
  std::map<std::string, Entry> entries_;
  std::vector<Entry> atoms_;
};

template <class T>
std::vector<T> broadcast(const Reader& r, const std::string& field, std::vector<T> v, std::size_t dim) {
  if (v.size() == 1 && dim == 2) v.push_back(v[0]);
  if (v.size() != dim)
    r.fail(r.line_of(field), field, "expected " + std::to_string(dim) + " value(s), got " + std::to_string(v.size()));
  return v;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in, const std::string& file) {
  const Reader r(in, file);
  ExperimentConfig c;
  c.file = file;

  // [grid]
  const Entry* n_entry = r.find("grid.n");
  if (!n_entry) r.fail(0, "grid.n", "missing required key");
  for (const std::string& tok : Reader::tokens(n_entry->value)) {
    const auto v = text::parse_integer(tok);
    if (!v || *v < 3 || *v > 100000) r.fail(n_entry->line, "grid.n", "node counts must be integers in [3, 100000]");
    c.nodes.push_back(static_cast<int>(*v));
  }
  if (!r.find("grid.p")) r.fail(0, "grid.p", "missing required key");
  // The axis count is the longest of the per-axis lists; single values broadcast.
  const std::vector<double> raw_lengths = r.numbers("grid.length", {1.0});
  const std::vector<double> raw_exponents = r.numbers("grid.p", {});
  const std::size_t dim = std::max({c.nodes.size(), raw_lengths.size(), raw_exponents.size()});
  if (dim != 1 && dim != 2) r.fail(n_entry->line, "grid", "grids have one or two axes");
  c.nodes = broadcast(r, "grid.n", c.nodes, dim);
  c.lengths = broadcast(r, "grid.length", raw_lengths, dim);
  c.exponents = broadcast(r, "grid.p", raw_exponents, dim);
  for (double p : c.exponents)
    if (!(p > 1.0) || !std::isfinite(p)) r.fail(r.line_of("grid.p"), "grid.p", "every exponent must satisfy 1 < p < inf");
  for (double l : c.lengths)
    if (!(l > 0.0) || !std::isfinite(l)) r.fail(r.line_of("grid.length"), "grid.length", "lengths must be positive");

  // [operator]
  const auto common_weight = r.expression("operator.weight");
  for (std::size_t a = 0; a < dim; ++a) {
    const std::string axis = std::to_string(a + 1);
    auto w = r.expression("operator.weight_" + axis);
    if (w && common_weight) r.fail(r.line_of("operator.weight_" + axis), "operator.weight_" + axis,
                                   "conflicts with operator.weight");
    auto d = r.expression("operator.offset_" + axis);
    if (w || common_weight || d) {
      c.weights.resize(dim, Expression::constant(1.0));
      c.offsets.resize(dim, Expression::constant(0.0));
      if (w) c.weights[a] = *w;
      else if (common_weight) c.weights[a] = *common_weight;
      if (d) c.offsets[a] = *d;
    }
  }
  if (dim == 1)
    for (const char* k : {"operator.weight_2", "operator.offset_2", "mu.F_2"})
      if (r.find(k)) r.fail(r.line_of(k), k, "second axis given for a one-dimensional grid");

  // [beta]
  if (const Entry* e = r.find("beta.graph")) {
    try {
      (void)MonotoneGraph::parse(e->value);
    } catch (const InvalidInput& err) {
      r.fail(e->line, "beta.graph", err.what());
    }
    c.graph = e->value;
  }

  // [mu]
  if (auto f = r.expression("mu.f")) c.f = *f;
  for (std::size_t a = 0; a < dim; ++a) {
    const auto fa = r.expression("mu.F_" + std::to_string(a + 1));
    c.flux.push_back(fa ? *fa : Expression::constant(0.0));
  }
  for (const Entry& atom : r.atoms()) {
    if (dim != 1)
      r.fail(atom.line, "mu.atom",
             "point masses are rejected in two dimensions: a point has zero capacity, so a Dirac mass is not a "
             "diffuse measure");
    std::string_view v = atom.value;
    if (v.size() < 2 || v.front() != '(' || v.back() != ')') r.fail(atom.line, "mu.atom", "expected (x, weight)");
    const auto parts = text::split(v.substr(1, v.size() - 2), ',');
    const auto x = parts.size() == 2 ? text::parse_double(parts[0]) : std::nullopt;
    const auto w = parts.size() == 2 ? text::parse_double(parts[1]) : std::nullopt;
    if (!x || !w || !std::isfinite(*w)) r.fail(atom.line, "mu.atom", "expected (x, weight) with finite numbers");
    if (!(*x > 0.0 && *x < c.lengths[0])) r.fail(atom.line, "mu.atom", "atom position must lie inside the domain");
    c.atoms.emplace_back(*x, *w);
  }

  // [schedule]
  if (auto v = r.number("schedule.eps0")) c.schedule.eps0 = *v;
  if (auto v = r.number("schedule.rho")) c.schedule.factor = *v;
  if (auto v = r.integer("schedule.count")) {
    if (*v < 1 || *v > 200) r.fail(r.line_of("schedule.count"), "schedule.count", "count must lie in [1, 200]");
    c.schedule.count = static_cast<int>(*v);
  }
  if (auto v = r.number("schedule.tol_scheme")) c.schedule.tol_scheme = *v;
  try {
    c.schedule.validate();
  } catch (const InvalidInput& err) {
    r.fail(r.line_of("schedule.eps0"), "schedule", err.what());
  }
  if (auto v = r.number("schedule.tol_res")) {
    if (!(*v > 0.0)) r.fail(r.line_of("schedule.tol_res"), "schedule.tol_res", "must be positive");
    c.inner.tol_res_factor = *v;
  }
  if (auto v = r.integer("schedule.max_iter")) {
    if (*v < 1) r.fail(r.line_of("schedule.max_iter"), "schedule.max_iter", "must be positive");
    c.inner.max_iter = static_cast<int>(*v);
  }
  if (auto v = r.number("schedule.delta")) {
    if (!(*v > 0.0)) r.fail(r.line_of("schedule.delta"), "schedule.delta", "must be positive");
    c.inner.delta = *v;
  }

  // [output]
  c.trace_k = r.numbers("output.trace_k", {});
  for (double k : c.trace_k)
    if (!(k > 0.0)) r.fail(r.line_of("output.trace_k"), "output.trace_k", "levels must be positive");

  // [verify]
  c.verify.exact = r.expression("verify.exact");
  if (auto v = r.number("verify.exact_tol")) c.verify.exact_tol = *v;
  c.verify.k_factors = r.numbers("verify.k_factors", c.verify.k_factors);
  c.verify.entropy_k = r.numbers("verify.entropy_k", c.verify.entropy_k);
  c.verify.plateau = r.numbers("verify.plateau", c.verify.plateau);
  for (const char* k : {"verify.k_factors", "verify.entropy_k", "verify.plateau"})
    for (double v : r.numbers(k, {}))
      if (!(v > 0.0)) r.fail(r.line_of(k), k, "values must be positive");
  if (const Entry* e = r.find("verify.concentration")) {
    if (e->value != "on" && e->value != "off") r.fail(e->line, "verify.concentration", "expected on or off");
    c.verify.concentration = e->value == "on";
  }

  // [capacity]
  if (const Entry* e = r.find("capacity.set")) {
    CapacitySettings cap;
    const auto toks = Reader::tokens(e->value);
    cap.kind = toks.front();
    const std::map<std::string, std::size_t> arity{
        {"empty", 0}, {"point", dim}, {"interval", 2}, {"box", 2 * dim}};
    const auto it = arity.find(cap.kind);
    if (it == arity.end()) r.fail(e->line, "capacity.set", "expected empty, point, interval or box");
    if (cap.kind == "interval" && dim != 1) r.fail(e->line, "capacity.set", "interval sets need a 1D grid");
    for (std::size_t i = 1; i < toks.size(); ++i) {
      const auto v = text::parse_double(toks[i]);
      if (!v) r.fail(e->line, "capacity.set", "'" + toks[i] + "' is not a number");
      cap.params.push_back(*v);
    }
    if (cap.params.size() != it->second)
      r.fail(e->line, "capacity.set", cap.kind + " needs " + std::to_string(it->second) + " coordinate(s)");
    for (double v : r.numbers("capacity.refine", {})) {
      if (v != std::floor(v) || v < 3 || v > 100000)
        r.fail(r.line_of("capacity.refine"), "capacity.refine", "node counts must be integers >= 3");
      cap.refine.push_back(static_cast<int>(v));
    }
    if (cap.refine.empty()) cap.refine.push_back(c.nodes[0]);
    c.capacity = std::move(cap);
  } else if (r.find("capacity.refine")) {
    r.fail(r.line_of("capacity.refine"), "capacity.refine", "refine given without capacity.set");
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, "", "cannot open config file");
  return parse_config(in, path.string());
}

Grid ExperimentConfig::make_grid(const std::optional<std::vector<int>>& override_nodes) const {
  return Grid(override_nodes ? *override_nodes : nodes, lengths, exponents);
}

Problem ExperimentConfig::make_problem() const {
  Grid g = make_grid();
  auto wrap = [](const std::vector<Expression>& exprs) {
    std::vector<std::function<double(std::array<double, 2>)>> fns;
    for (const Expression& e : exprs) fns.emplace_back([e](std::array<double, 2> x) { return e(x); });
    return fns;
  };
  LerayLionsField field = LerayLionsField::model(g);
  try {
    if (!weights.empty()) field = LerayLionsField::weighted(g, wrap(weights), wrap(offsets));
  } catch (const InvalidInput& err) {
    throw ConfigError(file, 0, "operator", err.what());
  }

  NodalArray density(g.size(), 0.0);
  for (std::size_t node = 0; node < g.size(); ++node) density[node] = f(g.position(node));
  FluxField flux_field = FluxField::zero(g);
  for (int axis = 0; axis < g.dim(); ++axis)
    for (std::size_t node = 0; node < g.size(); ++node)
      if (g.has_edge(node, axis)) flux_field.components[axis][node] = flux[axis](g.edge_midpoint(node, axis));
  std::vector<Atom> atom_list;
  for (const auto& [x, w] : atoms) {
    const double pos[1] = {x};
    const std::size_t node = g.nearest_node(pos);
    if (g.on_boundary(node)) throw ConfigError(file, 0, "mu.atom", "atom rounds to a boundary node");
    atom_list.push_back({node, w});
  }
  try {
    MeasureData mu(g, std::move(density), std::move(flux_field), std::move(atom_list));
    return Problem{g, std::move(field), MonotoneGraph::parse(graph), std::move(mu)};
  } catch (const InvalidInput& err) {
    throw ConfigError(file, 0, "mu", err.what());
  }
}

SchemeOptions ExperimentConfig::scheme_options() const {
  SchemeOptions o;
  o.inner = inner;
  o.trace_levels = trace_k;
  return o;
}

NodeSet ExperimentConfig::capacity_set(const Grid& g) const {
  if (!capacity || capacity->kind == "empty") return NodeSet{};
  const auto& p = capacity->params;
  std::vector<std::size_t> nodes;
  if (capacity->kind == "point") {
    nodes.push_back(g.nearest_node(p));
  } else {
    for (std::size_t node = 0; node < g.size(); ++node) {
      bool inside = true;
      for (int a = 0; a < g.dim(); ++a) {
        const double x = g.coordinate(node, a);
        inside = inside && x >= p[2 * a] - 1e-12 && x <= p[2 * a + 1] + 1e-12;
      }
      if (inside) nodes.push_back(node);
    }
  }
  return NodeSet::make(g, std::move(nodes), SetKind::Compact);
}

}  // namespace anisolve
