#include "anisolve/grid.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include "anisolve/error.hpp"
#include "anisolve/random.hpp"
#include "anisolve/text.hpp"

namespace anisolve {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double abs_pow(double x, double p) { return p == 2.0 ? x * x : std::pow(std::abs(x), p); }

// |xi|^(p-2) xi
double model_flux(double xi, double p) {
  if (p == 2.0) return xi;
  return std::copysign(std::pow(std::abs(xi), p - 1.0), xi);
}

}  // namespace

// ---------------------------------------------------------------------------
// Grid

Grid::Grid(std::vector<int> nodes, std::vector<double> lengths, std::vector<double> exponents)
    : nodes_(std::move(nodes)), lengths_(std::move(lengths)), exponents_(std::move(exponents)) {
  const std::size_t n = nodes_.size();
  if (n != 1 && n != 2) throw InvalidInput("grid dimension must be 1 or 2");
  if (lengths_.size() != n || exponents_.size() != n)
    throw InvalidInput("grid needs one node count, length and exponent per axis");
  cell_volume_ = 1.0;
  size_ = 1;
  for (std::size_t a = 0; a < n; ++a) {
    if (nodes_[a] < 3) throw InvalidInput("each axis needs at least 3 nodes");
    if (!(lengths_[a] > 0.0) || !std::isfinite(lengths_[a])) throw InvalidInput("axis lengths must be positive");
    if (!(exponents_[a] > 1.0) || !std::isfinite(exponents_[a]))
      throw InvalidInput("every exponent p_i must satisfy 1 < p_i < infinity");
    spacing_.push_back(lengths_[a] / (nodes_[a] - 1));
    cell_volume_ *= spacing_.back();
    size_ *= static_cast<std::size_t>(nodes_[a]);
  }
  for (std::size_t node = 0; node < size_; ++node)
    if (!on_boundary(node)) interior_.push_back(node);
}

double Grid::mean_exponent() const noexcept {
  double acc = 0.0;
  for (double p : exponents_) acc += 1.0 / p;
  return static_cast<double>(exponents_.size()) / acc;
}

double Grid::min_exponent() const noexcept { return *std::min_element(exponents_.begin(), exponents_.end()); }
double Grid::max_exponent() const noexcept { return *std::max_element(exponents_.begin(), exponents_.end()); }

double Grid::domain_volume() const noexcept {
  return std::accumulate(lengths_.begin(), lengths_.end(), 1.0, std::multiplies<>());
}

std::size_t Grid::index(std::span<const int> c) const {
  if (static_cast<int>(c.size()) != dim()) throw InvalidInput("coordinate count does not match grid dimension");
  std::size_t idx = 0;
  for (int a = dim() - 1; a >= 0; --a) {
    if (c[a] < 0 || c[a] >= nodes_[a]) throw InvalidInput("node coordinate out of range");
    idx = idx * static_cast<std::size_t>(nodes_[a]) + static_cast<std::size_t>(c[a]);
  }
  return idx;
}

std::array<int, 2> Grid::coords(std::size_t node) const {
  if (dim() == 1) return {static_cast<int>(node), 0};
  const auto n0 = static_cast<std::size_t>(nodes_[0]);
  return {static_cast<int>(node % n0), static_cast<int>(node / n0)};
}

double Grid::coordinate(std::size_t node, int axis) const { return coords(node)[axis] * spacing_[axis]; }

std::array<double, 2> Grid::position(std::size_t node) const {
  const auto c = coords(node);
  std::array<double, 2> x{0.0, 0.0};
  for (int a = 0; a < dim(); ++a) x[a] = c[a] * spacing_[a];
  return x;
}

std::array<double, 2> Grid::edge_midpoint(std::size_t node, int axis) const {
  auto x = position(node);
  x[axis] += 0.5 * spacing_[axis];
  return x;
}

bool Grid::on_boundary(std::size_t node) const {
  const auto c = coords(node);
  for (int a = 0; a < dim(); ++a)
    if (c[a] == 0 || c[a] == nodes_[a] - 1) return true;
  return false;
}

bool Grid::has_edge(std::size_t node, int axis) const { return coords(node)[axis] < nodes_[axis] - 1; }

std::size_t Grid::nearest_node(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim()) throw InvalidInput("position dimension does not match grid");
  std::array<int, 2> c{0, 0};
  for (int a = 0; a < dim(); ++a) {
    const double t = x[a] / spacing_[a];
    double i = std::floor(t);
    if (t - i > 0.5) i += 1.0;
    c[a] = static_cast<int>(std::clamp(i, 0.0, static_cast<double>(nodes_[a] - 1)));
  }
  return index(std::span<const int>(c.data(), static_cast<std::size_t>(dim())));
}

bool Grid::same_shape(const Grid& other) const noexcept {
  return nodes_ == other.nodes_ && lengths_ == other.lengths_ && exponents_ == other.exponents_;
}

// ---------------------------------------------------------------------------
// GridFunction / FluxField

GridFunction::GridFunction(const Grid& g, std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() != g.size()) throw InvalidInput("grid function size does not match the grid");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) throw InvalidInput("grid function values must be finite");
    if (g.on_boundary(i) && values_[i] != 0.0) throw InvalidInput("grid function must vanish on the boundary");
  }
}

GridFunction GridFunction::interpolate(const Grid& g, const std::function<double(std::array<double, 2>)>& fn) {
  GridFunction u(g);
  for (std::size_t node : g.interior()) u.values_[node] = fn(g.position(node));
  return u;
}

double GridFunction::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

FluxField FluxField::zero(const Grid& g) {
  return FluxField{std::vector<EdgeArray>(static_cast<std::size_t>(g.dim()), EdgeArray(g.size(), 0.0))};
}

bool FluxField::is_zero() const noexcept {
  for (const auto& c : components)
    for (double v : c)
      if (v != 0.0) return false;
  return true;
}

// ---------------------------------------------------------------------------
// LerayLionsField

LerayLionsField LerayLionsField::model(const Grid& g) {
  LerayLionsField a;
  a.exponents_.assign(g.exponents().begin(), g.exponents().end());
  a.weights_.assign(static_cast<std::size_t>(g.dim()), EdgeArray(g.size(), 1.0));
  a.offsets_.assign(static_cast<std::size_t>(g.dim()), EdgeArray(g.size(), 0.0));
  return a;
}

LerayLionsField LerayLionsField::weighted(
    const Grid& g, const std::vector<std::function<double(std::array<double, 2>)>>& weights,
    const std::vector<std::function<double(std::array<double, 2>)>>& offsets) {
  if (static_cast<int>(weights.size()) != g.dim()) throw InvalidInput("need one weight per axis");
  if (!offsets.empty() && static_cast<int>(offsets.size()) != g.dim())
    throw InvalidInput("need one growth offset per axis");
  LerayLionsField a = model(g);
  a.lambda_ = kInf;
  a.gamma_ = 0.0;
  for (int axis = 0; axis < g.dim(); ++axis) {
    for (std::size_t node = 0; node < g.size(); ++node) {
      if (!g.has_edge(node, axis)) continue;
      const auto x = g.edge_midpoint(node, axis);
      const double w = weights[axis](x);
      if (!(w > 0.0) || !std::isfinite(w)) throw InvalidInput("operator weights must be positive and finite");
      a.weights_[axis][node] = w;
      a.lambda_ = std::min(a.lambda_, w);
      a.gamma_ = std::max(a.gamma_, w);
      if (!offsets.empty()) {
        const double d = offsets[axis](x);
        if (!(d >= 0.0) || !std::isfinite(d)) throw InvalidInput("growth offsets must be nonnegative");
        a.offsets_[axis][node] = d;
      }
    }
  }
  return a;
}

double LerayLionsField::flux(int axis, std::size_t edge, double xi) const {
  return weights_[axis][edge] * model_flux(xi, exponents_[axis]);
}

double LerayLionsField::regularized_slope(int axis, std::size_t edge, double xi, double delta) const {
  const double p = exponents_[axis];
  if (p == 2.0) return weights_[axis][edge];
  const double r2 = xi * xi + delta * delta;
  return weights_[axis][edge] * std::pow(r2, 0.5 * (p - 4.0)) * ((p - 1.0) * xi * xi + delta * delta);
}

double LerayLionsField::secant_slope(int axis, std::size_t edge, double xi, double delta) const {
  const double p = exponents_[axis];
  if (p == 2.0) return weights_[axis][edge];
  return weights_[axis][edge] * std::pow(xi * xi + delta * delta, 0.5 * (p - 2.0));
}

double LerayLionsField::potential(int axis, std::size_t edge, double xi) const {
  const double p = exponents_[axis];
  return weights_[axis][edge] * abs_pow(xi, p) / p;
}

HypothesisReport check_hypotheses(const Grid& g, const LerayLionsField& a, int samples, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::size_t> nodes;
  for (std::size_t node = 0; node < g.size(); ++node) {
    bool all = true;
    for (int axis = 0; axis < g.dim(); ++axis) all = all && g.has_edge(node, axis);
    if (all) nodes.push_back(node);
  }
  HypothesisReport report{kInf, kInf, kInf};
  for (int s = 0; s < samples; ++s) {
    const std::size_t node = nodes[rng.below(nodes.size())];
    double lhs = 0.0;
    double rhs = 0.0;
    double pairing = 0.0;
    double scale = 0.0;
    for (int axis = 0; axis < g.dim(); ++axis) {
      const double p = a.exponent(axis);
      const double xi = rng.uniform(-10.0, 10.0);
      const double eta = rng.uniform(-10.0, 10.0);
      const double axi = a.flux(axis, node, xi);
      lhs += axi * xi;
      rhs += a.coercivity() * abs_pow(xi, p);
      const double bound = a.growth() * (a.offset(axis, node) + std::pow(std::abs(xi), p - 1.0));
      report.growth_margin = std::min(report.growth_margin, (bound - std::abs(axi)) / (1.0 + bound));
      const double diff = (axi - a.flux(axis, node, eta)) * (xi - eta);
      pairing += diff;
      scale += std::abs(diff);
    }
    report.coercivity_margin = std::min(report.coercivity_margin, (lhs - rhs) / (1.0 + rhs));
    report.monotonicity_margin = std::min(report.monotonicity_margin, pairing / (1.0 + scale));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Difference operators and energies

EdgeArray derivative(const Grid& g, std::span<const double> u, int axis) {
  if (axis < 0 || axis >= g.dim()) throw InvalidInput("axis out of range");
  if (u.size() != g.size()) throw InvalidInput("nodal array does not match the grid");
  EdgeArray d(g.size(), 0.0);
  const std::size_t s = g.stride(axis);
  const double inv_h = 1.0 / g.spacing(axis);
  for (std::size_t node = 0; node < g.size(); ++node)
    if (g.has_edge(node, axis)) d[node] = (u[node + s] - u[node]) * inv_h;
  return d;
}

NodalArray negative_divergence(const Grid& g, const FluxField& field) {
  NodalArray out(g.size(), 0.0);
  for (int axis = 0; axis < g.dim(); ++axis) {
    const EdgeArray& c = field.components.at(axis);
    const std::size_t s = g.stride(axis);
    const double inv_h = 1.0 / g.spacing(axis);
    for (std::size_t node : g.interior()) out[node] += (c[node - s] - c[node]) * inv_h;
  }
  return out;
}

double anisotropic_energy(const Grid& g, std::span<const double> u) {
  double acc = 0.0;
  for (int axis = 0; axis < g.dim(); ++axis) {
    const double p = g.exponent(axis);
    const EdgeArray d = derivative(g, u, axis);
    double sum = 0.0;
    for (double v : d) sum += abs_pow(v, p);
    acc += sum / p;
  }
  return acc * g.cell_volume();
}

double field_energy(const Grid& g, const LerayLionsField& a, std::span<const double> u) {
  double acc = 0.0;
  for (int axis = 0; axis < g.dim(); ++axis) {
    const EdgeArray d = derivative(g, u, axis);
    for (std::size_t node = 0; node < g.size(); ++node)
      if (g.has_edge(node, axis)) acc += a.potential(axis, node, d[node]);
  }
  return acc * g.cell_volume();
}

FluxField coefficient_flux(const Grid& g, const LerayLionsField& a, std::span<const double> u) {
  FluxField out = FluxField::zero(g);
  for (int axis = 0; axis < g.dim(); ++axis) {
    const EdgeArray d = derivative(g, u, axis);
    for (std::size_t node = 0; node < g.size(); ++node)
      if (g.has_edge(node, axis)) out.components[axis][node] = a.flux(axis, node, d[node]);
  }
  return out;
}

GridFunction apply_operator(const Grid& g, const LerayLionsField& a, std::span<const double> u) {
  return GridFunction(g, negative_divergence(g, coefficient_flux(g, a, u)));
}

double lq_norm(const Grid& g, std::span<const double> u, double q) {
  double acc = 0.0;
  for (double v : u) acc += abs_pow(v, q);
  return std::pow(acc * g.cell_volume(), 1.0 / q);
}

double edge_norm(const Grid& g, std::span<const double> edges, int axis, double p) {
  double acc = 0.0;
  for (std::size_t node = 0; node < edges.size(); ++node)
    if (g.has_edge(node, axis)) acc += abs_pow(edges[node], p);
  return std::pow(acc * g.cell_volume(), 1.0 / p);
}

EmbeddingReport check_embeddings(const Grid& g, std::span<const double> u, double q) {
  if (!(q >= 1.0)) throw InvalidInput("embedding exponent q must be at least 1");
  EmbeddingReport r;
  r.q = q;
  r.lq_norm = lq_norm(g, u, q);
  auto ratio = [&](double num, double den) { return num == 0.0 ? 0.0 : num / den; };
  double sum = 0.0;
  for (int axis = 0; axis < g.dim(); ++axis) {
    const double n = edge_norm(g, derivative(g, u, axis), axis, g.exponent(axis));
    r.axis_ratios.push_back(ratio(r.lq_norm, n));
    sum += n;
  }
  r.sum_ratio = ratio(r.lq_norm, sum);
  const double n_dim = g.dim();
  const double pbar = g.mean_exponent();
  if (pbar < n_dim)
    r.critical_exponent = std::max(n_dim * pbar / (n_dim - pbar), g.max_exponent());
  else
    r.critical_exponent = kInf;
  r.supercritical = q > r.critical_exponent;
  return r;
}

// ---------------------------------------------------------------------------
// CSV

void write_csv(std::ostream& out, const Grid& g, std::span<const double> values) {
  static constexpr const char* kAxes[] = {"x", "y"};
  static constexpr const char* kIndex[] = {"i", "j"};
  out << "# axes=";
  for (int a = 0; a < g.dim(); ++a) out << (a ? "," : "") << kAxes[a];
  out << " n=";
  for (int a = 0; a < g.dim(); ++a) out << (a ? "," : "") << g.nodes(a);
  out << " h=";
  for (int a = 0; a < g.dim(); ++a) out << (a ? "," : "") << text::format_double(g.spacing(a));
  out << '\n';
  for (int a = 0; a < g.dim(); ++a) out << kIndex[a] << ',';
  out << "value\n";
  for (std::size_t node = 0; node < g.size(); ++node) {
    const auto c = g.coords(node);
    for (int a = 0; a < g.dim(); ++a) out << c[a] << ',';
    out << text::format_double(values[node]) << '\n';
  }
}

std::vector<double> read_csv(std::istream& in, const Grid& g) {
  std::vector<double> values(g.size(), 0.0);
  std::vector<bool> seen(g.size(), false);
  std::string line;
  bool header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = text::trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      const auto pos = t.find("n=");
      if (pos != std::string_view::npos) {
        const auto rest = t.substr(pos + 2);
        const auto counts = text::split(rest.substr(0, rest.find(' ')), ',');
        if (static_cast<int>(counts.size()) != g.dim())
          throw InvalidInput("csv grid dimension does not match the configuration");
        for (int a = 0; a < g.dim(); ++a)
          if (text::parse_integer(counts[a]) != g.nodes(a))
            throw InvalidInput("csv node counts do not match the configuration");
      }
      continue;
    }
    if (!header) {
      header = true;
      continue;
    }
    const auto fields = text::split(t, ',');
    if (static_cast<int>(fields.size()) != g.dim() + 1)
      throw InvalidInput("csv line " + std::to_string(line_no) + ": wrong field count");
    std::array<int, 2> c{0, 0};
    for (int a = 0; a < g.dim(); ++a) {
      const auto v = text::parse_integer(fields[a]);
      if (!v) throw InvalidInput("csv line " + std::to_string(line_no) + ": bad index");
      c[a] = static_cast<int>(*v);
    }
    const auto v = text::parse_double(fields.back());
    if (!v) throw InvalidInput("csv line " + std::to_string(line_no) + ": bad value");
    const std::size_t node = g.index(std::span<const int>(c.data(), static_cast<std::size_t>(g.dim())));
    values[node] = *v;
    seen[node] = true;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) throw InvalidInput("csv does not cover every node");
  return values;
}

}  // namespace anisolve
