#pragma once

// Tensor-product finite-difference grids on boxes (0, L_1) x ... x (0, L_N),
// N in {1, 2}, with homogeneous Dirichlet data.  Nodal arrays are indexed with
// axis 0 running fastest.  Edge arrays (per-axis forward differences, fluxes)
// are stored at the index of their lower node; slots for nodes on the last
// layer of an axis carry no edge and stay zero.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace anisolve {

using NodalArray = std::vector<double>;
using EdgeArray = std::vector<double>;

class Grid {
 public:
  Grid(std::vector<int> nodes, std::vector<double> lengths, std::vector<double> exponents);

  int dim() const noexcept { return static_cast<int>(nodes_.size()); }
  int nodes(int axis) const { return nodes_.at(axis); }
  double length(int axis) const { return lengths_.at(axis); }
  double spacing(int axis) const { return spacing_.at(axis); }
  double exponent(int axis) const { return exponents_.at(axis); }
  std::span<const double> exponents() const noexcept { return exponents_; }

  /// Harmonic mean of the exponents.
  double mean_exponent() const noexcept;
  double min_exponent() const noexcept;
  double max_exponent() const noexcept;

  double cell_volume() const noexcept { return cell_volume_; }
  double domain_volume() const noexcept;
  std::size_t size() const noexcept { return size_; }
  std::size_t stride(int axis) const { return axis == 0 ? 1 : static_cast<std::size_t>(nodes_[0]); }

  std::size_t index(std::span<const int> coords) const;
  std::array<int, 2> coords(std::size_t node) const;
  double coordinate(std::size_t node, int axis) const;
  std::array<double, 2> position(std::size_t node) const;
  std::array<double, 2> edge_midpoint(std::size_t node, int axis) const;

  bool on_boundary(std::size_t node) const;
  bool has_edge(std::size_t node, int axis) const;
  const std::vector<std::size_t>& interior() const noexcept { return interior_; }
  /// Node closest to x; ties resolve to the lower index.
  std::size_t nearest_node(std::span<const double> x) const;

  bool same_shape(const Grid& other) const noexcept;

 private:
  std::vector<int> nodes_;
  std::vector<double> lengths_;
  std::vector<double> exponents_;
  std::vector<double> spacing_;
  double cell_volume_ = 0.0;
  std::size_t size_ = 0;
  std::vector<std::size_t> interior_;
};

/// Nodal values with zero Dirichlet trace.
class GridFunction {
 public:
  GridFunction() = default;
  explicit GridFunction(const Grid& g) : values_(g.size(), 0.0) {}
  /// Throws InvalidInput if a boundary value is nonzero or a value is not finite.
  GridFunction(const Grid& g, std::vector<double> values);

  /// Samples fn at interior nodes; boundary nodes are set to zero.
  static GridFunction interpolate(const Grid& g, const std::function<double(std::array<double, 2>)>& fn);

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  const std::vector<double>& vector() const noexcept { return values_; }

  double max_abs() const noexcept;

  friend bool operator==(const GridFunction&, const GridFunction&) = default;

 private:
  std::vector<double> values_;
};

/// One edge array per axis (fluxes F, coefficient fields a(x, Du)).
struct FluxField {
  std::vector<EdgeArray> components;

  static FluxField zero(const Grid& g);
  bool is_zero() const noexcept;
};

/// Leray-Lions coefficients a_i(x, xi) = omega_i(x) |xi|^(p_i - 2) xi with
/// positive edge weights omega_i and growth offsets d_i(x) >= 0 used by the
/// growth hypothesis check.
class LerayLionsField {
 public:
  /// Unit weights, zero offsets.
  static LerayLionsField model(const Grid& g);
  /// Weight and offset callables are evaluated at edge midpoints.
  static LerayLionsField weighted(const Grid& g,
                                  const std::vector<std::function<double(std::array<double, 2>)>>& weights,
                                  const std::vector<std::function<double(std::array<double, 2>)>>& offsets = {});

  int dim() const noexcept { return static_cast<int>(exponents_.size()); }
  double exponent(int axis) const { return exponents_.at(axis); }
  double weight(int axis, std::size_t edge) const { return weights_[axis][edge]; }
  double offset(int axis, std::size_t edge) const { return offsets_[axis][edge]; }

  /// Lower and upper weight bounds (coercivity and growth constants).
  double coercivity() const noexcept { return lambda_; }
  double growth() const noexcept { return gamma_; }

  double flux(int axis, std::size_t edge, double xi) const;
  /// Derivative of omega (xi^2 + delta^2)^((p-2)/2) xi in xi.
  double regularized_slope(int axis, std::size_t edge, double xi, double delta) const;
  /// omega (xi^2 + delta^2)^((p-2)/2), the secant slope of the regularized flux.
  double secant_slope(int axis, std::size_t edge, double xi, double delta) const;
  /// omega / p |xi|^p, the edge potential whose derivative is flux().
  double potential(int axis, std::size_t edge, double xi) const;

 private:
  std::vector<double> exponents_;
  std::vector<EdgeArray> weights_;
  std::vector<EdgeArray> offsets_;
  double lambda_ = 1.0;
  double gamma_ = 1.0;
};

/// Worst-case relative margins of the structural hypotheses on random samples;
/// each is nonnegative up to rounding when the hypothesis holds on every sample.
struct HypothesisReport {
  double coercivity_margin;
  double growth_margin;
  double monotonicity_margin;
};
HypothesisReport check_hypotheses(const Grid& g, const LerayLionsField& a, int samples, std::uint64_t seed);

/// Forward difference along `axis` on each edge.
EdgeArray derivative(const Grid& g, std::span<const double> u, int axis);

/// Nodal values of -div_h G at interior nodes (zero on the boundary).
NodalArray negative_divergence(const Grid& g, const FluxField& field);

/// Sum_i (1/p_i) Sum_edges |D^i u|^{p_i} times the cell volume.
double anisotropic_energy(const Grid& g, std::span<const double> u);
/// Same with the weighted field potential.
double field_energy(const Grid& g, const LerayLionsField& a, std::span<const double> u);

/// a(x, D_h u) on every edge.
FluxField coefficient_flux(const Grid& g, const LerayLionsField& a, std::span<const double> u);

/// -div_h a(x, D_h u) at interior nodes.
GridFunction apply_operator(const Grid& g, const LerayLionsField& a, std::span<const double> u);

/// Discrete L^q norm over the nodes.
double lq_norm(const Grid& g, std::span<const double> u, double q);
/// Discrete L^p norm of an edge array.
double edge_norm(const Grid& g, std::span<const double> edges, int axis, double p);

struct EmbeddingReport {
  double q;
  double lq_norm;
  std::vector<double> axis_ratios;  ///< ||u||_q / ||D^i u||_{p_i}
  double sum_ratio;                 ///< ||u||_q / sum_i ||D^i u||_{p_i}
  double critical_exponent;         ///< +inf when the mean exponent is >= N
  bool supercritical;
};
EmbeddingReport check_embeddings(const Grid& g, std::span<const double> u, double q);

/// CSV serialization: a `# axes=... n=... h=...` comment, a column header and
/// one `index..., value` row per node.
void write_csv(std::ostream& out, const Grid& g, std::span<const double> values);
/// Reads values written by write_csv; throws InvalidInput on shape mismatch.
std::vector<double> read_csv(std::istream& in, const Grid& g);

}  // namespace anisolve
