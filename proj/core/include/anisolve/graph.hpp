#pragma once

// Maximal monotone graphs on the real line, stored as the subdifferential of a
// convex potential j with j(0) = 0.  The graph is described by its domain
// [lo, hi] (either end may be infinite), a strictly increasing list of interior
// breakpoints, and one continuous nondecreasing piece between consecutive
// breakpoints.  Jumps between pieces are vertical segments of the graph; finite
// domain ends carry vertical rays (indicator walls).

#include <string>
#include <string_view>
#include <vector>

namespace anisolve {

/// Closed interval of the extended real line; `lo > hi` encodes the empty set.
struct Interval {
  double lo;
  double hi;

  bool empty() const noexcept { return lo > hi; }
  bool contains(double x) const noexcept { return lo <= x && x <= hi; }
  /// Nearest point of the interval to x.  Undefined on the empty interval.
  double project(double x) const noexcept { return x < lo ? lo : (x > hi ? hi : x); }
};

/// One continuous branch of the graph: a polynomial plus an optional signed
/// power term c * |r|^(q-1) * r.
struct GraphPiece {
  std::vector<double> poly;  ///< ascending coefficients
  double power_coeff = 0.0;
  double power_exp = 1.0;

  double value(double r) const;
  double slope(double r) const;
  /// Antiderivative vanishing at r = 0.
  double primitive(double r) const;
  bool affine() const noexcept;
};

class MonotoneGraph {
 public:
  /// `pieces.size()` must equal `breakpoints.size() + 1`.  Throws InvalidInput
  /// if the data do not describe a maximal monotone graph with 0 in beta(0).
  MonotoneGraph(double lo, double hi, std::vector<double> breakpoints, std::vector<GraphPiece> pieces);

  static MonotoneGraph identity();
  /// beta = 0 on the whole line (j = 0).
  static MonotoneGraph zero();
  /// beta(r) = |r|^(q-1) r.
  static MonotoneGraph power(double q);
  /// Subdifferential of the indicator of [lo, hi].
  static MonotoneGraph indicator(double lo, double hi);

  /// Parses `identity`, `zero`, `power q`, `indicator m M` or
  /// `piecewise m M | c0 c1 ... | t1 | c0 c1 ... | ...`.
  static MonotoneGraph parse(std::string_view text);

  double dom_lo() const noexcept { return lo_; }
  double dom_hi() const noexcept { return hi_; }
  bool bounded_below() const noexcept;
  bool bounded_above() const noexcept;
  const std::vector<double>& breakpoints() const noexcept { return breaks_; }
  const std::vector<GraphPiece>& pieces() const noexcept { return pieces_; }

  /// beta(r) as [j'_-(r), j'_+(r)]; empty outside the domain.
  Interval section(double r) const;
  /// j(r); +infinity outside [lo, hi].
  double potential(double r) const;

  /// Closed span [t_k, t_{k+1}] of piece k.
  Interval piece_span(std::size_t k) const noexcept {
    return {k == 0 ? lo_ : breaks_[k - 1], k == breaks_.size() ? hi_ : breaks_[k]};
  }

 private:
  void validate() const;

  double lo_;
  double hi_;
  std::vector<double> breaks_;
  std::vector<GraphPiece> pieces_;
};

/// Resolvent value together with its derivative in s.
struct ResolventEval {
  double point;
  double derivative;
};

/// J_eps(s) = (I + eps beta)^{-1}(s).
double resolvent(const MonotoneGraph& g, double eps, double s);
ResolventEval resolvent_with_derivative(const MonotoneGraph& g, double eps, double s);

/// beta_eps(s) = (s - J_eps(s)) / eps.
double yosida(const MonotoneGraph& g, double eps, double s);

/// Value and derivative of the Yosida approximation at s.
struct YosidaEval {
  double resolvent;
  double value;
  double slope;
};
YosidaEval yosida_with_slope(const MonotoneGraph& g, double eps, double s);

/// Moreau envelope j_eps(s) = min_r { |s - r|^2 / (2 eps) + j(r) }.
double moreau(const MonotoneGraph& g, double eps, double s);

/// Zero when (r, w) lies on the graph, otherwise the Euclidean distance from
/// (r, w) to the graph in the plane.
double graph_membership_defect(const MonotoneGraph& g, double r, double w);

}  // namespace anisolve
