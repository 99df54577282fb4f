#include "anisolve/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "anisolve/error.hpp"
#include "anisolve/text.hpp"

namespace anisolve {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMachEps = std::numeric_limits<double>::epsilon();

double signed_power(double r, double q) { return std::copysign(std::pow(std::abs(r), q), r); }

}  // namespace

// ---------------------------------------------------------------------------
// GraphPiece

double GraphPiece::value(double r) const {
  double acc = 0.0;
  for (auto it = poly.rbegin(); it != poly.rend(); ++it) acc = acc * r + *it;
  if (power_coeff != 0.0) acc += power_coeff * signed_power(r, power_exp);
  return acc;
}

double GraphPiece::slope(double r) const {
  double acc = 0.0;
  for (std::size_t k = poly.size(); k-- > 1;) acc = acc * r + static_cast<double>(k) * poly[k];
  if (power_coeff != 0.0) {
    if (power_exp == 1.0)
      acc += power_coeff;
    else
      acc += power_coeff * power_exp * std::pow(std::abs(r), power_exp - 1.0);
  }
  return acc;
}

double GraphPiece::primitive(double r) const {
  double acc = 0.0;
  for (std::size_t k = poly.size(); k-- > 0;) acc = acc * r + poly[k] / static_cast<double>(k + 1);
  acc *= r;
  if (power_coeff != 0.0) acc += power_coeff * std::pow(std::abs(r), power_exp + 1.0) / (power_exp + 1.0);
  return acc;
}

bool GraphPiece::affine() const noexcept {
  if (power_coeff != 0.0 && power_exp != 1.0) return false;
  for (std::size_t k = 2; k < poly.size(); ++k)
    if (poly[k] != 0.0) return false;
  return true;
}

// ---------------------------------------------------------------------------
// MonotoneGraph

MonotoneGraph::MonotoneGraph(double lo, double hi, std::vector<double> breakpoints,
                             std::vector<GraphPiece> pieces)
    : lo_(lo), hi_(hi), breaks_(std::move(breakpoints)), pieces_(std::move(pieces)) {
  validate();
}

void MonotoneGraph::validate() const {
  if (std::isnan(lo_) || std::isnan(hi_) || !(lo_ <= 0.0 && 0.0 <= hi_))
    throw InvalidInput("graph domain must satisfy m <= 0 <= M");
  if (!(lo_ < hi_)) throw InvalidInput("graph domain must have nonempty interior");
  if (lo_ == kInf || hi_ == -kInf) throw InvalidInput("graph domain endpoints are inverted infinities");
  if (pieces_.size() != breaks_.size() + 1) throw InvalidInput("graph needs one more piece than breakpoints");
  for (std::size_t k = 0; k < breaks_.size(); ++k) {
    const double t = breaks_[k];
    if (!std::isfinite(t) || !(t > lo_ && t < hi_)) throw InvalidInput("graph breakpoints must lie inside the domain");
    if (k > 0 && !(t > breaks_[k - 1])) throw InvalidInput("graph breakpoints must be strictly increasing");
  }
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    const GraphPiece& piece = pieces_[k];
    if (piece.power_coeff != 0.0 && !(piece.power_exp > 0.0))
      throw InvalidInput("signed power exponent must be positive");
    const Interval span = piece_span(k);
    double a = span.lo;
    double b = span.hi;
    if (!std::isfinite(a)) a = (std::isfinite(b) ? std::min(b, 0.0) : 0.0) - 1.0e3;
    if (!std::isfinite(b)) b = std::max(a, 0.0) + 1.0e3;
    constexpr int kSamples = 1000;
    double prev = piece.value(a);
    if (!std::isfinite(prev)) throw InvalidInput("graph piece is not finite on its span");
    for (int i = 1; i <= kSamples; ++i) {
      const double t = a + (b - a) * static_cast<double>(i) / kSamples;
      const double v = piece.value(t);
      if (!std::isfinite(v)) throw InvalidInput("graph piece is not finite on its span");
      if (v < prev - 1e-12 * (1.0 + std::abs(prev)))
        throw InvalidInput("graph piece " + std::to_string(k) + " is decreasing (not a monotone graph)");
      prev = v;
    }
  }
  for (std::size_t k = 0; k < breaks_.size(); ++k) {
    const double t = breaks_[k];
    if (pieces_[k].value(t) > pieces_[k + 1].value(t) + 1e-12 * (1.0 + std::abs(pieces_[k].value(t))))
      throw InvalidInput("graph jumps downward at breakpoint " + text::format_double(t));
  }
  if (!section(0.0).contains(0.0)) throw InvalidInput("graph must satisfy 0 in beta(0)");
}

MonotoneGraph MonotoneGraph::identity() {
  return MonotoneGraph(-kInf, kInf, {}, {GraphPiece{{0.0, 1.0}}});
}

MonotoneGraph MonotoneGraph::zero() { return MonotoneGraph(-kInf, kInf, {}, {GraphPiece{{0.0}}}); }

MonotoneGraph MonotoneGraph::power(double q) {
  if (!(q > 0.0) || !std::isfinite(q)) throw InvalidInput("power graph needs q > 0");
  if (q == 1.0) return identity();
  return MonotoneGraph(-kInf, kInf, {}, {GraphPiece{{}, 1.0, q}});
}

MonotoneGraph MonotoneGraph::indicator(double lo, double hi) {
  return MonotoneGraph(lo, hi, {}, {GraphPiece{{0.0}}});
}

MonotoneGraph MonotoneGraph::parse(std::string_view description) {
  // '|' is emitted as its own token.
  std::string spaced;
  for (char c : description) {
    if (c == '|')
      spaced += " | ";
    else
      spaced += c;
  }
  const auto tokens = text::split_whitespace(spaced);
  if (tokens.empty()) throw InvalidInput("empty graph description");
  auto number = [&](std::size_t i) {
    if (i >= tokens.size()) throw InvalidInput("graph description '" + std::string(description) + "' is truncated");
    const auto v = text::parse_double(tokens[i]);
    if (!v) throw InvalidInput("graph description: '" + tokens[i] + "' is not a number");
    return *v;
  };
  const std::string& kind = tokens[0];
  if (kind == "identity" && tokens.size() == 1) return identity();
  if (kind == "zero" && tokens.size() == 1) return zero();
  if (kind == "power" && tokens.size() == 2) return power(number(1));
  if (kind == "indicator" && tokens.size() == 3) return indicator(number(1), number(2));
  if (kind == "piecewise") {
    const double lo = number(1);
    const double hi = number(2);
    std::vector<std::vector<double>> fields;
    std::size_t i = 3;
    while (i < tokens.size()) {
      if (tokens[i] != "|") throw InvalidInput("piecewise graph: expected '|' before '" + tokens[i] + "'");
      ++i;
      std::vector<double> field;
      while (i < tokens.size() && tokens[i] != "|") field.push_back(number(i++));
      if (field.empty()) throw InvalidInput("piecewise graph: empty field");
      fields.push_back(std::move(field));
    }
    if (fields.size() % 2 == 0) throw InvalidInput("piecewise graph: expected pieces separated by breakpoints");
    std::vector<double> breaks;
    std::vector<GraphPiece> pieces;
    for (std::size_t f = 0; f < fields.size(); ++f) {
      if (f % 2 == 0) {
        pieces.push_back(GraphPiece{fields[f]});
      } else {
        if (fields[f].size() != 1) throw InvalidInput("piecewise graph: a breakpoint is a single number");
        breaks.push_back(fields[f][0]);
      }
    }
    return MonotoneGraph(lo, hi, std::move(breaks), std::move(pieces));
  }
  throw InvalidInput("unknown graph description '" + std::string(description) + "'");
}

Interval MonotoneGraph::section(double r) const {
  if (std::isnan(r) || r < lo_ || r > hi_) return {kInf, -kInf};
  if (r == lo_) return {-kInf, pieces_.front().value(r)};
  if (r == hi_) return {pieces_.back().value(r), kInf};
  const auto it = std::lower_bound(breaks_.begin(), breaks_.end(), r);
  const auto k = static_cast<std::size_t>(it - breaks_.begin());
  if (it != breaks_.end() && *it == r) return {pieces_[k].value(r), pieces_[k + 1].value(r)};
  const double v = pieces_[k].value(r);
  return {v, v};
}

double MonotoneGraph::potential(double r) const {
  if (std::isnan(r) || r < lo_ || r > hi_) return kInf;
  double acc = 0.0;
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    const Interval span = piece_span(k);
    if (r >= 0.0) {
      const double a = std::max(span.lo, 0.0);
      const double b = std::min(span.hi, r);
      if (a < b) acc += pieces_[k].primitive(b) - pieces_[k].primitive(a);
    } else {
      const double a = std::max(span.lo, r);
      const double b = std::min(span.hi, 0.0);
      if (a < b) acc -= pieces_[k].primitive(b) - pieces_[k].primitive(a);
    }
  }
  return acc;
}

bool MonotoneGraph::bounded_above() const noexcept { return std::isfinite(hi_); }
bool MonotoneGraph::bounded_below() const noexcept { return std::isfinite(lo_); }

// ---------------------------------------------------------------------------
// Resolvent and friends

namespace {

// Solves r + eps * piece(r) = s on the open span, where the left side is
// continuous and strictly increasing and the root is known to lie inside.
ResolventEval solve_on_piece(const GraphPiece& piece, Interval span, double eps, double s) {
  if (piece.affine()) {
    const double c0 = piece.poly.empty() ? 0.0 : piece.poly[0];
    double c1 = piece.poly.size() > 1 ? piece.poly[1] : 0.0;
    if (piece.power_coeff != 0.0) c1 += piece.power_coeff;
    const double r = (s - eps * c0) / (1.0 + eps * c1);
    return {span.project(r), 1.0 / (1.0 + eps * c1)};
  }
  auto phi = [&](double r) { return r + eps * piece.value(r) - s; };

  double lo = span.lo;
  double hi = span.hi;
  if (!std::isfinite(lo)) {
    double t = std::isfinite(hi) ? std::min(hi, s) : s;
    double step = std::max(1.0, std::abs(t));
    while (phi(t) > 0.0) {
      t -= step;
      step *= 2.0;
    }
    lo = t;
  }
  if (!std::isfinite(hi)) {
    double t = std::max(lo, s);
    double step = std::max(1.0, std::abs(t));
    while (phi(t) < 0.0) {
      t += step;
      step *= 2.0;
    }
    hi = t;
  }

  double x = std::clamp(s, lo, hi);
  if (x == lo || x == hi) x = 0.5 * (lo + hi);
  for (int it = 0; it < 400; ++it) {
    const double f = phi(x);
    if (f == 0.0) break;
    if (f > 0.0)
      hi = x;
    else
      lo = x;
    const double d = 1.0 + eps * piece.slope(x);
    double next = x - f / d;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double scale = std::max(std::abs(lo), std::abs(hi));
    if (std::abs(next - x) <= 4.0 * kMachEps * std::abs(x) || hi - lo <= 2.0 * kMachEps * scale) {
      x = next;
      break;
    }
    x = next;
  }
  x = span.project(x);
  return {x, 1.0 / (1.0 + eps * piece.slope(x))};
}

/// Resolvent together with the index of the piece whose interior holds it;
/// `piece` is npos when the point is pinned to a breakpoint or a wall.
struct Located {
  ResolventEval eval;
  std::size_t piece;
};

constexpr std::size_t kPinned = static_cast<std::size_t>(-1);

Located locate(const MonotoneGraph& g, double eps, double s) {
  if (!(eps > 0.0)) throw InvalidInput("resolvent needs eps > 0");
  const auto& pieces = g.pieces();
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    const Interval span = g.piece_span(k);
    // Vertical part of the graph at the left end of this piece.
    if (std::isfinite(span.lo)) {
      const double top = span.lo + eps * pieces[k].value(span.lo);
      if (s <= top) return {{span.lo, 0.0}, kPinned};
    }
    const double right = std::isfinite(span.hi) ? span.hi + eps * pieces[k].value(span.hi) : kInf;
    if (s < right) return {solve_on_piece(pieces[k], span, eps, s), k};
  }
  // Beyond the last piece: the right wall of a bounded domain.
  return {{g.dom_hi(), 0.0}, kPinned};
}

}  // namespace

ResolventEval resolvent_with_derivative(const MonotoneGraph& g, double eps, double s) { return locate(g, eps, s).eval; }

double resolvent(const MonotoneGraph& g, double eps, double s) { return locate(g, eps, s).eval.point; }

YosidaEval yosida_with_slope(const MonotoneGraph& g, double eps, double s) {
  const Located at = locate(g, eps, s);
  const double j = at.eval.point;
  if (at.piece == kPinned) return {j, (s - j) / eps, 1.0 / eps};
  // On a piece, beta_eps(s) = beta(J_eps(s)), evaluated on the piece itself.
  const GraphPiece& piece = g.pieces()[at.piece];
  const double b = piece.slope(j);
  const double slope = std::isfinite(b) ? b / (1.0 + eps * b) : 1.0 / eps;
  return {j, piece.value(j), slope};
}

double yosida(const MonotoneGraph& g, double eps, double s) { return yosida_with_slope(g, eps, s).value; }

double moreau(const MonotoneGraph& g, double eps, double s) {
  const double r = resolvent(g, eps, s);
  const double d = s - r;
  return d * d / (2.0 * eps) + g.potential(r);
}

namespace {

double distance_to_interval(double x, Interval iv) {
  if (x < iv.lo) return iv.lo - x;
  if (x > iv.hi) return x - iv.hi;
  return 0.0;
}

// Distance from (r, w) to the curve {(t, piece(t)) : t in window}.
double distance_to_curve(const GraphPiece& piece, Interval window, double r, double w) {
  auto dist2 = [&](double t) {
    const double dx = t - r;
    const double dy = piece.value(t) - w;
    return dx * dx + dy * dy;
  };
  if (piece.affine()) {
    const double c0 = piece.poly.empty() ? 0.0 : piece.poly[0];
    double c1 = piece.poly.size() > 1 ? piece.poly[1] : 0.0;
    if (piece.power_coeff != 0.0) c1 += piece.power_coeff;
    const double t = window.project((r + c1 * (w - c0)) / (1.0 + c1 * c1));
    return std::sqrt(dist2(t));
  }
  constexpr int kSamples = 256;
  const double step = (window.hi - window.lo) / kSamples;
  int best = 0;
  double best_val = dist2(window.lo);
  for (int i = 1; i <= kSamples; ++i) {
    const double v = dist2(window.lo + step * i);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  // Golden-section refinement on the bracketing cells.
  double a = window.lo + step * std::max(best - 1, 0);
  double b = window.lo + step * std::min(best + 1, kSamples);
  constexpr double kInvPhi = 0.6180339887498949;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = dist2(c);
  double fd = dist2(d);
  for (int it = 0; it < 200 && b - a > 4.0 * kMachEps * (1.0 + std::abs(a)); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = dist2(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = dist2(d);
    }
  }
  return std::sqrt(std::min({best_val, fc, fd}));
}

}  // namespace

double graph_membership_defect(const MonotoneGraph& g, double r, double w) {
  const Interval sec = g.section(r);
  if (!sec.empty() && sec.contains(w)) return 0.0;

  const auto& pieces = g.pieces();
  const auto& breaks = g.breakpoints();
  double best = std::hypot(r, w);  // (0, 0) is on every admissible graph

  if (g.bounded_below()) {
    const double top = pieces.front().value(g.dom_lo());
    best = std::min(best, std::hypot(r - g.dom_lo(), std::max(0.0, w - top)));
  }
  if (g.bounded_above()) {
    const double bottom = pieces.back().value(g.dom_hi());
    best = std::min(best, std::hypot(r - g.dom_hi(), std::max(0.0, bottom - w)));
  }
  for (std::size_t k = 0; k < breaks.size(); ++k) {
    const double t = breaks[k];
    const Interval jump{pieces[k].value(t), pieces[k + 1].value(t)};
    best = std::min(best, std::hypot(r - t, distance_to_interval(w, jump)));
  }
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    const Interval span = g.piece_span(k);
    const Interval window{std::max(span.lo, r - best), std::min(span.hi, r + best)};
    if (window.empty()) continue;
    best = std::min(best, distance_to_curve(pieces[k], window, r, w));
  }
  return best;
}

}  // namespace anisolve
