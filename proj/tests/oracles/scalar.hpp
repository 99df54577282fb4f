#pragma once

// Scalar reference routines used as independent oracles: derivative-free
// minimization, bisection on monotone inclusions and dense nearest-point search.

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

/// Golden-section search for the minimum of a unimodal function on [a, b].
inline double golden_min(const std::function<double(double)>& fn, double a, double b, int iters = 200) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a);
  double d = a + r * (b - a);
  double fc = fn(c);
  double fd = fn(d);
  for (int i = 0; i < iters; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = fn(d);
    }
  }
  return fn(0.5 * (a + b));
}

/// Root of an increasing function on [a, b] by plain bisection.
inline double bisect(const std::function<double(double)>& fn, double a, double b, int iters = 200) {
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (a + b);
    if (fn(mid) < 0.0)
      a = mid;
    else
      b = mid;
  }
  return 0.5 * (a + b);
}

/// Distance from (x, y) to a polyline through the given points.
inline double polyline_distance(const std::vector<double>& xs, const std::vector<double>& ys, double x, double y) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double dx = xs[i + 1] - xs[i];
    const double dy = ys[i + 1] - ys[i];
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? ((x - xs[i]) * dx + (y - ys[i]) * dy) / len2 : 0.0;
    t = std::fmin(1.0, std::fmax(0.0, t));
    best = std::fmin(best, std::hypot(x - xs[i] - t * dx, y - ys[i] - t * dy));
  }
  return best;
}

}  // namespace oracle
