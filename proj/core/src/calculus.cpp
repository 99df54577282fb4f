#include "anisolve/calculus.hpp"

#include <algorithm>
#include <cmath>

#include "anisolve/error.hpp"

namespace anisolve {

namespace {

template <class F>
std::vector<double> map(std::span<const double> values, F&& f) {
  std::vector<double> out(values.size());
  std::transform(values.begin(), values.end(), out.begin(), f);
  return out;
}

}  // namespace

double truncate(double k, double r) {
  if (!(k > 0.0)) throw InvalidInput("truncation level must be positive");
  return std::clamp(r, -k, k);
}

double tail_cut(double l, double r) {
  if (!(l > 0.0)) throw InvalidInput("tail cut level must be positive");
  return std::clamp(r - std::clamp(r, -l, l), -1.0, 1.0);
}

double plateau_cutoff(double l, double r) {
  if (!(l > 0.0)) throw InvalidInput("plateau level must be positive");
  return std::min(1.0, std::max(0.0, l + 1.0 - std::abs(r)));
}

double level_indicator_ramp(int n, double lambda, double r) {
  if (n < 1) throw InvalidInput("ramp steepness must be at least 1");
  const double nn = static_cast<double>(n);
  return std::min(1.0, std::max(0.0, nn * r - nn * lambda + 1.0));
}

double sign0(double r) noexcept { return r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0); }

double sign0_plus(double r) noexcept { return r > 0.0 ? 1.0 : 0.0; }

std::vector<double> truncate(double k, std::span<const double> values) {
  return map(values, [k](double r) { return truncate(k, r); });
}

std::vector<double> tail_cut(double l, std::span<const double> values) {
  return map(values, [l](double r) { return tail_cut(l, r); });
}

std::vector<double> plateau_cutoff(double l, std::span<const double> values) {
  return map(values, [l](double r) { return plateau_cutoff(l, r); });
}

std::vector<double> level_indicator_ramp(int n, double lambda, std::span<const double> values) {
  return map(values, [n, lambda](double r) { return level_indicator_ramp(n, lambda, r); });
}

}  // namespace anisolve
