#pragma once

// Scalar cutoffs, truncations and sign functions, pointwise and applied
// elementwise over nodal arrays.

#include <span>
#include <vector>

namespace anisolve {

/// Clamp of r to [-k, k].
double truncate(double k, double r);

/// T_1(r - T_l(r)): zero on |r| <= l, sign(r) on |r| >= l + 1, linear between.
double tail_cut(double l, double r);

/// min(1, (l + 1 - |r|)^+): one on |r| <= l, zero on |r| >= l + 1.
double plateau_cutoff(double l, double r);

/// min(1, (n r - n lambda + 1)^+): zero below lambda - 1/n, one from lambda on.
double level_indicator_ramp(int n, double lambda, double r);

double sign0(double r) noexcept;
double sign0_plus(double r) noexcept;

/// Elementwise application; agrees exactly with the scalar forms.
std::vector<double> truncate(double k, std::span<const double> values);
std::vector<double> tail_cut(double l, std::span<const double> values);
std::vector<double> plateau_cutoff(double l, std::span<const double> values);
std::vector<double> level_indicator_ramp(int n, double lambda, std::span<const double> values);

}  // namespace anisolve
