#pragma once

// Weighted density functionals and the blow-up machinery built on them.
//
//   F(t) = int rho w dx          (w = e^{-r}/r in 3D, K0 in 2D)
//   F'(t) = int rho v w'(r) dx   (mass equation + integration by parts)
//
// Along smooth solutions F'' >= A F^gamma / N^{gamma-1} with N = 4 pi (3D) or
// N = int_{R^2} K0 dx (2D). Together with F'(0) >= C F(0)^{(gamma+1)/2} this
// forces F' >= C F^{(gamma+1)/2} and therefore blow-up no later than
//   t* = 2 F(0)^{-(gamma-1)/2} / ((gamma-1) C).

#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "gas.hpp"
#include "quadrature.hpp"
#include "radial.hpp"
#include "weights.hpp"

namespace eulerblow {

inline WeightKind weight_kind_for(Dim d) {
  return d == Dim::Three ? WeightKind::ThreeD : WeightKind::TwoDBessel;
}

struct FunctionalValue {
  double t = 0.0;
  double F = 0.0;
  double Fdot = 0.0;
};

/// Cell moments of w and w' for one grid and dimension. Building the 2D table
/// costs a few thousand K0 quadratures, so callers keep one per grid.
struct WeightTable {
  RadialGrid grid;
  Dim dim;
  std::vector<double> w;
  std::vector<double> w_prime;
};

inline WeightTable make_weight_table(const RadialGrid& grid, Dim dim) {
  const WeightKind kind = weight_kind_for(dim);
  return {grid, dim,
          cell_moments(grid, dim, [kind](double r) { return weight(kind, r); }),
          cell_moments(grid, dim, [kind](double r) { return weight_prime(kind, r); })};
}

/// int_{R^2} K0 dx = 2 pi int_0^inf r K0(r) dr, by nested adaptive quadrature.
/// Evaluated once per process.
inline double plane_k0_integral() {
  static const double value = [] {
    auto f = [](double r) { return r * k0(r); };
    // r K0(r) < 1e-20 beyond r = 50.
    const auto inner = quad::integrate(f, 0.0, 1.0, 1e-13);
    const auto outer = quad::integrate(f, 1.0, 50.0, 1e-13);
    return 2.0 * std::numbers::pi * (inner.value + outer.value);
  }();
  return value;
}

/// N in the convexity inequality: 4 pi in 3D, int K0 dx in 2D.
inline double weight_normalization(Dim d) {
  return d == Dim::Three ? 4.0 * std::numbers::pi : plane_k0_integral();
}

inline double f_value(const FluidState& s, const WeightTable& table) {
  return integrate_weighted(s.rho, table.w);
}

inline double f_value(const FluidState& s) { return f_value(s, make_weight_table(s.grid, s.dim)); }

inline double f_rate(const FluidState& s, const WeightTable& table) {
  double sum = 0.0;
  for (std::size_t i = 0; i < s.rho.size(); ++i) sum += s.rho[i] * s.v[i] * table.w_prime[i];
  return sum;
}

inline double f_rate(const FluidState& s) { return f_rate(s, make_weight_table(s.grid, s.dim)); }

/// C0 = sqrt(A / ((gamma+1) (4 pi)^{gamma-1})) in 3D,
/// C1 = sqrt(A / (gamma+1)) (int K0 dx)^{-(gamma-1)/2} in 2D.
inline double c_const(const GasParams& g, Dim d) {
  return std::sqrt(g.A / ((g.gamma + 1.0) * std::pow(weight_normalization(d), g.gamma - 1.0)));
}

/// Right-hand side A F^gamma / N^{gamma-1} of the convexity inequality.
inline double convexity_rhs(double F, const GasParams& g, Dim d) {
  if (!(F >= 0.0)) throw DomainError("convexity_rhs: functional must be >= 0");
  return g.A * detail::vacuum_pow(F, g.gamma) / std::pow(weight_normalization(d), g.gamma - 1.0);
}

/// t* = 2 F0^{-(gamma-1)/2} / ((gamma-1) C) for an explicit constant C.
inline double blowup_time_bound(double F0, double gamma, double C) {
  if (!(F0 > 0.0)) throw DomainError("blowup_time_bound: F0 must be > 0");
  return 2.0 * std::pow(F0, -0.5 * (gamma - 1.0)) / ((gamma - 1.0) * C);
}

inline double blowup_time_bound(double F0, const GasParams& g, Dim d) {
  return blowup_time_bound(F0, g.gamma, c_const(g, d));
}

/// Lower envelope (F0^{-(gamma-1)/2} - (gamma-1)/2 C t)^{-2/(gamma-1)}, valid for t < t*.
inline double envelope(double t, double F0, double gamma, double C) {
  const double t_star = blowup_time_bound(F0, gamma, C);
  if (!(t >= 0.0) || t >= t_star) throw DomainError("envelope: t outside [0, t*)");
  const double base = std::pow(F0, -0.5 * (gamma - 1.0)) - 0.5 * (gamma - 1.0) * C * t;
  return std::pow(base, -2.0 / (gamma - 1.0));
}

inline double envelope(double t, double F0, const GasParams& g, Dim d) {
  return envelope(t, F0, g.gamma, c_const(g, d));
}

}  // namespace eulerblow
