#pragma once

// Uniform cell-centred radial grids and radially symmetric fields in 2D/3D.
//
// Volume integrals over R^d reduce to |S^{d-1}| int f(r) w(r) r^{d-1} dr.
// A field value f_i is treated as the cell average on [r_{i-1/2}, r_{i+1/2}],
// and the weight enters through its cell moment
//     M_i = |S^{d-1}| int_{cell i} w(r) r^{d-1} dr,
// so that the integral of a piecewise-constant field is exact for f = const
// and second order in dr otherwise. No quadrature node ever sits at r = 0.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "quadrature.hpp"

namespace eulerblow {

enum class Dim { Two = 2, Three = 3 };

inline Dim dim_from_int(int d) {
  if (d == 2) return Dim::Two;
  if (d == 3) return Dim::Three;
  throw ConfigError("dim must be 2 or 3, got " + std::to_string(d));
}

inline int to_int(Dim d) { return static_cast<int>(d); }

/// |S^{d-1}|: 2 pi for d = 2, 4 pi for d = 3.
inline double sphere_area(Dim d) {
  return d == Dim::Two ? 2.0 * std::numbers::pi : 4.0 * std::numbers::pi;
}

/// r^{d-1}
inline double radial_jacobian(Dim d, double r) { return d == Dim::Two ? r : r * r; }

class RadialGrid {
 public:
  RadialGrid(double r_max, std::size_t n_cells) : r_max_(r_max), n_(n_cells) {
    if (!(r_max > 0.0) || !std::isfinite(r_max)) throw ConfigError("grid: r_max must be > 0");
    if (n_cells < 8) throw ConfigError("grid: n_cells must be >= 8");
    dr_ = r_max / static_cast<double>(n_cells);
  }

  double r_max() const { return r_max_; }
  std::size_t size() const { return n_; }
  double dr() const { return dr_; }
  double center(std::size_t i) const { return (static_cast<double>(i) + 0.5) * dr_; }
  /// Face i sits between cells i-1 and i; face 0 is the origin, face n is r_max.
  double face(std::size_t i) const { return static_cast<double>(i) * dr_; }

  std::vector<double> centers() const {
    std::vector<double> c(n_);
    for (std::size_t i = 0; i < n_; ++i) c[i] = center(i);
    return c;
  }

  bool operator==(const RadialGrid&) const = default;

 private:
  double r_max_;
  std::size_t n_;
  double dr_;
};

/// Exact cell volumes |S| (b^d - a^d) / d.
inline std::vector<double> cell_volumes(const RadialGrid& grid, Dim dim) {
  const double s = sphere_area(dim);
  const int d = to_int(dim);
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double a = grid.face(i), b = grid.face(i + 1);
    v[i] = d == 2 ? s * 0.5 * (b * b - a * a) : s * (b * b * b - a * a * a) / 3.0;
  }
  return v;
}

/// Face areas |S| r_f^{d-1} for faces 0..n.
inline std::vector<double> face_areas(const RadialGrid& grid, Dim dim) {
  const double s = sphere_area(dim);
  std::vector<double> a(grid.size() + 1);
  for (std::size_t f = 0; f <= grid.size(); ++f) a[f] = s * radial_jacobian(dim, grid.face(f));
  return a;
}

/// Cell moments M_i = |S| int_cell w(r) r^{d-1} dr (5-point Gauss-Legendre per cell).
template <class Weight>
std::vector<double> cell_moments(const RadialGrid& grid, Dim dim, const Weight& w) {
  const double s = sphere_area(dim);
  std::vector<double> m(grid.size());
  auto integrand = [&](double r) { return w(r) * radial_jacobian(dim, r); };
  for (std::size_t i = 0; i < grid.size(); ++i)
    m[i] = s * quad::gauss_legendre_5(integrand, grid.face(i), grid.face(i + 1));
  return m;
}

/// sum_i f_i M_i with precomputed moments.
inline double integrate_weighted(std::span<const double> f, std::span<const double> moments) {
  if (f.size() != moments.size()) throw ConfigError("integrate_weighted: size mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) sum += f[i] * moments[i];
  return sum;
}

template <class Weight>
double integrate_weighted(std::span<const double> f, const Weight& w, const RadialGrid& grid,
                          Dim dim) {
  return integrate_weighted(f, cell_moments(grid, dim, w));
}

/// Radially symmetric flow: u(x) = (x/r) v(r).
struct FluidState {
  RadialGrid grid;
  Dim dim = Dim::Three;
  std::vector<double> rho;
  std::vector<double> v;
  double time = 0.0;

  FluidState(RadialGrid g, Dim d) : grid(g), dim(d), rho(g.size(), 0.0), v(g.size(), 0.0) {}

  void validate() const {
    if (rho.size() != grid.size() || v.size() != grid.size())
      throw ConfigError("state: field length differs from n_cells");
    for (double x : rho)
      if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("state: density must be >= 0");
    for (double x : v)
      if (!std::isfinite(x)) throw DomainError("state: velocity must be finite");
  }
};

inline double mass(const FluidState& s) { return integrate_weighted(s.rho, cell_volumes(s.grid, s.dim)); }

/// sum over cells with center < r0 of rho_i M_i.
inline double weighted_in_ball(const FluidState& s, std::span<const double> moments, double r0) {
  if (!(r0 > 0.0) || r0 > s.grid.r_max()) throw DomainError("ball radius outside (0, r_max]");
  double sum = 0.0;
  for (std::size_t i = 0; i < s.grid.size() && s.grid.center(i) < r0; ++i)
    sum += s.rho[i] * moments[i];
  return sum;
}

inline double mass_in_ball(const FluidState& s, double r0) {
  return weighted_in_ball(s, cell_volumes(s.grid, s.dim), r0);
}

}  // namespace eulerblow
