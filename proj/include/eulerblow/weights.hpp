#pragma once

// Test-function weights for the weighted density functionals.
//
//   3D: w3(r) = e^{-r} / r, the decaying radial solution of  w'' + (2/r) w' = w.
//   2D: K0(r) = int_0^inf e^{-r cosh t} dt, the decaying solution of K'' + K'/r = K.
//
// K0 and its derivatives are evaluated from the integral representation with
// adaptive Gauss-Kronrod quadrature. Only strictly positive radii are valid;
// both weights are singular at the origin.

#include <cmath>
#include <string>

#include "errors.hpp"
#include "quadrature.hpp"

namespace eulerblow {

enum class WeightKind { ThreeD, TwoDBessel };

inline const char* to_string(WeightKind k) {
  return k == WeightKind::ThreeD ? "ThreeD" : "TwoDBessel";
}

namespace detail {

inline void require_positive_radius(double r, const char* what) {
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError(std::string(what) + ": radius must be > 0");
}

// ln(1e18): beyond cosh T - 1 = kTailLog / r the integrand is below 1e-18 of its peak.
inline constexpr double kTailLog = 41.446531673892822;
inline constexpr double kBesselRelTol = 1e-14;

// int_0^inf e^{-r cosh t} cosh^p t dt for p in {0, 1, 2}.
// The factor e^{-r} is pulled out so the truncation and tolerance are relative.
inline double bessel_integral(double r, int p) {
  const double t_max = std::acosh(1.0 + kTailLog / r);
  auto integrand = [r, p](double t) {
    const double ch = std::cosh(t);
    double val = std::exp(-r * (ch - 1.0));
    for (int k = 0; k < p; ++k) val *= ch;
    return val;
  };
  const auto res = quad::integrate(integrand, 0.0, t_max, kBesselRelTol);
  return std::exp(-r) * res.value;
}

}  // namespace detail

inline double w3(double r) {
  detail::require_positive_radius(r, "w3");
  return std::exp(-r) / r;
}

inline double w3_prime(double r) {
  detail::require_positive_radius(r, "w3_prime");
  return -(1.0 + r) * std::exp(-r) / (r * r);
}

inline double w3_second(double r) {
  detail::require_positive_radius(r, "w3_second");
  return (1.0 / r + 2.0 / (r * r) + 2.0 / (r * r * r)) * std::exp(-r);
}

inline double k0(double r) {
  detail::require_positive_radius(r, "k0");
  return detail::bessel_integral(r, 0);
}

/// K0'(r) = -int_0^inf e^{-r cosh t} cosh t dt  (= -K1(r)), strictly negative.
inline double k0_prime(double r) {
  detail::require_positive_radius(r, "k0_prime");
  return -detail::bessel_integral(r, 1);
}

/// K0''(r) = int_0^inf e^{-r cosh t} cosh^2 t dt.
inline double k0_second(double r) {
  detail::require_positive_radius(r, "k0_second");
  return detail::bessel_integral(r, 2);
}

inline double weight(WeightKind kind, double r) {
  return kind == WeightKind::ThreeD ? w3(r) : k0(r);
}

inline double weight_prime(WeightKind kind, double r) {
  return kind == WeightKind::ThreeD ? w3_prime(r) : k0_prime(r);
}

inline double weight_second(WeightKind kind, double r) {
  return kind == WeightKind::ThreeD ? w3_second(r) : k0_second(r);
}

// Small-radius bounds on (0, 1/2).
inline double k0_small_radius_bound(double r) { return 3.0 / r; }
inline double k0_prime_small_radius_bound(double r) { return 1.0 / (r * r); }

// Decay bound r^2 max(K0, |K0'|) <= C2 on (1, 50). The supremum 0.62983 sits
// near r = 1.3 (measured against the series/continued-fraction oracle).
inline constexpr double kK0DecayConstant = 0.6299;
inline double k0_large_radius_bound(double r) { return kK0DecayConstant / (r * r); }

}  // namespace eulerblow
