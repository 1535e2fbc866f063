#pragma once

// Polytropic equation of state p = A rho^gamma and the sound-speed variable
// c = sqrt(A gamma) rho^((gamma-1)/2) used to build vacuum initial data.

#include <cmath>
#include <string>

#include "errors.hpp"

namespace eulerblow {

struct GasParams {
  double A = 1.0;      ///< entropy constant
  double gamma = 2.0;  ///< adiabatic index

  GasParams() = default;
  GasParams(double entropy, double adiabatic_index) : A(entropy), gamma(adiabatic_index) {
    validate();
  }

  void validate() const {
    if (!(A > 0.0) || !std::isfinite(A)) throw ConfigError("gas: A must be positive and finite");
    if (!(gamma > 1.0) || !std::isfinite(gamma)) throw ConfigError("gas: gamma must exceed 1");
  }

  /// Outside (1, 5/3] the gas is not a physical polytrope; still accepted.
  bool is_polytropic_range() const { return gamma > 1.0 && gamma <= 5.0 / 3.0; }
};

namespace detail {

// x^e with 0^e = 0 for e > 0, independent of the platform's pow(0, .) behaviour.
inline double vacuum_pow(double x, double e) {
  if (x == 0.0) return 0.0;
  return std::pow(x, e);
}

}  // namespace detail

inline double pressure(double rho, const GasParams& g) {
  if (!(rho >= 0.0)) throw DomainError("pressure: negative density");
  return g.A * detail::vacuum_pow(rho, g.gamma);
}

inline double sound_speed(double rho, const GasParams& g) {
  if (!(rho >= 0.0)) throw DomainError("sound_speed: negative density");
  return std::sqrt(g.A * g.gamma) * detail::vacuum_pow(rho, 0.5 * (g.gamma - 1.0));
}

/// Inverse of sound_speed: rho = (A gamma)^(-1/(gamma-1)) c^(2/(gamma-1)).
inline double density_from_sound_speed(double c, const GasParams& g) {
  if (!(c >= 0.0)) throw DomainError("density_from_sound_speed: negative sound speed");
  if (c == 0.0) return 0.0;
  // Written as a single power of c^2/(A gamma) so the round trip stays within a few ulps.
  return std::pow(c * c / (g.A * g.gamma), 1.0 / (g.gamma - 1.0));
}

}  // namespace eulerblow
