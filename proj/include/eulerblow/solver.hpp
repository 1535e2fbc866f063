#pragma once

// Finite-volume integrator for radially symmetric isentropic Euler flow,
//
//   d_t rho      + r^{1-d} d_r (r^{d-1} rho v)       = 0
//   d_t (rho v)  + r^{1-d} d_r (r^{d-1} rho v^2) + d_r p = 0,
//
// written in the area-weighted form so that the mass update telescopes:
//
//   V_i d_t rho_i  = -(A_{i+1/2} F_{i+1/2} - A_{i-1/2} F_{i-1/2})
//   V_i d_t m_i    = -(A_{i+1/2} G_{i+1/2} - A_{i-1/2} G_{i-1/2}) + p_i (A_{i+1/2} - A_{i-1/2})
//
// with Rusanov interface fluxes (wave speed max(|v|+c) over both sides), which
// stay well defined at rho = 0. Ghost cells: mirror at r = 0 (rho even, v odd),
// zero gradient at r_max with the outgoing mass tallied.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "functionals.hpp"
#include "gas.hpp"
#include "radial.hpp"

namespace eulerblow {

enum class Reconstruction { FirstOrder, MusclMinmod };

inline const char* to_string(Reconstruction r) {
  return r == Reconstruction::FirstOrder ? "first_order" : "muscl_minmod";
}

struct SolverConfig {
  double cfl = 0.8;
  Reconstruction reconstruction = Reconstruction::MusclMinmod;
  double t_end = 1.0;
  std::size_t snapshot_stride = 100;
  double dt_floor = 1e-10;

  void validate() const {
    if (!(cfl > 0.0 && cfl <= 0.9)) throw ConfigError("solver: cfl must lie in (0, 0.9]");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("solver: t_end must be >= 0");
    if (!(dt_floor > 0.0)) throw ConfigError("solver: dt_floor must be > 0");
    if (snapshot_stride == 0) throw ConfigError("solver: snapshot_stride must be >= 1");
  }
};

enum class Termination { ReachedTEnd, DtFloor, PositivityFault, Inadmissible };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::ReachedTEnd: return "ReachedTEnd";
    case Termination::DtFloor: return "DtFloor";
    case Termination::PositivityFault: return "PositivityFault";
    case Termination::Inadmissible: return "Inadmissible";
  }
  return "?";
}

struct SeriesRow {
  double t = 0.0;
  double F = 0.0;
  double Fdot = 0.0;
  double max_c = 0.0;
  double max_dvdr = 0.0;
  double mass = 0.0;
  double outflow = 0.0;  ///< cumulative mass through r_max
};

struct Trajectory {
  std::vector<FluidState> snapshots;
  std::vector<SeriesRow> series;
  Termination termination = Termination::ReachedTEnd;
  std::string fault;
};

struct StepResult {
  FluidState state;
  double outflow = 0.0;  ///< mass leaving through r_max during the step
};

namespace detail {

inline double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

/// Volume-to-face-area ratio min_i V_i / (A_{i-1/2} + A_{i+1/2}) is dr/d, reached in
/// the cell touching the origin; it replaces dr in the Courant condition.
inline double courant_length(const RadialGrid& grid, Dim dim) {
  return grid.dr() / static_cast<double>(to_int(dim));
}

struct Geometry {
  std::vector<double> volume;
  std::vector<double> area;
};

inline Geometry make_geometry(const RadialGrid& grid, Dim dim) {
  return {cell_volumes(grid, dim), face_areas(grid, dim)};
}

inline double velocity_of(double rho, double mom) { return rho > 0.0 ? mom / rho : 0.0; }

// Semi-discrete right-hand side. Returns the outgoing mass rate at r_max.
inline double euler_rhs(const std::vector<double>& rho, const std::vector<double>& mom,
                        const GasParams& g, Reconstruction rec, const Geometry& geo,
                        std::vector<double>& drho, std::vector<double>& dmom) {
  const std::size_t n = rho.size();
  // Primitive fields with two ghost cells on each side: index k <-> cell k - 2.
  std::vector<double> pr(n + 4), pv(n + 4);
  for (std::size_t i = 0; i < n; ++i) {
    pr[i + 2] = rho[i];
    pv[i + 2] = velocity_of(rho[i], mom[i]);
  }
  pr[1] = pr[2];
  pv[1] = -pv[2];
  pr[0] = pr[3];
  pv[0] = -pv[3];
  pr[n + 2] = pr[n + 1];
  pv[n + 2] = pv[n + 1];
  pr[n + 3] = pr[n + 1];
  pv[n + 3] = pv[n + 1];

  // Half-slopes for cells -1..n (index 1..n+2).
  std::vector<double> sr(n + 4, 0.0), sv(n + 4, 0.0);
  if (rec == Reconstruction::MusclMinmod) {
    for (std::size_t k = 1; k + 1 < n + 4; ++k) {
      sr[k] = 0.5 * minmod(pr[k] - pr[k - 1], pr[k + 1] - pr[k]);
      sv[k] = 0.5 * minmod(pv[k] - pv[k - 1], pv[k + 1] - pv[k]);
    }
  }

  // Fluxes at faces 1..n (face 0 has zero area).
  std::vector<double> fr(n + 1, 0.0), fm(n + 1, 0.0);
  for (std::size_t f = 1; f <= n; ++f) {
    const std::size_t kl = f + 1, kr = f + 2;  // cells f-1 and f
    const double rl = pr[kl] + sr[kl], vl = pv[kl] + sv[kl];
    const double rr = pr[kr] - sr[kr], vr = pv[kr] - sv[kr];
    const double pl = pressure(rl, g), pR = pressure(rr, g);
    const double cl = sound_speed(rl, g), cr = sound_speed(rr, g);
    const double speed = std::max(std::abs(vl) + cl, std::abs(vr) + cr);
    const double ml = rl * vl, mr = rr * vr;
    fr[f] = 0.5 * (ml + mr) - 0.5 * speed * (rr - rl);
    fm[f] = 0.5 * (ml * vl + pl + mr * vr + pR) - 0.5 * speed * (mr - ml);
  }

  for (std::size_t i = 0; i < n; ++i) {
    const double a_in = geo.area[i], a_out = geo.area[i + 1];
    const double inv_v = 1.0 / geo.volume[i];
    drho[i] = -(a_out * fr[i + 1] - a_in * fr[i]) * inv_v;
    dmom[i] = (-(a_out * fm[i + 1] - a_in * fm[i]) + pressure(rho[i], g) * (a_out - a_in)) * inv_v;
  }
  return geo.area[n] * fr[n];
}

inline void require_positive(const std::vector<double>& rho, const std::vector<double>& mom) {
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (!(rho[i] >= 0.0) || !std::isfinite(rho[i]) || !std::isfinite(mom[i]))
      throw PositivityFault("negative or non-finite density in cell " + std::to_string(i));
  }
}

}  // namespace detail

/// Largest fastest-wave speed max_i (|v_i| + c_i).
inline double max_wave_speed(const FluidState& s, const GasParams& g) {
  double smax = 0.0;
  for (std::size_t i = 0; i < s.rho.size(); ++i)
    smax = std::max(smax, std::abs(s.v[i]) + sound_speed(s.rho[i], g));
  return smax;
}

/// dt = cfl * (dr / d) / max(|v| + c). At total vacuum there are no waves and
/// the whole remaining interval t_end is returned.
inline double cfl_dt(const FluidState& s, const GasParams& g, const SolverConfig& cfg) {
  const double smax = max_wave_speed(s, g);
  if (smax == 0.0) return std::max(cfg.t_end, cfg.dt_floor);
  return cfg.cfl * detail::courant_length(s.grid, s.dim) / smax;
}

/// Max |dv/dr| by central differences (odd mirror at the origin, one-sided at r_max).
inline double max_velocity_gradient(const FluidState& s) {
  const std::size_t n = s.v.size();
  const double h = s.grid.dr();
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double d;
    if (i == 0)
      d = (s.v[1] + s.v[0]) / (2.0 * h);
    else if (i + 1 == n)
      d = (s.v[i] - s.v[i - 1]) / h;
    else
      d = (s.v[i + 1] - s.v[i - 1]) / (2.0 * h);
    best = std::max(best, std::abs(d));
  }
  return best;
}

/// One forward-Euler (FirstOrder) or Heun (MusclMinmod) step. Throws PositivityFault.
inline StepResult step(const FluidState& s, const GasParams& g, const SolverConfig& cfg, double dt) {
  const std::size_t n = s.rho.size();
  const auto geo = detail::make_geometry(s.grid, s.dim);
  std::vector<double> rho = s.rho, mom(n);
  for (std::size_t i = 0; i < n; ++i) mom[i] = s.rho[i] * s.v[i];

  std::vector<double> k_rho(n), k_mom(n);
  double outflow = dt * detail::euler_rhs(rho, mom, g, cfg.reconstruction, geo, k_rho, k_mom);
  std::vector<double> rho1(n), mom1(n);
  for (std::size_t i = 0; i < n; ++i) {
    rho1[i] = rho[i] + dt * k_rho[i];
    mom1[i] = mom[i] + dt * k_mom[i];
  }
  detail::require_positive(rho1, mom1);

  if (cfg.reconstruction == Reconstruction::MusclMinmod) {
    const double out2 = dt * detail::euler_rhs(rho1, mom1, g, cfg.reconstruction, geo, k_rho, k_mom);
    for (std::size_t i = 0; i < n; ++i) {
      rho1[i] = 0.5 * (rho[i] + rho1[i] + dt * k_rho[i]);
      mom1[i] = 0.5 * (mom[i] + mom1[i] + dt * k_mom[i]);
    }
    outflow = 0.5 * (outflow + out2);
    detail::require_positive(rho1, mom1);
  }

  StepResult out{FluidState(s.grid, s.dim), outflow};
  out.state.time = s.time + dt;
  for (std::size_t i = 0; i < n; ++i) {
    out.state.rho[i] = rho1[i];
    out.state.v[i] = detail::velocity_of(rho1[i], mom1[i]);
  }
  return out;
}

inline SeriesRow make_series_row(const FluidState& s, const GasParams& g, const WeightTable& table,
                                 double cumulative_outflow) {
  double max_c = 0.0;
  for (double r : s.rho) max_c = std::max(max_c, sound_speed(r, g));
  return {s.time, f_value(s, table), f_rate(s, table), max_c, max_velocity_gradient(s), mass(s),
          cumulative_outflow};
}

/// Called after every accepted step (and once for the initial state).
using StepObserver = std::function<void(const FluidState&, const SeriesRow&)>;

inline Trajectory run(const FluidState& state0, const GasParams& g, const SolverConfig& cfg,
                      const WeightTable& table, const StepObserver& observer = {}) {
  cfg.validate();
  state0.validate();
  Trajectory traj;
  FluidState state = state0;
  double outflow = 0.0;
  std::size_t steps = 0;

  auto record = [&](const FluidState& st) {
    traj.series.push_back(make_series_row(st, g, table, outflow));
    if (observer) observer(st, traj.series.back());
  };
  record(state);
  traj.snapshots.push_back(state);

  const double t_stop = state0.time + cfg.t_end;
  traj.termination = Termination::ReachedTEnd;
  while (state.time < t_stop) {
    double dt = cfl_dt(state, g, cfg);
    if (dt < cfg.dt_floor) {
      traj.termination = Termination::DtFloor;
      break;
    }
    const bool last = state.time + dt >= t_stop;
    if (last) dt = t_stop - state.time;
    try {
      auto res = step(state, g, cfg, dt);
      state = std::move(res.state);
      outflow += res.outflow;
    } catch (const PositivityFault& e) {
      traj.termination = Termination::PositivityFault;
      traj.fault = e.what();
      break;
    }
    if (last) state.time = t_stop;
    ++steps;
    record(state);
    if (steps % cfg.snapshot_stride == 0 || last) traj.snapshots.push_back(state);
  }
  if (traj.snapshots.back().time != state.time) traj.snapshots.push_back(state);
  return traj;
}

inline Trajectory run(const FluidState& state0, const GasParams& g, const SolverConfig& cfg) {
  return run(state0, g, cfg, make_weight_table(state0.grid, state0.dim));
}

}  // namespace eulerblow
