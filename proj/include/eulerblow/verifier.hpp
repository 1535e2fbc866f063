#pragma once

// Checks the differential-inequality chain along a simulated trajectory.
//
// All inequality checks are asserted on the resolved window
//   [0, min(t_end, t_sing, 0.95 t*)]
// where the solution is still smooth; margins are relative and a check passes
// when its worst margin is >= -tol.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "functionals.hpp"
#include "initdata.hpp"
#include "solver.hpp"

namespace eulerblow {

struct CheckResult {
  std::string name;
  bool ok = true;
  bool skipped = false;
  double worst_margin = std::numeric_limits<double>::infinity();
  double t_worst = 0.0;
  std::size_t points = 0;
  std::string note;

  void observe(double margin, double t, double tol) {
    ++points;
    if (margin < worst_margin) {
      worst_margin = margin;
      t_worst = t;
    }
    if (!(margin >= -tol)) ok = false;
  }

  static CheckResult skip(std::string name, std::string why) {
    CheckResult r;
    r.name = std::move(name);
    r.skipped = true;
    r.note = std::move(why);
    return r;
  }
};

struct VerifyConfig {
  double tol = 1e-2;
  double singularity_factor = 50.0;
  std::vector<double> r0 = {1.0};
  double ordering_slack = 0.05;   ///< t_sing <= (1 + slack) t*
  double rate_consistency_tol = 1e-3;
  double smooth_fraction = 0.25;  ///< rate consistency on [0, fraction * window end]
  bool flip_velocity_sign = false;

  void validate() const {
    if (!(tol >= 0.0 && tol < 1.0)) throw ConfigError("verify: tol must lie in [0, 1)");
    if (!(singularity_factor > 1.0)) throw ConfigError("verify: singularity_factor must exceed 1");
    if (r0.empty()) throw ConfigError("verify: r0 list must not be empty");
    for (double r : r0)
      if (!(r > 0.0)) throw ConfigError("verify: r0 must be > 0");
    if (!(ordering_slack >= 0.0)) throw ConfigError("verify: ordering_slack must be >= 0");
    if (!(smooth_fraction > 0.0 && smooth_fraction <= 1.0))
      throw ConfigError("verify: smooth_fraction must lie in (0, 1]");
  }
};

/// (t, F, Fdot) per recorded step, as computed by f_value / f_rate in the solver.
inline std::vector<FunctionalValue> monitor(const Trajectory& traj) {
  std::vector<FunctionalValue> out;
  out.reserve(traj.series.size());
  for (const auto& row : traj.series) out.push_back({row.t, row.F, row.Fdot});
  return out;
}

/// Recompute the functional series from snapshots (used for trajectories read back from disk).
inline std::vector<FunctionalValue> monitor(const std::vector<FluidState>& snapshots,
                                            const WeightTable& table) {
  std::vector<FunctionalValue> out;
  for (const auto& s : snapshots) out.push_back({s.time, f_value(s, table), f_rate(s, table)});
  return out;
}

/// Flip v -> -v in every snapshot and in the rate series (negative control).
inline Trajectory negate_velocities(Trajectory traj) {
  for (auto& s : traj.snapshots)
    for (double& x : s.v) x = -x;
  for (auto& row : traj.series) row.Fdot = -row.Fdot;
  return traj;
}

/// F'(t) >= F'(0) (1 - tol) and F'(0) > 0.
inline CheckResult check_rate_monotone(const std::vector<FunctionalValue>& series, double tol,
                                       double t_window) {
  if (series.empty()) return CheckResult::skip("rate_monotone", "empty series");
  const double fd0 = series.front().Fdot;
  if (fd0 == 0.0) return CheckResult::skip("rate_monotone", "F'(0) = 0: no inflow");
  CheckResult res;
  res.name = "rate_monotone";
  res.observe(fd0 > 0.0 ? 0.0 : -1.0, series.front().t, tol);
  for (std::size_t k = 1; k < series.size() && series[k].t <= t_window; ++k)
    res.observe((series[k].Fdot - fd0) / std::abs(fd0), series[k].t, tol);
  return res;
}

/// Integrated convexity: F'(t) - F'(0) >= int_0^t A F^gamma / N^{gamma-1} ds
/// (cumulative trapezoid rule over the recorded steps). The margin is the
/// shortfall relative to int + |F'(0)|, so it stays well conditioned while the
/// integral is still ~0 and equals the rate-monotone margin when A -> 0.
inline CheckResult check_convexity(const std::vector<FunctionalValue>& series, const GasParams& g,
                                   Dim dim, double tol, double t_window) {
  if (series.size() < 2) return CheckResult::skip("convexity", "fewer than two steps");
  const double fd0 = series.front().Fdot;
  CheckResult res;
  res.name = "convexity";
  double integral = 0.0;
  double prev = convexity_rhs(std::max(series.front().F, 0.0), g, dim);
  for (std::size_t k = 1; k < series.size() && series[k].t <= t_window; ++k) {
    const double cur = convexity_rhs(std::max(series[k].F, 0.0), g, dim);
    integral += 0.5 * (prev + cur) * (series[k].t - series[k - 1].t);
    prev = cur;
    const double gain = series[k].Fdot - fd0;
    const double scale = integral + std::abs(fd0);
    res.observe(scale > 0.0 ? (gain - integral) / scale : gain, series[k].t, tol);
  }
  if (res.points == 0) return CheckResult::skip("convexity", "window holds a single step");
  return res;
}

struct RiccatiEnvelopeResult {
  CheckResult riccati;
  CheckResult envelope;
};

/// F' >= (1 - tol) C F^{(gamma+1)/2} and F >= (1 - tol) envelope(t) for t < min(window, 0.95 t*).
inline RiccatiEnvelopeResult check_riccati_and_envelope(const std::vector<FunctionalValue>& series,
                                                        double F0, const GasParams& g, Dim dim,
                                                        double tol, double t_window) {
  RiccatiEnvelopeResult out;
  if (series.empty() || !(F0 > 0.0)) {
    out.riccati = CheckResult::skip("riccati", "F(0) must be positive");
    out.envelope = CheckResult::skip("envelope", "F(0) must be positive");
    return out;
  }
  const double C = c_const(g, dim);
  const double t_star = blowup_time_bound(F0, g.gamma, C);
  const double t_lim = std::min(t_window, 0.95 * t_star);
  out.riccati.name = "riccati";
  out.envelope.name = "envelope";
  for (const auto& fv : series) {
    if (fv.t > t_lim) break;
    const double floor_rate = C * std::pow(std::max(fv.F, 0.0), 0.5 * (g.gamma + 1.0));
    out.riccati.observe(floor_rate > 0.0 ? (fv.Fdot - floor_rate) / floor_rate : fv.Fdot, fv.t, tol);
    const double env = envelope(fv.t - series.front().t, F0, g.gamma, C);
    out.envelope.observe((fv.F - env) / env, fv.t, tol);
  }
  return out;
}

struct SingularityDetection {
  std::optional<double> gradient;  ///< first t with max|dv/dr| > factor * initial
  std::optional<double> dt_floor;  ///< time at which the run lost resolution
  std::optional<double> earliest() const {
    if (gradient && dt_floor) return std::min(*gradient, *dt_floor);
    return gradient ? gradient : dt_floor;
  }
};

inline SingularityDetection detect_singularity_detail(const Trajectory& traj, double factor) {
  SingularityDetection out;
  if (traj.series.empty()) return out;
  const double g0 = traj.series.front().max_dvdr;
  if (g0 > 0.0) {
    for (const auto& row : traj.series) {
      if (row.max_dvdr > factor * g0) {
        out.gradient = row.t;
        break;
      }
    }
  }
  if (traj.termination == Termination::DtFloor) out.dt_floor = traj.series.back().t;
  return out;
}

inline std::optional<double> detect_singularity(const Trajectory& traj, double factor) {
  return detect_singularity_detail(traj, factor).earliest();
}

/// Tracks F(t) <= int_{B_r0} rho w dx + w_tail(r0) * int rho_0 dx step by step.
/// w_tail is 1/r0 for the 3D weight and max_{r >= r0} K0 = K0(r0) in 2D; both
/// bound w on the cells left outside the ball.
class LocalizationMonitor {
 public:
  LocalizationMonitor(const WeightTable& table, double r0, double initial_mass, double tol)
      : table_(&table), r0_(r0), mass0_(initial_mass), tol_(tol) {
    result_.name = "localization(r0=" + format_radius(r0) + ")";
    if (!(r0 > 0.0) || r0 > table.grid.r_max())
      throw DomainError("localization: r0 outside (0, r_max]");
    // Cells with centre >= r0 see weights no larger than w at their own lower face.
    const double r_tail = first_excluded_face(table.grid, r0);
    tail_weight_ = table.dim == Dim::Three ? 1.0 / r_tail : k0(r_tail);
  }

  void observe(const FluidState& s) {
    const double F = f_value(s, *table_);
    const double bound = weighted_in_ball(s, table_->w, r0_) + tail_weight_ * mass0_;
    result_.observe(F > 0.0 ? (bound - F) / F : 0.0, s.time, tol_);
  }

  const CheckResult& result() const { return result_; }

 private:
  static double first_excluded_face(const RadialGrid& grid, double r0) {
    std::size_t i = 0;
    while (i < grid.size() && grid.center(i) < r0) ++i;
    return std::max(grid.face(i), std::numeric_limits<double>::min());
  }
  static std::string format_radius(double r) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", r);
    return buf;
  }

  const WeightTable* table_;
  double r0_;
  double mass0_;
  double tol_;
  double tail_weight_ = 0.0;
  CheckResult result_;
};

inline CheckResult check_localization(const Trajectory& traj, const WeightTable& table, double r0,
                                      double tol) {
  if (traj.snapshots.empty()) return CheckResult::skip("localization", "no snapshots");
  LocalizationMonitor mon(table, r0, mass(traj.snapshots.front()), tol);
  for (const auto& s : traj.snapshots) mon.observe(s);
  return mon.result();
}

/// |finite-difference dF/dt - mean(F'_k, F'_{k+1})| / max |F'| over [0, t_window].
inline CheckResult check_rate_consistency(const std::vector<FunctionalValue>& series, double tol,
                                          double t_window) {
  if (series.size() < 2) return CheckResult::skip("rate_consistency", "fewer than two steps");
  double scale = 0.0;
  for (std::size_t k = 0; k < series.size() && series[k].t <= t_window; ++k)
    scale = std::max(scale, std::abs(series[k].Fdot));
  if (scale == 0.0) return CheckResult::skip("rate_consistency", "F' vanishes on the window");
  CheckResult res;
  res.name = "rate_consistency";
  for (std::size_t k = 0; k + 1 < series.size() && series[k + 1].t <= t_window; ++k) {
    const double dt = series[k + 1].t - series[k].t;
    if (!(dt > 0.0)) continue;
    const double fd = (series[k + 1].F - series[k].F) / dt;
    const double mean_rate = 0.5 * (series[k].Fdot + series[k + 1].Fdot);
    res.observe(-std::abs(fd - mean_rate) / scale, series[k].t, tol);
  }
  if (res.points == 0) return CheckResult::skip("rate_consistency", "window holds a single step");
  return res;
}

struct CheckReport {
  InitialDataReport initial;
  bool admissible = false;
  CheckResult rate_monotone, convexity, riccati, envelope;
  std::vector<CheckResult> localization;
  CheckResult rate_consistency;  ///< numerical diagnostic, not part of the inequality chain
  SingularityDetection singularity;
  std::optional<double> t_sing;
  double t_star = std::numeric_limits<double>::infinity();
  double t_window = 0.0;
  bool ordering_ok = false;
  Termination termination = Termination::ReachedTEnd;

  bool inequalities_ok() const {
    bool ok = rate_monotone.ok && convexity.ok && riccati.ok && envelope.ok;
    for (const auto& l : localization) ok = ok && l.ok;
    return ok;
  }
  bool all_pass() const { return admissible && inequalities_ok() && ordering_ok; }
};

/// Run every check on an already simulated trajectory. Localization results are
/// supplied by the caller (they need per-step states; see verify_run).
inline CheckReport verify_trajectory(const InitialDataReport& initial, const Trajectory& traj,
                                     const GasParams& g, Dim dim, const VerifyConfig& vc,
                                     std::vector<CheckResult> localization) {
  CheckReport rep;
  rep.initial = initial;
  rep.admissible = initial.admissible();
  rep.t_star = initial.t_star;
  rep.termination = traj.termination;
  rep.localization = std::move(localization);
  rep.singularity = detect_singularity_detail(traj, vc.singularity_factor);
  rep.t_sing = rep.singularity.earliest();

  const double t_run_end = traj.series.empty() ? 0.0 : traj.series.back().t;
  double window = std::min(t_run_end, 0.95 * rep.t_star);
  if (rep.t_sing) window = std::min(window, *rep.t_sing);
  rep.t_window = window;

  if (!rep.admissible) {
    const char* why = "initial data inadmissible";
    rep.rate_monotone = CheckResult::skip("rate_monotone", why);
    rep.convexity = CheckResult::skip("convexity", why);
    rep.riccati = CheckResult::skip("riccati", why);
    rep.envelope = CheckResult::skip("envelope", why);
    rep.rate_consistency = CheckResult::skip("rate_consistency", why);
    return rep;
  }

  const auto series = monitor(traj);
  rep.rate_monotone = check_rate_monotone(series, vc.tol, window);
  rep.convexity = check_convexity(series, g, dim, vc.tol, window);
  auto re = check_riccati_and_envelope(series, initial.F0, g, dim, vc.tol, window);
  rep.riccati = std::move(re.riccati);
  rep.envelope = std::move(re.envelope);
  rep.rate_consistency = check_rate_consistency(series, vc.rate_consistency_tol,
                                                vc.smooth_fraction * window);
  rep.ordering_ok = rep.t_sing.has_value() && *rep.t_sing <= (1.0 + vc.ordering_slack) * rep.t_star;
  return rep;
}

struct VerifiedRun {
  Trajectory trajectory;
  CheckReport report;
};

/// Simulate from admissible initial data and check the full chain. Inadmissible
/// data is reported without running the solver.
inline VerifiedRun verify_run(const FluidState& state0, const GasParams& g, SolverConfig cfg,
                              const VerifyConfig& vc, const WeightTable& table,
                              const InitialDataReport& initial) {
  vc.validate();
  VerifiedRun out;
  if (!initial.admissible()) {
    out.trajectory.termination = Termination::Inadmissible;
    out.report = verify_trajectory(initial, out.trajectory, g, state0.dim, vc, {});
    out.report.termination = Termination::Inadmissible;
    return out;
  }
  std::vector<LocalizationMonitor> monitors;
  const double m0 = mass(state0);
  for (double r0 : vc.r0) monitors.emplace_back(table, r0, m0, vc.tol);
  // Localization depends on rho only, so it is unaffected by the sign flip.
  auto observer = [&](const FluidState& s, const SeriesRow&) {
    for (auto& m : monitors) m.observe(s);
  };
  out.trajectory = run(state0, g, cfg, table, observer);
  if (vc.flip_velocity_sign) out.trajectory = negate_velocities(std::move(out.trajectory));
  std::vector<CheckResult> loc;
  for (const auto& m : monitors) loc.push_back(m.result());
  out.report = verify_trajectory(initial, out.trajectory, g, state0.dim, vc, std::move(loc));
  return out;
}

}  // namespace eulerblow
