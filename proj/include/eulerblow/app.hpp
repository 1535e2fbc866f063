#pragma once

// Command implementations behind the eulerblow executable. Each command takes a
// parsed configuration and output streams and returns the process exit code.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "config.hpp"
#include "errors.hpp"
#include "functionals.hpp"
#include "initdata.hpp"
#include "solver.hpp"
#include "verifier.hpp"
#include "weights.hpp"

namespace eulerblow {

enum ExitCode : int {
  kExitOk = 0,
  kExitVerifyFail = 1,
  kExitBadConfig = 2,
  kExitInadmissible = 3,
  kExitSolverFault = 4,
};

namespace fs = std::filesystem;

/// Everything derived from a config before the solver runs.
struct PreparedCase {
  RunConfig config;  ///< m, t_end and dt_floor resolved where possible
  WeightTable table;
  FluidState state0;
  InitialDataReport initial;
  bool t_end_resolved = false;
};

inline PreparedCase prepare_case(const RunConfig& cfg) {
  RunConfig c = cfg;
  const RadialGrid grid = c.grid();
  WeightTable table = make_weight_table(grid, c.dim);

  double m_min = std::numeric_limits<double>::quiet_NaN();
  try {
    m_min = minimal_inflow_amplitude(c.profile, c.gas, table);
  } catch (const DomainError&) {
    if (c.m_over_min) throw ConfigError("profile: m_over_min given but the profile has no minimal amplitude");
  }
  if (c.m_over_min) c.profile.m = *c.m_over_min * m_min;

  FluidState state0 = build_initial_data(c.profile, c.gas, grid, c.dim);
  InitialDataReport initial = check_admissibility(state0, c.gas, table);
  initial.m = c.profile.m;
  initial.m_min = m_min;

  bool resolved = !c.t_end_auto;
  if (c.t_end_auto && initial.admissible()) {
    c.solver.t_end = (1.0 + c.verify.ordering_slack) * initial.t_star;
    c.t_end_auto = false;
    resolved = true;
  }
  if (resolved) {
    if (c.dt_floor_auto) {
      c.solver.dt_floor = 1e-10 * std::max(c.solver.t_end, 1e-300);
      c.dt_floor_auto = false;
    }
    c.solver.validate();
  }
  return {std::move(c), std::move(table), std::move(state0), initial, resolved};
}

namespace detail {

inline json finite_or_null(double x);

}  // namespace detail

/// Header payload for output files: the configuration plus the amplitude and
/// time bound derived from it.
inline json header_json(const PreparedCase& pc) {
  return {{"config", to_json(pc.config)},
          {"derived",
           {{"m", pc.config.profile.m},
            {"m_min", detail::finite_or_null(pc.initial.m_min)},
            {"t_star", detail::finite_or_null(pc.initial.t_star)}}}};
}

namespace detail {

inline std::string fmt_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline void write_header(std::ostream& os, const char* what, const json& resolved) {
  os << "# eulerblow " << what << "\n# config: " << resolved.at("config").dump() << "\n";
  if (resolved.contains("derived")) os << "# derived: " << resolved.at("derived").dump() << "\n";
}

inline void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());
}

inline std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write '" + path.string() + "'");
  return os;
}

inline const char* check_word(const CheckResult& c) { return c.skipped ? "skip" : (c.ok ? "pass" : "fail"); }

inline const char* localization_word(const CheckReport& rep) {
  if (rep.localization.empty()) return "skip";
  for (const auto& l : rep.localization)
    if (!l.ok) return "fail";
  return "pass";
}

}  // namespace detail

inline json to_json(const InitialDataReport& r) {
  return {{"dim", to_int(r.dim)},
          {"cond_vacuum", r.cond_vacuum},
          {"cond_mass", r.cond_mass},
          {"momentum_lhs", r.momentum_lhs},
          {"momentum_rhs", r.momentum_rhs},
          {"cond_momentum_margin", r.cond_momentum_margin},
          {"relative_margin", detail::finite_or_null(r.relative_margin())},
          {"F0", r.F0},
          {"Fdot0", r.Fdot0},
          {"m", detail::finite_or_null(r.m)},
          {"m_min", detail::finite_or_null(r.m_min)},
          {"admissible", r.admissible()},
          {"t_star", detail::finite_or_null(r.t_star)}};
}

inline json to_json(const CheckResult& c) {
  return {{"name", c.name},
          {"ok", c.ok},
          {"skipped", c.skipped},
          {"worst_margin", detail::finite_or_null(c.worst_margin)},
          {"t_worst", c.t_worst},
          {"points", c.points},
          {"note", c.note}};
}

inline json to_json(const CheckReport& r) {
  json loc = json::array();
  for (const auto& l : r.localization) loc.push_back(to_json(l));
  return {{"initial", to_json(r.initial)},
          {"admissible", r.admissible},
          {"checks",
           {{"rate_monotone", to_json(r.rate_monotone)},
            {"convexity", to_json(r.convexity)},
            {"riccati", to_json(r.riccati)},
            {"envelope", to_json(r.envelope)},
            {"localization", loc},
            {"rate_consistency", to_json(r.rate_consistency)}}},
          {"t_sing", r.t_sing ? json(*r.t_sing) : json(nullptr)},
          {"t_sing_gradient", r.singularity.gradient ? json(*r.singularity.gradient) : json(nullptr)},
          {"t_sing_dt_floor", r.singularity.dt_floor ? json(*r.singularity.dt_floor) : json(nullptr)},
          {"t_star", detail::finite_or_null(r.t_star)},
          {"t_window", r.t_window},
          {"ordering_ok", r.ordering_ok},
          {"termination", to_string(r.termination)},
          {"all_pass", r.all_pass()}};
}

inline void write_series_csv(std::ostream& os, const json& resolved, const std::vector<SeriesRow>& series) {
  detail::write_header(os, "series", resolved);
  os << "t,F,Fdot,max_c,max_dvdr,mass,outflow\n";
  using detail::fmt_g17;
  for (const auto& r : series)
    os << fmt_g17(r.t) << ',' << fmt_g17(r.F) << ',' << fmt_g17(r.Fdot) << ',' << fmt_g17(r.max_c) << ','
       << fmt_g17(r.max_dvdr) << ',' << fmt_g17(r.mass) << ',' << fmt_g17(r.outflow) << '\n';
}

inline void write_snapshot_csv(std::ostream& os, const json& resolved, const FluidState& s) {
  detail::write_header(os, "snapshot", resolved);
  os << "# t = " << detail::fmt_g17(s.time) << "\n";
  os << "r,rho,v\n";
  for (std::size_t i = 0; i < s.rho.size(); ++i)
    os << detail::fmt_g17(s.grid.center(i)) << ',' << detail::fmt_g17(s.rho[i]) << ','
       << detail::fmt_g17(s.v[i]) << '\n';
}

inline const char* summary_header() {
  return "gamma,m_over_min,m,m_min,momentum_margin,relative_margin,F0,t_star,t_sing,termination,"
         "rate_monotone,convexity,riccati,envelope,localization,ordering,all_pass";
}

/// One summary line per verified case (shared by verify and sweep).
inline std::string summary_row(const RunConfig& c, const CheckReport& rep) {
  using detail::fmt_g17;
  const auto& in = rep.initial;
  const double ratio = c.m_over_min ? *c.m_over_min : in.m / in.m_min;
  std::string row;
  row += fmt_g17(c.gas.gamma) + ',' + fmt_g17(ratio) + ',' + fmt_g17(in.m) + ',' + fmt_g17(in.m_min) + ',';
  row += fmt_g17(in.cond_momentum_margin) + ',' + fmt_g17(in.relative_margin()) + ',' + fmt_g17(in.F0) + ',';
  row += fmt_g17(rep.t_star) + ',' + (rep.t_sing ? fmt_g17(*rep.t_sing) : std::string("nan")) + ',';
  row += std::string(to_string(rep.termination)) + ',';
  row += std::string(detail::check_word(rep.rate_monotone)) + ',' + detail::check_word(rep.convexity) + ',' +
         detail::check_word(rep.riccati) + ',' + detail::check_word(rep.envelope) + ',' +
         detail::localization_word(rep) + ',';
  row += std::string(rep.admissible ? (rep.ordering_ok ? "pass" : "fail") : "skip") + ',';
  row += rep.all_pass() ? "pass" : "fail";
  return row;
}

/// Generic matplotlib script for the CSVs in one output directory.
inline void write_plot_script(const fs::path& dir) {
  auto os = detail::open_out(dir / "plot.py");
  os << R"(#!/usr/bin/env python3
"""Plot eulerblow CSV output: python3 plot.py [output_dir]"""
import glob
import os
import sys

import matplotlib.pyplot as plt
import numpy as np

d = sys.argv[1] if len(sys.argv) > 1 else os.path.dirname(os.path.abspath(__file__))
series = np.genfromtxt(os.path.join(d, "series.csv"), delimiter=",", names=True, comments="#")
fig, ax = plt.subplots(2, 2, figsize=(10, 7))
for a, col in zip(ax.flat, ["F", "Fdot", "max_c", "max_dvdr"]):
    a.plot(series["t"], series[col])
    a.set_xlabel("t")
    a.set_ylabel(col)
fig.tight_layout()
fig.savefig(os.path.join(d, "series.png"), dpi=120)

snaps = sorted(glob.glob(os.path.join(d, "snapshots", "snapshot_*.csv")))
if snaps:
    fig, ax = plt.subplots(1, 2, figsize=(10, 4))
    for path in snaps[:: max(1, len(snaps) // 8)]:
        s = np.genfromtxt(path, delimiter=",", names=True, comments="#")
        ax[0].plot(s["r"], s["rho"], lw=0.8)
        ax[1].plot(s["r"], s["v"], lw=0.8)
    ax[0].set_ylabel("rho")
    ax[1].set_ylabel("v")
    for a in ax:
        a.set_xlabel("r")
    fig.tight_layout()
    fig.savefig(os.path.join(d, "snapshots.png"), dpi=120)
)";
}

// ---------------------------------------------------------------------------

inline int cmd_bessel_table(double r_min, double r_max, std::size_t n, std::ostream& out, std::ostream& err) {
  if (!(r_min > 0.0 && r_min < r_max && std::isfinite(r_max)) || n < 2) {
    err << "bessel-table: need 0 < r_min < r_max and n >= 2\n";
    return kExitBadConfig;
  }
  using detail::fmt_g17;
  out << "# eulerblow bessel-table\n# config: "
      << json{{"r_min", r_min}, {"r_max", r_max}, {"n", n}}.dump() << "\n";
  out << "r,K0,K0_prime,bound_3_over_r,bound_inv_r2\n";
  const double h = (r_max - r_min) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = i + 1 == n ? r_max : r_min + static_cast<double>(i) * h;
    out << fmt_g17(r) << ',' << fmt_g17(k0(r)) << ',' << fmt_g17(k0_prime(r)) << ','
        << fmt_g17(k0_small_radius_bound(r)) << ',' << fmt_g17(k0_prime_small_radius_bound(r)) << '\n';
  }
  return kExitOk;
}

inline int cmd_check(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto pc = prepare_case(cfg);
  json doc = to_json(pc.initial);
  doc["config"] = to_json(pc.config);
  out << doc.dump(2) << '\n';
  if (!pc.initial.admissible()) {
    err << "initial data inadmissible (momentum margin " << pc.initial.cond_momentum_margin << ")\n";
    return kExitInadmissible;
  }
  return kExitOk;
}

inline int cmd_predict(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto pc = prepare_case(cfg);
  if (!pc.initial.admissible()) {
    out << "inf\n";
    err << "initial data inadmissible: no blow-up bound\n";
    return kExitInadmissible;
  }
  out << detail::fmt_g17(pc.initial.t_star) << '\n';
  return kExitOk;
}

struct SimulateOptions {
  bool plot_script = false;
};

inline int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err,
                        const SimulateOptions& opt = {}) {
  const auto pc = prepare_case(cfg);
  if (!pc.t_end_resolved) {
    err << "solver.t_end 'auto' needs admissible initial data; set a number instead\n";
    return kExitInadmissible;
  }
  const json resolved = header_json(pc);
  const fs::path dir = pc.config.output;
  detail::ensure_dir(dir / "snapshots");

  const auto traj = run(pc.state0, pc.config.gas, pc.config.solver, pc.table);
  {
    auto os = detail::open_out(dir / "series.csv");
    write_series_csv(os, resolved, traj.series);
  }
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    char name[40];
    std::snprintf(name, sizeof name, "snapshot_%06zu.csv", k);
    auto os = detail::open_out(dir / "snapshots" / name);
    write_snapshot_csv(os, resolved, traj.snapshots[k]);
  }
  if (opt.plot_script) write_plot_script(dir);

  const auto& last = traj.series.back();
  out << "termination=" << to_string(traj.termination) << " t=" << detail::fmt_g17(last.t)
      << " steps=" << traj.series.size() - 1 << " snapshots=" << traj.snapshots.size()
      << " outflow=" << detail::fmt_g17(last.outflow) << '\n';
  if (traj.termination == Termination::PositivityFault) {
    err << "solver fault: " << traj.fault << '\n';
    return kExitSolverFault;
  }
  return kExitOk;
}

/// Result of verifying one case, plus the files it wrote.
struct VerifyOutcome {
  RunConfig resolved;
  CheckReport report;
  Trajectory trajectory;
  std::string fault;
  int exit_code = kExitOk;
};

inline int exit_code_for(const CheckReport& rep) {
  if (!rep.admissible) return kExitInadmissible;
  if (rep.termination == Termination::PositivityFault) return kExitSolverFault;
  return rep.all_pass() ? kExitOk : kExitVerifyFail;
}

/// Verify one case and write series.csv, check_report.json and summary.csv into cfg.output.
inline VerifyOutcome verify_case(const RunConfig& cfg, bool plot_script = false) {
  const auto pc = prepare_case(cfg);
  VerifyOutcome res;
  res.resolved = pc.config;
  const json resolved = header_json(pc);
  const fs::path dir = pc.config.output;
  detail::ensure_dir(dir);

  auto vr = verify_run(pc.state0, pc.config.gas, pc.config.solver, pc.config.verify, pc.table, pc.initial);
  res.report = vr.report;
  res.fault = vr.trajectory.fault;
  res.exit_code = exit_code_for(res.report);

  if (!vr.trajectory.series.empty()) {
    auto os = detail::open_out(dir / "series.csv");
    write_series_csv(os, resolved, vr.trajectory.series);
  }
  {
    json doc = to_json(res.report);
    doc["config"] = resolved.at("config");
    auto os = detail::open_out(dir / "check_report.json");
    os << doc.dump(2) << '\n';
  }
  {
    auto os = detail::open_out(dir / "summary.csv");
    detail::write_header(os, "summary", resolved);
    os << summary_header() << '\n' << summary_row(pc.config, res.report) << '\n';
  }
  if (plot_script) write_plot_script(dir);
  res.trajectory = std::move(vr.trajectory);
  return res;
}

inline void print_check_line(std::ostream& out, const CheckResult& c) {
  char buf[160];
  if (c.skipped)
    std::snprintf(buf, sizeof buf, "SKIP  %-24s %s", c.name.c_str(), c.note.c_str());
  else
    std::snprintf(buf, sizeof buf, "%s  %-24s worst margin %+.3e at t=%.6g (%zu points)", c.ok ? "PASS" : "FAIL",
                  c.name.c_str(), c.worst_margin, c.t_worst, c.points);
  out << buf << '\n';
}

inline int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err, bool plot_script = false) {
  const auto res = verify_case(cfg, plot_script);
  const auto& rep = res.report;
  if (!rep.admissible) {
    out << "SKIP  all checks: initial data inadmissible (momentum margin "
        << detail::fmt_g17(rep.initial.cond_momentum_margin) << ")\n";
    return res.exit_code;
  }
  print_check_line(out, rep.rate_monotone);
  print_check_line(out, rep.convexity);
  print_check_line(out, rep.riccati);
  print_check_line(out, rep.envelope);
  for (const auto& l : rep.localization) print_check_line(out, l);
  out << "INFO  ";
  print_check_line(out, rep.rate_consistency);
  char buf[200];
  std::snprintf(buf, sizeof buf, "%s  %-24s t_sing=%s t_star=%.6g (slack %.3g)", rep.ordering_ok ? "PASS" : "FAIL",
                "ordering", rep.t_sing ? detail::fmt_g17(*rep.t_sing).c_str() : "none", rep.t_star,
                res.resolved.verify.ordering_slack);
  out << buf << '\n';
  out << "termination=" << to_string(rep.termination) << " result=" << (rep.all_pass() ? "PASS" : "FAIL") << '\n';
  if (!res.fault.empty()) err << "solver fault: " << res.fault << '\n';
  return res.exit_code;
}

struct SweepOptions {
  unsigned jobs = 0;  ///< 0: hardware concurrency
  bool plot_script = false;
};

/// Expand the sweep block into per-case configs, gamma outer, m_over_min inner.
inline std::vector<RunConfig> expand_sweep(const RunConfig& base) {
  if (!base.sweep) throw ConfigError("sweep: config has no 'sweep' block");
  std::vector<RunConfig> cases;
  std::size_t idx = 0;
  for (double gm : base.sweep->gamma) {
    for (double ratio : base.sweep->m_over_min) {
      RunConfig c = base;
      c.sweep.reset();
      c.gas.gamma = gm;
      c.m_over_min = ratio;
      char name[32];
      std::snprintf(name, sizeof name, "case_%04zu", idx++);
      c.output = (fs::path(base.output) / name).string();
      cases.push_back(std::move(c));
    }
  }
  return cases;
}

inline int cmd_sweep(const RunConfig& base, std::ostream& out, std::ostream& err, const SweepOptions& opt = {}) {
  const auto cases = expand_sweep(base);
  detail::ensure_dir(base.output);
  std::vector<VerifyOutcome> results(cases.size());
  std::vector<std::string> errors(cases.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cases.size(); i = next++) {
      try {
        results[i] = verify_case(cases[i], opt.plot_script);
        results[i].trajectory = {};
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  unsigned jobs = opt.jobs ? opt.jobs : std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, cases.size()));
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  // Aggregate in parameter order once every case is done.
  auto os = detail::open_out(fs::path(base.output) / "sweep.csv");
  detail::write_header(os, "sweep", json{{"config", to_json(base)}});
  os << "index," << summary_header() << '\n';
  int code = kExitOk;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    if (!errors[i].empty()) {
      err << "case " << i << ": " << errors[i] << '\n';
      code = std::max(code, static_cast<int>(kExitVerifyFail));
      continue;
    }
    os << i << ',' << summary_row(results[i].resolved, results[i].report) << '\n';
    if (results[i].exit_code != kExitOk) code = std::max(code, static_cast<int>(kExitVerifyFail));
  }
  out << "sweep: " << cases.size() << " cases -> " << (fs::path(base.output) / "sweep.csv").string() << '\n';
  return code;
}

}  // namespace eulerblow
