#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "eulerblow/initdata.hpp"
#include "eulerblow/solver.hpp"

namespace eb = eulerblow;

namespace {

const eb::Reconstruction kBoth[] = {eb::Reconstruction::FirstOrder, eb::Reconstruction::MusclMinmod};
const eb::Dim kDims[] = {eb::Dim::Two, eb::Dim::Three};

eb::FluidState uniform(const eb::RadialGrid& g, eb::Dim d, double rho, double v = 0.0) {
  eb::FluidState s(g, d);
  std::fill(s.rho.begin(), s.rho.end(), rho);
  std::fill(s.v.begin(), s.v.end(), v);
  return s;
}

eb::FluidState smooth_inflow(std::size_t n, eb::Dim d, double m = 0.15) {
  eb::ProfileSpec p;
  p.m = m;
  return eb::build_initial_data(p, {1.0, 2.0}, eb::RadialGrid(10.0, n), d);
}

eb::SolverConfig config(eb::Reconstruction rec, double t_end, std::size_t stride = 100) {
  eb::SolverConfig c;
  c.reconstruction = rec;
  c.t_end = t_end;
  c.snapshot_stride = stride;
  return c;
}

// L1 distance between a coarse state and the volume average of a 2x finer one.
double coarse_fine_l1(const eb::FluidState& c, const eb::FluidState& f) {
  const auto vc = eb::cell_volumes(c.grid, c.dim), vf = eb::cell_volumes(f.grid, f.dim);
  double e = 0.0;
  for (std::size_t i = 0; i < c.rho.size(); ++i)
    e += std::abs(c.rho[i] * vc[i] - (f.rho[2 * i] * vf[2 * i] + f.rho[2 * i + 1] * vf[2 * i + 1]));
  return e;
}

}  // namespace

TEST(SolverConfig, Invariants) {
  eb::SolverConfig c;
  EXPECT_NO_THROW(c.validate());
  c.cfl = 0.0;
  EXPECT_THROW(c.validate(), eb::ConfigError);
  c.cfl = 0.95;
  EXPECT_THROW(c.validate(), eb::ConfigError);
  c = {};
  c.dt_floor = 0.0;
  EXPECT_THROW(c.validate(), eb::ConfigError);
  c = {};
  c.t_end = -1.0;
  EXPECT_THROW(c.validate(), eb::ConfigError);
  c = {};
  c.snapshot_stride = 0;
  EXPECT_THROW(c.validate(), eb::ConfigError);
}

TEST(CflDt, VacuumFallback) {
  eb::RadialGrid g(10.0, 100);
  auto cfg = config(eb::Reconstruction::MusclMinmod, 2.5);
  EXPECT_EQ(eb::cfl_dt(eb::FluidState(g, eb::Dim::Three), {1.0, 2.0}, cfg), 2.5);
}

TEST(CflDt, InverselyProportionalToWaveSpeed) {
  eb::RadialGrid g(10.0, 100);
  auto cfg = config(eb::Reconstruction::MusclMinmod, 1.0);
  const auto s = uniform(g, eb::Dim::Three, 1.0);
  // Quadrupling A doubles c.
  const double dt1 = eb::cfl_dt(s, {1.0, 2.0}, cfg), dt2 = eb::cfl_dt(s, {4.0, 2.0}, cfg);
  EXPECT_DOUBLE_EQ(dt1 / dt2, 2.0);
  EXPECT_DOUBLE_EQ(dt1, 0.8 * (0.1 / 3.0) / std::sqrt(2.0));  // c = sqrt(A gamma) at rho = 1
}

TEST(Step, ConstantStatePreserved) {
  for (eb::Dim d : kDims) {
    for (auto rec : kBoth) {
      eb::GasParams g(1.0, 1.4);
      const auto s0 = uniform(eb::RadialGrid(10.0, 200), d, 1.0);
      auto cfg = config(rec, 1.0);
      auto s = s0;
      for (int k = 0; k < 1000; ++k) s = eb::step(s, g, cfg, eb::cfl_dt(s, g, cfg)).state;
      double worst_rho = 0.0, worst_v = 0.0;
      for (std::size_t i = 0; i < s.rho.size(); ++i) {
        worst_rho = std::max(worst_rho, std::abs(s.rho[i] - 1.0));
        worst_v = std::max(worst_v, std::abs(s.v[i]));
      }
      EXPECT_LT(worst_rho, 1e-12) << eb::to_string(rec);
      EXPECT_LT(worst_v, 1e-12) << eb::to_string(rec);
    }
  }
}

TEST(Step, VacuumUnchanged) {
  for (eb::Dim d : kDims) {
    for (auto rec : kBoth) {
      const eb::FluidState s0(eb::RadialGrid(5.0, 50), d);
      const auto res = eb::step(s0, {1.0, 2.0}, config(rec, 1.0), 0.1);
      EXPECT_EQ(res.state.rho, s0.rho);
      EXPECT_EQ(res.state.v, s0.v);
      EXPECT_EQ(res.outflow, 0.0);
    }
  }
}

TEST(Step, MassTelescopes) {
  // Outflowing data: mass change per step equals the tallied boundary flux.
  for (eb::Dim d : kDims) {
    for (auto rec : kBoth) {
      eb::GasParams g(1.0, 2.0);
      eb::RadialGrid grid(3.0, 300);
      eb::FluidState s(grid, d);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double r = grid.center(i);
        s.rho[i] = 0.2 + std::exp(-(r - 1.5) * (r - 1.5));
        s.v[i] = 0.5 * r;
      }
      auto cfg = config(rec, 1.0);
      for (int k = 0; k < 50; ++k) {
        const auto res = eb::step(s, g, cfg, eb::cfl_dt(s, g, cfg));
        EXPECT_GT(res.outflow, 0.0);
        const double dm = eb::mass(res.state) - eb::mass(s);
        EXPECT_NEAR(dm, -res.outflow, 1e-12 * eb::mass(s));
        s = res.state;
      }
    }
  }
}

TEST(Step, PositivityFaultOnOversizedStep) {
  auto s = smooth_inflow(200, eb::Dim::Three, 2.0);
  eb::GasParams g(1.0, 2.0);
  auto cfg = config(eb::Reconstruction::FirstOrder, 1.0);
  EXPECT_THROW(eb::step(s, g, cfg, 200.0 * eb::cfl_dt(s, g, cfg)), eb::PositivityFault);
}

TEST(Run, ZeroEndTime) {
  const auto s0 = smooth_inflow(100, eb::Dim::Three);
  const auto traj = eb::run(s0, {1.0, 2.0}, config(eb::Reconstruction::MusclMinmod, 0.0));
  EXPECT_EQ(traj.snapshots.size(), 1u);
  EXPECT_EQ(traj.series.size(), 1u);
  EXPECT_EQ(traj.termination, eb::Termination::ReachedTEnd);
}

TEST(Run, SeriesAndSnapshotBookkeeping) {
  const auto s0 = smooth_inflow(200, eb::Dim::Two);
  const auto traj = eb::run(s0, {1.0, 2.0}, config(eb::Reconstruction::MusclMinmod, 1.0, 7));
  const std::size_t steps = traj.series.size() - 1;
  ASSERT_GT(steps, 7u);
  for (std::size_t k = 1; k < traj.series.size(); ++k) EXPECT_GT(traj.series[k].t, traj.series[k - 1].t);
  EXPECT_DOUBLE_EQ(traj.series.back().t, 1.0);
  EXPECT_EQ(traj.snapshots.size(), 1 + steps / 7 + (steps % 7 ? 1 : 0));
  EXPECT_EQ(traj.snapshots.back().time, traj.series.back().t);
}

TEST(Run, Deterministic) {
  const auto s0 = smooth_inflow(400, eb::Dim::Three, 0.5);
  const auto a = eb::run(s0, {1.0, 2.0}, config(eb::Reconstruction::MusclMinmod, 0.5));
  const auto b = eb::run(s0, {1.0, 2.0}, config(eb::Reconstruction::MusclMinmod, 0.5));
  ASSERT_EQ(a.series.size(), b.series.size());
  for (std::size_t k = 0; k < a.series.size(); ++k) {
    EXPECT_EQ(a.series[k].t, b.series[k].t);
    EXPECT_EQ(a.series[k].F, b.series[k].F);
    EXPECT_EQ(a.series[k].Fdot, b.series[k].Fdot);
    EXPECT_EQ(a.series[k].mass, b.series[k].mass);
  }
  EXPECT_EQ(a.snapshots.back().rho, b.snapshots.back().rho);
}

TEST(Run, ObserverSeesEveryRow) {
  const auto s0 = smooth_inflow(100, eb::Dim::Three);
  std::size_t calls = 0;
  const auto traj = eb::run(s0, {1.0, 2.0}, config(eb::Reconstruction::FirstOrder, 0.2),
                            eb::make_weight_table(s0.grid, s0.dim),
                            [&](const eb::FluidState& s, const eb::SeriesRow& row) {
                              EXPECT_EQ(s.time, row.t);
                              ++calls;
                            });
  EXPECT_EQ(calls, traj.series.size());
}

TEST(Run, DemoConservationPositivityAndSteepening) {
  eb::GasParams g(1.0, 2.0);
  eb::RadialGrid grid(10.0, 2000);
  const auto table = eb::make_weight_table(grid, eb::Dim::Three);
  eb::ProfileSpec p;
  p.m = 1.1 * eb::minimal_inflow_amplitude(p, g, table);
  const auto s0 = eb::build_initial_data(p, g, grid, eb::Dim::Three);
  const auto rep = eb::check_admissibility(s0, g, table);
  ASSERT_TRUE(rep.admissible());

  bool nonneg = true;
  bool origin_vacuum = true;
  double v_ratio = 0.0;
  const double g0 = eb::max_velocity_gradient(s0);
  double t_sing = -1.0;
  const auto traj = eb::run(s0, g, config(eb::Reconstruction::MusclMinmod, 1.5, 50), table,
                            [&](const eb::FluidState& s, const eb::SeriesRow& row) {
                              for (double r : s.rho) nonneg = nonneg && r >= 0.0;
                              if (t_sing < 0.0 && row.max_dvdr > 50.0 * g0) t_sing = row.t;
                              if (t_sing < 0.0) {
                                origin_vacuum = origin_vacuum && eb::origin_is_vacuum(s);
                                if (s.v[1] != 0.0) v_ratio = std::max(v_ratio, std::abs(s.v[0] / s.v[1]));
                              }
                            });
  EXPECT_EQ(traj.termination, eb::Termination::ReachedTEnd);
  EXPECT_TRUE(nonneg);
  const double m0 = traj.series.front().mass;
  for (const auto& row : traj.series) EXPECT_LT(std::abs(row.mass + row.outflow - m0) / m0, 1e-10);
  EXPECT_GT(t_sing, 0.0);
  EXPECT_LT(t_sing, rep.t_star);
  EXPECT_TRUE(origin_vacuum);
  EXPECT_LE(v_ratio, 2.0);
}

TEST(Run, TimeStepShrinksAsTheFlowSteepens) {
  eb::GasParams g(1.0, 2.0);
  eb::RadialGrid grid(10.0, 1000);
  eb::ProfileSpec p;
  p.m = 1.1 * eb::minimal_inflow_amplitude(p, g, grid, eb::Dim::Three);
  const auto s0 = eb::build_initial_data(p, g, grid, eb::Dim::Three);
  const auto traj = eb::run(s0, g, config(eb::Reconstruction::MusclMinmod, 0.9));
  const auto& s = traj.series;
  const double dt_first = s[1].t - s[0].t;
  const double dt_last = s[s.size() - 2].t - s[s.size() - 3].t;
  EXPECT_LT(dt_last, dt_first);
}

TEST(Run, SelfConvergenceOrders) {
  for (eb::Dim d : kDims) {
    for (auto rec : kBoth) {
      std::vector<eb::FluidState> finals;
      for (std::size_t n : {200, 400, 800, 1600})
        finals.push_back(eb::run(smooth_inflow(n, d), {1.0, 2.0}, config(rec, 0.25)).snapshots.back());
      const double e1 = coarse_fine_l1(finals[0], finals[1]);
      const double e2 = coarse_fine_l1(finals[1], finals[2]);
      const double e3 = coarse_fine_l1(finals[2], finals[3]);
      const double order = std::log2(e2 / e3);
      EXPECT_GT(std::log2(e1 / e2), 0.0);
      EXPECT_GE(order, rec == eb::Reconstruction::FirstOrder ? 0.8 : 1.5)
          << eb::to_string(rec) << " dim " << eb::to_int(d);
    }
  }
}

TEST(MaxVelocityGradient, LinearField) {
  eb::RadialGrid g(1.0, 10);
  eb::FluidState s(g, eb::Dim::Three);
  for (std::size_t i = 0; i < g.size(); ++i) s.v[i] = -3.0 * g.center(i);
  EXPECT_NEAR(eb::max_velocity_gradient(s), 3.0, 1e-12);
}
