#pragma once

// Run configuration: one JSON document, unknown keys rejected.
//
// {
//   "gas":     {"A": 1, "gamma": 2},
//   "dim":     3,
//   "grid":    {"r_max": 10, "n_cells": 2000},
//   "profile": {"s": 1, "alpha": 2, "beta": 1, "m_over_min": 1.1},   // or "m": 0.13
//   "solver":  {"cfl": 0.8, "reconstruction": "muscl_minmod", "t_end": "auto",
//               "snapshot_stride": 200, "dt_floor": "auto"},
//   "verify":  {"tol": 0.01, "singularity_factor": 50, "r0": [0.5, 1, 2]},
//   "output":  "out/demo",
//   "sweep":   {"gamma": [1.4, 2, 3], "m_over_min": [1.1, 1.5]}
// }
//
// "t_end": "auto" resolves to (1 + ordering_slack) t*; "dt_floor": "auto" to 1e-10 t_end.

#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "gas.hpp"
#include "initdata.hpp"
#include "radial.hpp"
#include "solver.hpp"
#include "verifier.hpp"

namespace eulerblow {

using json = nlohmann::json;

struct SweepSpec {
  std::vector<double> gamma;
  std::vector<double> m_over_min;
};

struct RunConfig {
  GasParams gas{1.0, 2.0};
  Dim dim = Dim::Three;
  double r_max = 40.0;
  std::size_t n_cells = 2000;
  ProfileSpec profile;
  std::optional<double> m_over_min;  ///< when set, m = m_over_min * m_min
  SolverConfig solver;
  bool t_end_auto = true;
  bool dt_floor_auto = true;
  VerifyConfig verify;
  std::string output = "out";
  std::optional<SweepSpec> sweep;

  RadialGrid grid() const { return RadialGrid(r_max, n_cells); }
};

namespace detail {

inline void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                           const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigError(where + ": unknown key '" + it.key() + "'");
}

inline double get_number(const json& obj, const char* key, double fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
  return v.get<double>();
}

inline std::size_t get_count(const json& v, const std::string& where) {
  if (!v.is_number_integer() || v.get<long long>() < 1) throw ConfigError(where + ": expected a positive integer");
  return v.get<std::size_t>();
}

inline std::vector<double> get_number_list(const json& v, const std::string& where) {
  std::vector<double> out;
  if (v.is_number()) {
    out.push_back(v.get<double>());
    return out;
  }
  if (!v.is_array() || v.empty()) throw ConfigError(where + ": expected a number or non-empty array");
  for (const auto& x : v) {
    if (!x.is_number()) throw ConfigError(where + ": array entries must be numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

inline Reconstruction parse_reconstruction(const std::string& s) {
  if (s == "first_order") return Reconstruction::FirstOrder;
  if (s == "muscl_minmod") return Reconstruction::MusclMinmod;
  throw ConfigError("solver.reconstruction: expected 'first_order' or 'muscl_minmod'");
}

}  // namespace detail

inline RunConfig parse_config(const json& doc) {
  using detail::get_number;
  detail::reject_unknown(doc, {"gas", "dim", "grid", "profile", "solver", "verify", "output", "sweep"},
                         "config");
  RunConfig c;
  if (doc.contains("gas")) {
    const auto& g = doc["gas"];
    detail::reject_unknown(g, {"A", "gamma"}, "gas");
    c.gas.A = get_number(g, "A", c.gas.A, "gas");
    c.gas.gamma = get_number(g, "gamma", c.gas.gamma, "gas");
  }
  c.gas.validate();

  if (doc.contains("dim")) {
    if (!doc["dim"].is_number_integer()) throw ConfigError("dim: expected 2 or 3");
    c.dim = dim_from_int(doc["dim"].get<int>());
  }

  if (doc.contains("grid")) {
    const auto& g = doc["grid"];
    detail::reject_unknown(g, {"r_max", "n_cells"}, "grid");
    c.r_max = get_number(g, "r_max", c.r_max, "grid");
    if (g.contains("n_cells")) c.n_cells = detail::get_count(g["n_cells"], "grid.n_cells");
  }
  (void)c.grid();  // validates

  if (doc.contains("profile")) {
    const auto& p = doc["profile"];
    detail::reject_unknown(p, {"s", "m", "m_over_min", "alpha", "beta"}, "profile");
    c.profile.s = get_number(p, "s", c.profile.s, "profile");
    c.profile.alpha = get_number(p, "alpha", c.profile.alpha, "profile");
    c.profile.beta = get_number(p, "beta", c.profile.beta, "profile");
    if (p.contains("m") && p.contains("m_over_min"))
      throw ConfigError("profile: give either 'm' or 'm_over_min', not both");
    if (p.contains("m")) c.profile.m = get_number(p, "m", 0.0, "profile");
    if (p.contains("m_over_min")) c.m_over_min = get_number(p, "m_over_min", 1.0, "profile");
  }
  c.profile.validate();

  if (doc.contains("solver")) {
    const auto& s = doc["solver"];
    detail::reject_unknown(s, {"cfl", "reconstruction", "t_end", "snapshot_stride", "dt_floor"}, "solver");
    c.solver.cfl = get_number(s, "cfl", c.solver.cfl, "solver");
    if (s.contains("reconstruction")) {
      if (!s["reconstruction"].is_string()) throw ConfigError("solver.reconstruction: expected a string");
      c.solver.reconstruction = detail::parse_reconstruction(s["reconstruction"].get<std::string>());
    }
    if (s.contains("t_end") && !(s["t_end"].is_string() && s["t_end"] == "auto")) {
      c.solver.t_end = get_number(s, "t_end", 0.0, "solver");
      c.t_end_auto = false;
    }
    if (s.contains("dt_floor") && !(s["dt_floor"].is_string() && s["dt_floor"] == "auto")) {
      c.solver.dt_floor = get_number(s, "dt_floor", 0.0, "solver");
      c.dt_floor_auto = false;
    }
    if (s.contains("snapshot_stride")) c.solver.snapshot_stride = detail::get_count(s["snapshot_stride"], "solver.snapshot_stride");
  }
  if (!c.t_end_auto && c.dt_floor_auto) c.solver.dt_floor = 1e-10 * std::max(c.solver.t_end, 1e-300);
  if (!c.t_end_auto) c.solver.validate();
  if (!(c.solver.cfl > 0.0 && c.solver.cfl <= 0.9)) throw ConfigError("solver: cfl must lie in (0, 0.9]");
  if (c.solver.snapshot_stride == 0) throw ConfigError("solver: snapshot_stride must be >= 1");

  if (doc.contains("verify")) {
    const auto& v = doc["verify"];
    detail::reject_unknown(v, {"tol", "singularity_factor", "r0", "ordering_slack", "rate_consistency_tol",
                               "smooth_fraction", "flip_velocity_sign"},
                           "verify");
    auto& vc = c.verify;
    vc.tol = get_number(v, "tol", vc.tol, "verify");
    vc.singularity_factor = get_number(v, "singularity_factor", vc.singularity_factor, "verify");
    vc.ordering_slack = get_number(v, "ordering_slack", vc.ordering_slack, "verify");
    vc.rate_consistency_tol = get_number(v, "rate_consistency_tol", vc.rate_consistency_tol, "verify");
    vc.smooth_fraction = get_number(v, "smooth_fraction", vc.smooth_fraction, "verify");
    if (v.contains("r0")) vc.r0 = detail::get_number_list(v["r0"], "verify.r0");
    if (v.contains("flip_velocity_sign")) {
      if (!v["flip_velocity_sign"].is_boolean()) throw ConfigError("verify.flip_velocity_sign: expected a boolean");
      vc.flip_velocity_sign = v["flip_velocity_sign"].get<bool>();
    }
  }
  c.verify.validate();
  for (double r0 : c.verify.r0)
    if (r0 > c.r_max) throw ConfigError("verify.r0 must not exceed grid.r_max");

  if (doc.contains("output")) {
    if (!doc["output"].is_string()) throw ConfigError("output: expected a directory path");
    c.output = doc["output"].get<std::string>();
  }

  if (doc.contains("sweep")) {
    const auto& s = doc["sweep"];
    detail::reject_unknown(s, {"gamma", "m_over_min"}, "sweep");
    SweepSpec sw;
    sw.gamma = s.contains("gamma") ? detail::get_number_list(s["gamma"], "sweep.gamma")
                                   : std::vector<double>{c.gas.gamma};
    if (s.contains("m_over_min"))
      sw.m_over_min = detail::get_number_list(s["m_over_min"], "sweep.m_over_min");
    else if (c.m_over_min)
      sw.m_over_min = {*c.m_over_min};
    else
      throw ConfigError("sweep: needs 'm_over_min' values (here or in profile)");
    for (double gm : sw.gamma) GasParams(c.gas.A, gm);
    c.sweep = std::move(sw);
  }
  return c;
}

inline RunConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc);
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

/// Configuration as JSON; parse_config(to_json(c)) reproduces c. A relative
/// amplitude is kept as m_over_min (the resolved m is reported separately).
inline json to_json(const RunConfig& c) {
  json j;
  j["gas"] = {{"A", c.gas.A}, {"gamma", c.gas.gamma}};
  j["dim"] = to_int(c.dim);
  j["grid"] = {{"r_max", c.r_max}, {"n_cells", c.n_cells}};
  j["profile"] = {{"s", c.profile.s}, {"alpha", c.profile.alpha}, {"beta", c.profile.beta}};
  if (c.m_over_min)
    j["profile"]["m_over_min"] = *c.m_over_min;
  else
    j["profile"]["m"] = c.profile.m;
  j["solver"] = {{"cfl", c.solver.cfl},
                 {"reconstruction", to_string(c.solver.reconstruction)},
                 {"t_end", c.t_end_auto ? json("auto") : json(c.solver.t_end)},
                 {"snapshot_stride", c.solver.snapshot_stride},
                 {"dt_floor", c.dt_floor_auto ? json("auto") : json(c.solver.dt_floor)}};
  j["verify"] = {{"tol", c.verify.tol},
                 {"singularity_factor", c.verify.singularity_factor},
                 {"r0", c.verify.r0},
                 {"ordering_slack", c.verify.ordering_slack},
                 {"rate_consistency_tol", c.verify.rate_consistency_tol},
                 {"smooth_fraction", c.verify.smooth_fraction},
                 {"flip_velocity_sign", c.verify.flip_velocity_sign}};
  j["output"] = c.output;
  if (c.sweep) j["sweep"] = {{"gamma", c.sweep->gamma}, {"m_over_min", c.sweep->m_over_min}};
  return j;
}

}  // namespace eulerblow
