// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "narrowcap/cli.hpp"

#include <cmath>
#include <functional>
#include <map>

#include "narrowcap/acceptance.hpp"
#include "narrowcap/asymptotics.hpp"
#include "narrowcap/errors.hpp"
#include "narrowcap/montecarlo.hpp"
#include "narrowcap/optimizer.hpp"
#include "narrowcap/pde.hpp"

namespace narrowcap {

namespace {

const Json& section(const Json& cfg, const char* key) {
  static const Json empty = Json::object();
  if (!cfg.contains(key)) return empty;
  const Json& v = cfg.at(key);
  if (!v.is_object()) throw ConfigError(std::string("'") + key + "' must be an object");
  return v;
}

const Json& require(const Json& cfg, const char* key) {
  if (!cfg.is_object() || !cfg.contains(key))
    throw ConfigError(std::string("missing key '") + key + "'");
  return cfg.at(key);
}

Surface load_surface(const Json& cfg) {
  if (cfg.contains("surface_file")) {
    const Json& f = cfg.at("surface_file");
    if (!f.is_string()) throw ConfigError("'surface_file' must be a path");
    Json j;
    try {
      j = Json::parse(read_file(f.get<std::string>()), nullptr, true, true);
    } catch (const Json::parse_error& e) {
      throw ConfigError(std::string("surface_file: ") + e.what());
    }
    return Surface(surface_from_json(j));
  }
  return Surface(surface_from_json(require(cfg, "surface")));
}

NPolicy load_policy(const Json& cfg) {
  const Json& p = section(cfg, "grid_policy");
  NPolicy pol;
  pol.cells_per_unit_eps = get_number(p, "cells_per_eps", pol.cells_per_unit_eps);
  pol.min_n = get_int(p, "min_n", pol.min_n);
  pol.max_n = get_int(p, "max_n", pol.max_n);
  if (!(pol.cells_per_unit_eps > 0.0) || pol.min_n < 8 || pol.max_n < pol.min_n)
    throw ConfigError("invalid grid_policy");
  return pol;
}

Json mfpt_to_json(const MFPTResult& m) {
  Json j;
  j["leading"] = m.leading;
  j["constant"] = m.constant;
  j["point_term"] = m.point_term;
  j["total"] = m.total;
  j["error_order"] = m.error_order;
  j["regular_part"] = regular_part_to_json(m.regular_part);
  return j;
}

std::vector<double> point_row(const SurfacePoint& p) {
  if (p.family == Family::RoundSphere) return {p.coords[0], p.coords[1], p.coords[2]};
  return {p.coords[0], p.coords[1]};
}

std::vector<std::string> point_header(const Surface& s) {
  if (s.family() == Family::RoundSphere) return {"x", "y", "z"};
  if (s.family() == Family::FlatUnitDisk) return {"x1", "x2"};
  return {"u", "v"};
}

CsvArtifact report_csv(const std::string& name, const ScalingReport& r) {
  CsvArtifact c{name, {"eps", "value"}, {}};
  for (size_t k = 0; k < r.eps.size(); ++k) c.rows.push_back({r.eps[k], r.values[k]});
  return c;
}

CommandResult cmd_green(const Json& cfg, const CliOptions&) {
  const Surface s = load_surface(cfg);
  GreenFunction g(s);
  const SurfacePoint src = point_from_json(s, require(cfg, "source"));
  const Json& pts = require(cfg, "points");
  if (!pts.is_array() || pts.empty()) throw ConfigError("'points' must be a non-empty array");
  CommandResult res;
  CsvArtifact csv{"green.csv", point_header(s), {}};
  for (const char* h : {"distance", "total", "log_part", "regular_part"}) csv.header.push_back(h);
  Json rows = Json::array();
  for (const auto& pj : pts) {
    const SurfacePoint p = point_from_json(s, pj);
    const GreenValue v = g.green(src, p);
    Json r;
    r["point"] = point_to_json(p);
    r["distance"] = v.distance;
    r["total"] = v.total;
    r["log_part"] = v.log_part;
    r["regular_part"] = v.regular_part;
    rows.push_back(r);
    auto row = point_row(p);
    for (double x : {v.distance, v.total, v.log_part, v.regular_part}) row.push_back(x);
    csv.rows.push_back(row);
  }
  res.json["surface"] = surface_to_json(s.spec());
  res.json["source"] = point_to_json(src);
  res.json["values"] = rows;
  res.pass = true;
  res.csv.push_back(std::move(csv));
  return res;
}

CommandResult cmd_regular_part(const Json& cfg, const CliOptions&) {
  const Surface s = load_surface(cfg);
  GreenFunction g(s);
  const SurfacePoint c = point_from_json(s, require(cfg, "center"));
  const RegularPartEstimate r = g.regular_part(c, get_number(cfg, "angle", 0.0));
  CommandResult res;
  res.json["surface"] = surface_to_json(s.spec());
  res.json["center"] = point_to_json(c);
  res.json["regular_part"] = regular_part_to_json(r);
  res.pass = true;
  CsvArtifact csv{"regular_part_ladder.csv", {"d", "raw"}, {}};
  for (const auto& [d, v] : r.ladder) csv.rows.push_back({d, v});
  res.csv.push_back(std::move(csv));
  return res;
}

CommandResult cmd_mfpt(const Json& cfg, const CliOptions&) {
  const Surface s = load_surface(cfg);
  GreenFunction g(s);
  const TrapSpec trap = trap_from_json(s, require(cfg, "trap"));
  CommandResult res;
  res.json["surface"] = surface_to_json(s.spec());
  res.json["eps"] = trap.eps;
  res.json["center"] = point_to_json(trap.center);
  if (cfg.contains("point")) {
    const SurfacePoint x = point_from_json(s, cfg.at("point"));
    res.json["mode"] = "pointwise";
    res.json["point"] = point_to_json(x);
    res.json["mfpt"] = mfpt_to_json(mfpt_pointwise(g, trap, x, get_number(cfg, "exclusion", 2.0)));
  } else {
    res.json["mode"] = "average";
    res.json["mfpt"] = mfpt_to_json(mfpt_average(g, trap));
  }
  res.pass = true;
  return res;
}

CommandResult cmd_validate_pde(const Json& cfg, const CliOptions&) {
  const Surface s = load_surface(cfg);
  GreenFunction g(s);
  const NPolicy pol = load_policy(cfg);
  CommandResult res;
  res.json["surface"] = surface_to_json(s.spec());
  if (cfg.contains("ladder")) {
    const SurfacePoint c = point_from_json(s, require(cfg, "center"));
    const ScalingReport r = asymptotic_convergence(g, c, get_numbers(cfg, "ladder"), pol);
    res.json["center"] = point_to_json(c);
    res.json["report"] = report_to_json(r);
    res.pass = r.pass;
    res.csv.push_back(report_csv("discrepancy.csv", r));
    return res;
  }
  const TrapSpec trap = trap_from_json(s, require(cfg, "trap"));
  const int N = get_int(cfg, "N", pol.grid_for(trap.eps));
  SolverOptions so;
  so.rel_tol = get_number(cfg, "rel_tol", so.rel_tol);
  const PDESolution sol = solve_trapped_bvp(s, trap, N, so);
  const double flux = flux_on_trap(sol);
  const double area = trap_area(s, trap).complement;
  const double avg = sol.average();
  const double pred = mfpt_average(g, trap).total;
  const double flux_err = std::abs(flux + area) / area;
  res.json["eps"] = trap.eps;
  res.json["center"] = point_to_json(trap.center);
  res.json["N"] = N;
  res.json["iterations"] = sol.iterations;
  res.json["residual"] = sol.residual;
  res.json["numeric_average"] = avg;
  res.json["asymptotic_prediction"] = pred;
  res.json["discrepancy"] = std::abs(avg - pred);
  res.json["flux"] = flux;
  res.json["complement_area"] = area;
  res.json["flux_relative_error"] = flux_err;
  res.pass = flux_err < 0.01;
  res.json["pass_rule"] = "flux within 1% of -|M_eps|";
  CsvArtifact prof{"normal_derivative.csv", {"angle", "d_nu_u"}, {}};
  for (const auto& [a, v] : normal_derivative_profile(sol, get_int(cfg, "profile_points", 64)))
    prof.rows.push_back({a, v});
  res.csv.push_back(std::move(prof));
  CsvArtifact hist{"residual_history.csv", {"iteration", "relative_residual"}, {}};
  for (size_t k = 0; k < sol.residual_history.size(); ++k)
    hist.rows.push_back({10.0 * k, sol.residual_history[k]});
  res.csv.push_back(std::move(hist));
  return res;
}

CommandResult cmd_validate_mc(const Json& cfg, const CliOptions& opt) {
  const Surface s = load_surface(cfg);
  GreenFunction g(s);
  const TrapSpec trap = trap_from_json(s, require(cfg, "trap"));
  MCConfig mc = mc_from_json(s, section(cfg, "mc"));
  if (opt.seed) mc.seed = *opt.seed;
  mc.threads = opt.threads;
  mc.keep_samples = opt.format != "json";
  const double z_max = get_number(cfg, "z_max", 3.0);
  const double tol = get_number(cfg, "tolerance", 0.0);

  const MFPTResult pred = mc.start ? mfpt_pointwise(g, trap, *mc.start) : mfpt_average(g, trap);
  CommandResult res;
  double mean, se;
  bool valid;
  std::vector<double> samples;
  if (cfg.contains("dt_ladder")) {
    BiasProbe bp = bias_probe(s, trap, mc, get_numbers(cfg, "dt_ladder"));
    mean = bp.intercept;
    se = bp.intercept_stderr;
    valid = bp.report.pass;
    res.json["n_censored"] = bp.levels.front().n_censored;
    for (const auto& l : bp.levels) res.json["n_censored"] = std::max(res.json["n_censored"].get<int>(), l.n_censored);
    res.json["dt"] = bp.report.eps;
    res.json["bias_probe"] = report_to_json(bp.report);
    samples = std::move(bp.levels.back().samples);
  } else {
    MCEstimate e = simulate_first_passage(s, trap, mc);
    mean = e.mean;
    se = e.std_error;
    valid = e.valid;
    res.json["n_censored"] = e.n_censored;
    res.json["dt"] = e.dt;
    res.json["dt_floor"] = e.dt_floor;
    res.json["dt_min_used"] = e.dt_min_used;
    res.json["mean_steps"] = e.mean_steps;
    samples = std::move(e.samples);
  }
  const double z = (mean - pred.total) / se;
  res.json["mean"] = mean;
  res.json["stderr"] = se;
  res.json["n_paths"] = mc.n_paths;
  res.json["seed"] = mc.seed;
  res.json["step_variance_factor"] = mc.step_variance_factor;
  res.json["start"] = mc.start ? point_to_json(*mc.start) : Json("uniform");
  res.json["asymptotic_prediction"] = pred.total;
  res.json["z_score"] = z;
  res.json["valid"] = valid;
  res.pass = valid && std::abs(mean - pred.total) <= z_max * se + tol;
  if (!samples.empty()) {
    CsvArtifact c{"tau_samples.csv", {"path", "tau"}, {}};
    for (size_t k = 0; k < samples.size(); ++k) c.rows.push_back({static_cast<double>(k), samples[k]});
    res.csv.push_back(std::move(c));
  }
  return res;
}

CommandResult cmd_scaling(const Json& cfg, const CliOptions&) {
  const Surface s = load_surface(cfg);
  GreenFunction g(s);
  const SurfacePoint c = point_from_json(s, require(cfg, "center"));
  const Json& qj = require(cfg, "quantity");
  if (!qj.is_string()) throw ConfigError("'quantity' must be a string");
  ScalingQuantity q;
  try {
    q = parse_quantity(qj.get<std::string>());
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  const ScalingReport r = scaling_check(g, c, q, get_numbers(cfg, "ladder"), load_policy(cfg));
  CommandResult res;
  res.json["surface"] = surface_to_json(s.spec());
  res.json["center"] = point_to_json(c);
  res.json["report"] = report_to_json(r);
  res.pass = r.pass;
  res.csv.push_back(report_csv("scaling.csv", r));
  return res;
}

CommandResult cmd_optimize(const Json& cfg, const CliOptions& opt) {
  const Surface s = load_surface(cfg);
  GreenFunction g(s);
  OptimizerOptions o;
  o.coarse_n = get_int(cfg, "coarse_n", o.coarse_n);
  o.refine_iters = get_int(cfg, "refine_iters", o.refine_iters);
  o.tolerance = get_number(cfg, "tolerance", o.tolerance);
  o.shift = get_number(cfg, "shift", 0.0);
  if (cfg.contains("start")) o.seed = point_from_json(s, cfg.at("start"));
  o.threads = opt.threads;
  const OptimizationResult r = optimize_trap_center(g, o);
  CommandResult res;
  res.json["surface"] = surface_to_json(s.spec());
  res.json["best_center"] = point_to_json(r.best_center);
  res.json["best_value"] = r.best_value;
  res.json["degenerate"] = r.degenerate;
  res.json["converged"] = r.converged;
  res.json["iterations"] = r.iterations;
  if (!r.warning.empty()) res.json["warning"] = r.warning;
  Json tr = Json::array();
  for (const auto& t : r.trace) tr.push_back(Json{{"center", point_to_json(t.center)}, {"value", t.value}});
  res.json["trace"] = tr;
  const RobinLandscape& L = *r.landscape;
  res.json["landscape"] = Json{{"n", L.n},
                               {"min", L.min_value},
                               {"max", L.max_value},
                               {"spread", L.spread()},
                               {"max_extrapolation_error", L.max_error}};
  res.pass = r.degenerate || r.converged;
  CsvArtifact c{"landscape.csv", {"a", "b", "R", "extrapolation_error"}, {}};
  for (size_t k = 0; k < L.values.size(); ++k) c.rows.push_back({L.a[k], L.b[k], L.values[k], L.errors[k]});
  res.csv.push_back(std::move(c));
  return res;
}

CommandResult cmd_acceptance(const Json&, const CliOptions& opt) {
  if (opt.criterion < 1 || opt.criterion > kCriterionCount)
    throw ConfigError("--criterion must be between 1 and " + std::to_string(kCriterionCount));
  const CriterionResult c = run_criterion(opt.criterion, opt.threads);
  CommandResult res;
  res.json["criterion"] = c.id;
  res.json["title"] = c.title;
  res.json["details"] = c.details;
  res.json["seconds"] = c.seconds;
  res.pass = c.pass;
  return res;
}

using Handler = std::function<CommandResult(const Json&, const CliOptions&)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> h = {
      {"green", cmd_green},       {"regular-part", cmd_regular_part},
      {"mfpt", cmd_mfpt},         {"validate-pde", cmd_validate_pde},
      {"validate-mc", cmd_validate_mc}, {"scaling", cmd_scaling},
      {"optimize", cmd_optimize}, {"acceptance", cmd_acceptance}};
  return h;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {
      "green", "regular-part", "mfpt", "validate-pde", "validate-mc",
      "scaling", "optimize", "acceptance"};
  return names;
}

CommandResult run_command(const std::string& command, const Json& config,
                          const CliOptions& opt) {
  auto it = handlers().find(command);
  if (it == handlers().end()) throw ConfigError("unknown command '" + command + "'");
  if (!config.is_object()) throw ConfigError("config must be a JSON object");
  if (opt.format != "json" && opt.format != "csv" && opt.format != "both")
    throw ConfigError("--format must be json, csv or both");
  CommandResult r = it->second(config, opt);
  Json out;
  out["schema_version"] = 1;
  out["command"] = command;
  for (auto& [k, v] : r.json.items()) out[k] = v;
  out["pass"] = r.pass;
  r.json = std::move(out);
  return r;
}

Json error_json(const std::string& kind, const std::string& message) {
  Json j;
  j["schema_version"] = 1;
  j["pass"] = false;
  j["error"] = Json{{"kind", kind}, {"message", message}};
  return j;
}

}  // namespace narrowcap
