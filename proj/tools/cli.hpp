// Copyright 2026 The contactig Authors
//
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


// The `contactig` command line: simulate, estimate, infogain, identify and
// gradient. Configs are JSON, data is CSV. Every run writes
// assumptions.json next to its outputs; that file is itself a config that
// reproduces the run.
//
// Exit codes: 0 success, 2 bad config / arguments / input files,
// 3 numerical failure (divergence, non-convergence, non-PD covariance).

#ifndef CONTACTIG_TOOLS_CLI_HPP_
#define CONTACTIG_TOOLS_CLI_HPP_

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "contactig/contactig.hpp"

namespace contactig::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitConfig = 2,
  kExitNumerical = 3,
};

struct Options {
  std::string config;  // empty: defaults only
  std::string trace;
  std::string out;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<double> threshold_newtons;
};

namespace detail {

namespace fs = std::filesystem;

inline void write_file(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ArgumentError("cannot open '" + path.string() + "' for writing");
  os << text;
  if (!os) throw ArgumentError("failed writing '" + path.string() + "'");
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

inline fs::path out_path(const Options& o, const std::string& name) {
  return fs::path(o.out_dir) / name;
}

inline std::string absolute(const std::string& p) {
  return fs::absolute(fs::path(p)).lexically_normal().string();
}

inline Json load_config(const Options& o) {
  return o.config.empty() ? Json::object() : load_json_file(o.config);
}

inline void begin(ObjectReader& r, const std::string& command) {
  check_schema_version(r);
  if (r.has("command")) {
    const std::string c = r.string("command");
    if (c != command) {
      throw ConfigError(r.child("command"),
                        "config is for '" + c + "', not '" + command + "'");
    }
  }
}

inline Json header(const std::string& command) {
  return Json{{"schema_version", kSchemaVersion}, {"command", command}};
}

inline std::uint64_t seed_field(ObjectReader& r, const Options& o) {
  const long long s =
      r.integer("seed", static_cast<long long>(kDefaultSeed));
  if (s < 0) throw ConfigError(r.child("seed"), "must be >= 0");
  return o.seed.value_or(static_cast<std::uint64_t>(s));
}

inline double positive(ObjectReader& r, const std::string& key,
                       double fallback) {
  const double v = r.number(key, fallback);
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ConfigError(r.child(key), "must be a finite number > 0");
  }
  return v;
}

inline std::vector<TwoMassModel> models_from_json(const Json& j,
                                                  const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of models");
  if (j.empty()) throw ConfigError(path, "empty mode list");
  std::vector<TwoMassModel> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(model_from_json(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

inline Json models_to_json(std::span<const TwoMassModel> models) {
  Json a = Json::array();
  for (const TwoMassModel& m : models) a.push_back(model_to_json(m));
  return a;
}

inline BeliefVector prior_field(ObjectReader& r, std::size_t n_modes) {
  if (!r.has("prior")) return BeliefVector::uniform(static_cast<Eigen::Index>(n_modes));
  BeliefVector b = belief_from_json(r.at("prior"), r.child("prior"));
  if (static_cast<std::size_t>(b.size()) != n_modes) {
    throw ConfigError(r.child("prior"),
                      std::to_string(b.size()) + " entries for " +
                          std::to_string(n_modes) + " modes");
  }
  return b;
}

inline Json vector_to_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.begin(), v.end());
}

inline Json gaussian_to_json(const Gaussian& g) {
  if (g.dim() == 1) return Json{{"mean", g.mean()[0]}, {"variance", g.cov()(0, 0)}};
  return Json{{"mean", vector_to_json(g.mean())}, {"cov", matrix_to_json(g.cov())}};
}

inline Json latency_to_json(const std::optional<DetectionLatency>& l,
                            double ts) {
  if (!l) return nullptr;
  Json j{{"switch_index", l->switch_index},
         {"switch_time", static_cast<double>(l->switch_index) * ts},
         {"new_mode", l->new_mode}};
  j["samples"] = l->samples ? Json(*l->samples) : Json(nullptr);
  j["seconds"] = l->seconds ? Json(*l->seconds) : Json(nullptr);
  return j;
}

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  int n = 0;
};

inline Range range_from_json(const Json& j, const std::string& path,
                             Range fallback) {
  ObjectReader r(j, path);
  Range g{r.number("lo", fallback.lo), r.number("hi", fallback.hi),
          static_cast<int>(r.integer("n", fallback.n))};
  r.finish();
  if (g.n < 1 || (g.n > 1 && !(g.hi > g.lo))) {
    throw ConfigError(path, "need n >= 1 and hi > lo");
  }
  return g;
}

inline Json range_to_json(const Range& g) {
  return Json{{"lo", g.lo}, {"hi", g.hi}, {"n", g.n}};
}

inline Eigen::MatrixXd transition_from_json(const Json& j,
                                            const std::string& path,
                                            Eigen::Index n) {
  Eigen::MatrixXd t;
  if (j.is_string()) {
    if (j.get<std::string>() != "identity") {
      throw ConfigError(path, "expected \"identity\", {\"switch_probability\": rho} or a matrix");
    }
    t = Eigen::MatrixXd::Identity(n, n);
  } else if (j.is_object()) {
    ObjectReader r(j, path);
    const double rho = r.number("switch_probability");
    r.finish();
    if (!(rho >= 0.0 && rho < 1.0)) {
      throw ConfigError(path + ".switch_probability", "must be in [0, 1)");
    }
    t = sticky_transition(n, rho);
  } else {
    t = matrix_from_json(j, path);
  }
  try {
    check_transition(t, n);
  } catch (const ArgumentError& e) {
    throw ConfigError(path, e.what());
  }
  return t;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// simulate

struct SimulateConfig {
  std::uint64_t seed = kDefaultSeed;
  double duration = 1.0;
  std::vector<TwoMassModel> models;
  std::vector<ModeInterval> schedule;
  InputSignal input;
  std::optional<Eigen::Vector2d> initial_state;
};

// Defaults: one second of the flex-joint plant, free space for the first
// half and contact for the second, q1 held at -0.2 mm.
inline SimulateConfig parse_simulate(ObjectReader& r, const Options& o) {
  SimulateConfig c;
  c.seed = detail::seed_field(r, o);
  c.duration = detail::positive(r, "duration", 1.0);
  if (r.has("models") && r.has("model")) {
    throw ConfigError(r.child("model"), "give either 'model' or 'models'");
  }
  if (r.has("models")) {
    c.models = detail::models_from_json(r.at("models"), r.child("models"));
  } else {
    const TwoMassModel contact =
        r.has("model") ? model_from_json(r.at("model"), r.child("model"))
                       : flex_joints().model;
    c.models = free_and_contact(contact);
  }
  if (r.has("schedule")) {
    c.schedule = schedule_from_json(r.at("schedule"), r.child("schedule"));
  } else if (c.models.size() == 1) {
    c.schedule = {{0.0, c.duration, 0}};
  } else {
    c.schedule = {{0.0, 0.5 * c.duration, 0}, {0.5 * c.duration, c.duration, 1}};
  }
  try {
    contactig::detail::check_schedule(c.schedule, c.duration, c.models.size());
  } catch (const ArgumentError& e) {
    throw ConfigError(r.child("schedule"), e.what());
  }
  c.input = r.has("input") ? input_from_json(r.at("input"), r.child("input"))
                           : InputSignal(ConstantInput{-0.2e-3});
  if (r.has("initial_state")) {
    const std::vector<double> x0 = r.numbers("initial_state");
    if (x0.size() != 2) {
      throw ConfigError(r.child("initial_state"), "expected [q2, dq2]");
    }
    c.initial_state = Eigen::Vector2d(x0[0], x0[1]);
  }
  return c;
}

inline Json simulate_to_json(const SimulateConfig& c) {
  Json j{{"seed", c.seed},
         {"duration", c.duration},
         {"models", detail::models_to_json(c.models)},
         {"schedule", schedule_to_json(c.schedule)},
         {"input", input_to_json(c.input)}};
  if (c.initial_state) {
    j["initial_state"] = {(*c.initial_state)[0], (*c.initial_state)[1]};
  }
  return j;
}

inline Trace run_simulation(const SimulateConfig& c) {
  const InputSignal& input = c.input;
  return simulate(c.models, c.schedule,
                  [&input](double t) { return evaluate(input, t); }, c.duration,
                  c.seed, c.initial_state);
}

inline void cmd_simulate(const Options& o) {
  const Json cfg = detail::load_config(o);
  ObjectReader r(cfg, "config");
  detail::begin(r, "simulate");
  const SimulateConfig c = parse_simulate(r, o);
  r.finish();

  const Trace trace = run_simulation(c);
  std::ostringstream csv;
  write_trace_csv(csv, trace);
  detail::write_file(detail::out_path(o, "trace.csv"), csv.str());

  Json a = detail::header("simulate");
  a.update(simulate_to_json(c));
  detail::write_file(detail::out_path(o, "assumptions.json"), detail::dump(a));
}

// ---------------------------------------------------------------------------
// estimate

struct EstimateConfig {
  std::optional<std::string> trace_path;
  std::optional<SimulateConfig> simulate;
  std::vector<FilterMode> modes;
  std::optional<BeliefVector> prior;
  FilterOptions filter;
};

inline EstimateConfig parse_estimate(const Json& cfg, const Options& o) {
  ObjectReader r(cfg, "config");
  detail::begin(r, "estimate");
  EstimateConfig c;
  std::optional<std::string> trace =
      r.has("trace") ? std::optional(r.string("trace")) : std::nullopt;
  if (!o.trace.empty()) trace = o.trace;
  if (r.has("simulate")) {
    if (trace) throw ConfigError(r.child("simulate"), "give either 'trace' or 'simulate'");
    ObjectReader s(r.at("simulate"), r.child("simulate"));
    c.simulate = parse_simulate(s, o);
    s.finish();
  } else if (trace) {
    c.trace_path = detail::absolute(*trace);
  } else {
    throw ConfigError("config.trace", "missing field (or give 'simulate')");
  }

  const Json& modes = r.at("modes");
  if (!modes.is_array()) throw ConfigError(r.child("modes"), "expected an array");
  if (modes.empty()) throw ConfigError(r.child("modes"), "empty mode list");
  for (std::size_t i = 0; i < modes.size(); ++i) {
    c.modes.push_back(filter_mode_from_json(
        modes[i], r.child("modes") + "[" + std::to_string(i) + "]"));
  }
  const auto n = static_cast<Eigen::Index>(c.modes.size());
  c.prior = detail::prior_field(r, c.modes.size());
  c.filter.transition =
      r.has("transition")
          ? detail::transition_from_json(r.at("transition"), r.child("transition"), n)
          : Eigen::MatrixXd(Eigen::MatrixXd::Identity(n, n));
  c.filter.sigma_f = detail::positive(r, "sigma_f", kDefaultForceNoise);
  if (r.has("initial_mean")) {
    const std::vector<double> m = r.numbers("initial_mean");
    if (m.size() != 2) throw ConfigError(r.child("initial_mean"), "expected [q2, dq2]");
    c.filter.initial_mean = Eigen::Vector2d(m[0], m[1]);
  }
  if (r.has("initial_variance")) {
    const std::vector<double> v = r.numbers("initial_variance");
    if (v.size() != 2 || !(v[0] > 0.0) || !(v[1] > 0.0)) {
      throw ConfigError(r.child("initial_variance"), "expected two positive variances");
    }
    c.filter.initial_variance = Eigen::Vector2d(v[0], v[1]);
  }
  const long long debounce = r.integer("debounce", 5);
  if (debounce < 1) throw ConfigError(r.child("debounce"), "must be >= 1");
  c.filter.debounce = static_cast<std::size_t>(debounce);
  c.filter.threshold_newtons = o.threshold_newtons.value_or(
      r.number("threshold_newtons", c.filter.threshold_newtons));
  if (!(c.filter.threshold_newtons >= 0.0)) {
    throw ConfigError(r.child("threshold_newtons"), "must be >= 0");
  }
  r.finish();
  return c;
}

inline Json estimate_to_json(const EstimateConfig& c) {
  Json j = detail::header("estimate");
  if (c.trace_path) j["trace"] = *c.trace_path;
  if (c.simulate) j["simulate"] = simulate_to_json(*c.simulate);
  Json modes = Json::array();
  for (const FilterMode& m : c.modes) modes.push_back(filter_mode_to_json(m));
  j["modes"] = modes;
  j["prior"] = belief_to_json(*c.prior);
  j["transition"] = matrix_to_json(*c.filter.transition);
  j["sigma_f"] = c.filter.sigma_f;
  if (c.filter.initial_mean) {
    j["initial_mean"] = detail::vector_to_json(*c.filter.initial_mean);
  }
  j["initial_variance"] = detail::vector_to_json(c.filter.initial_variance);
  j["debounce"] = c.filter.debounce;
  j["threshold_newtons"] = c.filter.threshold_newtons;
  return j;
}

inline void cmd_estimate(const Options& o) {
  const EstimateConfig c = parse_estimate(detail::load_config(o), o);
  const Trace trace =
      c.simulate ? run_simulation(*c.simulate) : read_trace_csv(*c.trace_path);
  const FilterResult res = run_filter(trace, c.modes, *c.prior, c.filter);
  const double ts = trace.sample_period();

  std::ostringstream csv;
  write_belief_csv(csv, trace, res);
  detail::write_file(detail::out_path(o, "belief.csv"), csv.str());

  Json names = Json::array();
  for (const FilterMode& m : c.modes) names.push_back(m.name);
  Json summary{{"schema_version", kSchemaVersion},
               {"samples", trace.size()},
               {"sample_period", ts},
               {"modes", names},
               {"prior_entropy", belief_entropy(*c.prior)},
               {"total_entropy", res.total_entropy},
               {"degenerate_steps", res.degenerate_steps},
               {"final_belief", belief_to_json(res.beliefs.back())},
               {"final_map_mode", res.map_mode.back()},
               {"debounce", c.filter.debounce},
               {"threshold_newtons", c.filter.threshold_newtons},
               {"latency", detail::latency_to_json(res.latency, ts)},
               {"threshold_latency",
                detail::latency_to_json(res.threshold_latency, ts)}};
  detail::write_file(detail::out_path(o, "summary.json"), detail::dump(summary));
  detail::write_file(detail::out_path(o, "assumptions.json"),
                     detail::dump(estimate_to_json(c)));
}

// ---------------------------------------------------------------------------
// infogain

namespace detail {

inline Json report_to_json(const InfoGainReport& rep) {
  Json dists = Json::array();
  for (const Gaussian& g : rep.per_mode_distributions) {
    dists.push_back(gaussian_to_json(g));
  }
  Json gains = Json::array();
  for (const auto& g : rep.gains) {
    if (!g) {
      gains.push_back(nullptr);
      continue;
    }
    gains.push_back({{"P", matrix_to_json(g->P)},
                     {"P_plus", matrix_to_json(g->P_plus)},
                     {"iterations", g->iterations},
                     {"residual", g->residual}});
  }
  const InfoGainAssumptions& a = rep.assumptions;
  return Json{{"lower_bound", rep.lower_bound},
              {"prior_entropy", rep.prior_entropy},
              {"saturated", rep.saturated},
              {"saturation", rep.saturation},
              {"per_mode_distributions", dists},
              {"steady_state", gains},
              {"assumptions",
               {{"gap", a.gap},
                {"prior", a.prior},
                {"sigma_w", a.sigma_w},
                {"sigma_f", a.sigma_f},
                {"Ts", a.Ts},
                {"eval_time", a.eval_time},
                {"covariance", a.covariance},
                {"dare_tolerance", a.dare_tolerance}}}};
}

// Sweepable scalars of the partially observed bound.
inline bool sweep_applies(const std::string& p) {
  return p == "K1" || p == "M2" || p == "B2" || p == "K2" || p == "sigma_w" ||
         p == "sigma_f" || p == "gap";
}

inline void set_parameter(TwoMassModel& m, const std::string& p, double v) {
  if (p == "K1") m.K1 = v;
  else if (p == "M2") m.M2 = v;
  else if (p == "B2") m.B2 = v;
  else if (p == "K2") m.K2 = v;
  else if (p == "sigma_w") m.sigma_w = v;
  else if (p == "sigma_f") m.sigma_f = v;
}

}  // namespace detail

struct SurfaceConfig {
  detail::Range mu2{-5.0, 5.0, 101};
  detail::Range sigma2{0.025, 3.0, 120};
  double mu1 = 0.0;
  double sigma1 = 1.0;
};

struct PartialConfig {
  std::vector<TwoMassModel> models;
  double gap = 0.2e-3;
  std::optional<BeliefVector> prior;
  double eval_time = kDefaultEvalTime;
  double dare_tolerance = 1e-12;
  std::optional<std::string> sweep_parameter;
  std::size_t sweep_mode = 0;
  std::vector<double> sweep_values;
  std::size_t monte_carlo_samples = 0;  // 0: skip
};

struct FullyObservedConfig {
  double k1 = 0.0;
  double gap = 0.0;
  double sigma_f = kDefaultForceNoise;
  std::optional<BeliefVector> prior;
};

struct TableConfig {
  std::vector<NamedModel> conditions;
  std::vector<double> sigma_w;
  std::vector<double> gaps;
  double eval_time = kDefaultEvalTime;
  std::vector<std::string> expected_ordering;
};

inline void infogain_surface(ObjectReader& r, Json& a, const Options& o) {
  SurfaceConfig c;
  if (r.has("mu2")) c.mu2 = detail::range_from_json(r.at("mu2"), r.child("mu2"), c.mu2);
  if (r.has("sigma2")) {
    c.sigma2 = detail::range_from_json(r.at("sigma2"), r.child("sigma2"), c.sigma2);
  }
  if (!(c.sigma2.lo > 0.0)) throw ConfigError(r.child("sigma2.lo"), "must be > 0");
  c.mu1 = r.number("mu1", c.mu1);
  c.sigma1 = detail::positive(r, "sigma1", c.sigma1);
  r.finish();

  const std::vector<double> mu2 = linspace(c.mu2.lo, c.mu2.hi, c.mu2.n);
  const std::vector<double> s2 = linspace(c.sigma2.lo, c.sigma2.hi, c.sigma2.n);
  const std::vector<SurfacePoint> pts = info_gain_surface(mu2, s2, c.mu1, c.sigma1);
  std::ostringstream csv;
  csv << "mu2,sigma2,info_gain\n";
  SurfacePoint lo = pts.front();
  SurfacePoint hi = pts.front();
  for (const SurfacePoint& p : pts) {
    csv << contactig::detail::format_double(p.mu2) << ','
        << contactig::detail::format_double(p.sigma2) << ','
        << contactig::detail::format_double(p.info_gain) << '\n';
    if (p.info_gain < lo.info_gain) lo = p;
    if (p.info_gain > hi.info_gain) hi = p;
  }
  detail::write_file(detail::out_path(o, "surface.csv"), csv.str());
  auto point = [](const SurfacePoint& p) {
    return Json{{"mu2", p.mu2}, {"sigma2", p.sigma2}, {"info_gain", p.info_gain}};
  };
  const Json report{{"schema_version", kSchemaVersion},
                    {"kind", "surface"},
                    {"points", pts.size()},
                    {"minimum", point(lo)},
                    {"maximum", point(hi)},
                    {"prior_entropy", std::log(2.0)}};
  detail::write_file(detail::out_path(o, "report.json"), detail::dump(report));
  a["mu2"] = detail::range_to_json(c.mu2);
  a["sigma2"] = detail::range_to_json(c.sigma2);
  a["mu1"] = c.mu1;
  a["sigma1"] = c.sigma1;
}

inline void infogain_partial(ObjectReader& r, Json& a, const Options& o,
                             std::uint64_t seed) {
  PartialConfig c;
  c.models = detail::models_from_json(r.at("models"), r.child("models"));
  c.gap = r.number("gap", c.gap);
  c.prior = detail::prior_field(r, c.models.size());
  c.eval_time = detail::positive(r, "eval_time", c.eval_time);
  c.dare_tolerance = detail::positive(r, "dare_tolerance", c.dare_tolerance);
  if (r.has("sweep")) {
    ObjectReader s(r.at("sweep"), r.child("sweep"));
    c.sweep_parameter = s.string("parameter");
    if (!detail::sweep_applies(*c.sweep_parameter)) {
      throw ConfigError(s.child("parameter"),
                        "unknown parameter '" + *c.sweep_parameter + "'");
    }
    std::size_t fallback = c.models.size() - 1;
    const long long mode = s.integer("mode_index", static_cast<long long>(fallback));
    if (mode < 0 || static_cast<std::size_t>(mode) >= c.models.size()) {
      throw ConfigError(s.child("mode_index"), "out of range");
    }
    c.sweep_mode = static_cast<std::size_t>(mode);
    c.sweep_values = s.numbers("values");
    if (c.sweep_values.empty()) throw ConfigError(s.child("values"), "empty sweep");
    s.finish();
  }
  if (r.has("monte_carlo_samples")) {
    const long long n = r.integer("monte_carlo_samples");
    if (n != 0 && n < 1000) {
      throw ConfigError(r.child("monte_carlo_samples"), "0 or at least 1000");
    }
    c.monte_carlo_samples = static_cast<std::size_t>(n);
  }
  r.finish();

  const DareOptions dare{c.dare_tolerance, 1'000'000};
  const InfoGainReport rep = info_gain_partially_observed(
      c.models, c.gap, *c.prior, c.eval_time, dare);
  Json report = detail::report_to_json(rep);
  report["schema_version"] = kSchemaVersion;
  report["kind"] = "partial";
  if (c.monte_carlo_samples > 0) {
    const MonteCarloEstimate mc = info_gain_monte_carlo(
        *c.prior, rep.per_mode_distributions, c.monte_carlo_samples, seed);
    report["monte_carlo"] = {{"estimate", mc.estimate},
                             {"std_error", mc.std_error},
                             {"samples", c.monte_carlo_samples},
                             {"seed", seed}};
  }
  if (c.sweep_parameter) {
    std::ostringstream csv;
    csv << "parameter,value,lower_bound,saturated\n";
    for (double v : c.sweep_values) {
      std::vector<TwoMassModel> models = c.models;
      double gap = c.gap;
      if (*c.sweep_parameter == "gap") {
        gap = v;
      } else {
        detail::set_parameter(models[c.sweep_mode], *c.sweep_parameter, v);
      }
      const InfoGainReport pt =
          info_gain_partially_observed(models, gap, *c.prior, c.eval_time, dare);
      csv << *c.sweep_parameter << ',' << contactig::detail::format_double(v)
          << ',' << contactig::detail::format_double(pt.lower_bound) << ','
          << contactig::detail::format_double(pt.saturated) << '\n';
    }
    detail::write_file(detail::out_path(o, "sweep.csv"), csv.str());
  }
  detail::write_file(detail::out_path(o, "report.json"), detail::dump(report));

  a["models"] = detail::models_to_json(c.models);
  a["gap"] = c.gap;
  a["prior"] = belief_to_json(*c.prior);
  a["eval_time"] = c.eval_time;
  a["dare_tolerance"] = c.dare_tolerance;
  a["monte_carlo_samples"] = c.monte_carlo_samples;
  if (c.sweep_parameter) {
    a["sweep"] = {{"parameter", *c.sweep_parameter},
                  {"mode_index", c.sweep_mode},
                  {"values", c.sweep_values}};
  }
}

inline void infogain_fully_observed(ObjectReader& r, Json& a, const Options& o) {
  FullyObservedConfig c;
  c.k1 = r.number("K1");
  if (c.k1 < 0.0) throw ConfigError(r.child("K1"), "must be >= 0");
  c.gap = r.number("gap");
  c.sigma_f = detail::positive(r, "sigma_f", c.sigma_f);
  c.prior = detail::prior_field(r, 2);
  r.finish();

  const FullyObservedInfoGain g =
      info_gain_fully_observed(c.k1, c.gap, c.sigma_f, *c.prior);
  const Json report{
      {"schema_version", kSchemaVersion},
      {"kind", "fully_observed"},
      {"value", g.value},
      {"closed_form", std::isnan(g.closed_form) ? Json(nullptr) : Json(g.closed_form)},
      {"bound", g.bound},
      {"prior_entropy", g.prior_entropy},
      {"saturated", g.saturated},
      {"saturation", g.saturation}};
  detail::write_file(detail::out_path(o, "report.json"), detail::dump(report));
  a["K1"] = c.k1;
  a["gap"] = c.gap;
  a["sigma_f"] = c.sigma_f;
  a["prior"] = belief_to_json(*c.prior);
}

inline void infogain_table(ObjectReader& r, Json& a, const Options& o) {
  TableConfig c;
  if (r.has("conditions")) {
    const Json& j = r.at("conditions");
    if (!j.is_array() || j.empty()) {
      throw ConfigError(r.child("conditions"), "empty mode list");
    }
    for (std::size_t i = 0; i < j.size(); ++i) {
      const std::string path = r.child("conditions") + "[" + std::to_string(i) + "]";
      ObjectReader e(j[i], path);
      NamedModel nm{e.string("name"), model_from_json(e.at("model"), e.child("model"))};
      e.finish();
      if (!(nm.model.K1 > 0.0)) throw ConfigError(path + ".model.K1", "must be > 0");
      c.conditions.push_back(std::move(nm));
    }
  } else {
    c.conditions = magazine_conditions();
  }
  c.sigma_w = r.has("sigma_w")
                  ? r.numbers("sigma_w")
                  : std::vector<double>(kMagazineSigmaW.begin(), kMagazineSigmaW.end());
  c.gaps = r.has("gaps") ? r.numbers("gaps")
                         : std::vector<double>(kMagazineGaps.begin(), kMagazineGaps.end());
  if (c.sigma_w.empty()) throw ConfigError(r.child("sigma_w"), "empty grid");
  if (c.gaps.empty()) throw ConfigError(r.child("gaps"), "empty grid");
  for (double s : c.sigma_w) {
    if (!(s >= 0.0)) throw ConfigError(r.child("sigma_w"), "variances must be >= 0");
  }
  c.eval_time = detail::positive(r, "eval_time", c.eval_time);
  if (r.has("expected_ordering")) {
    const Json& j = r.at("expected_ordering");
    if (!j.is_array()) throw ConfigError(r.child("expected_ordering"), "expected names");
    for (const Json& s : j) {
      if (!s.is_string()) throw ConfigError(r.child("expected_ordering"), "expected names");
      c.expected_ordering.push_back(s.get<std::string>());
    }
  } else if (!r.has("conditions")) {
    c.expected_ordering = {"compliant_feet", "flex_joints", "compliant_surface"};
  }
  r.finish();

  std::ostringstream csv;
  csv << "condition,sigma_w,gap,lower_bound,dK1,dM2,dB2,dK2\n";
  Json points = Json::array();
  bool ordering_holds = true;
  const BeliefVector flat = BeliefVector::uniform(2);
  for (double sw : c.sigma_w) {
    for (double gap : c.gaps) {
      Json values = Json::object();
      std::vector<std::pair<double, std::string>> ranked;
      for (const NamedModel& nm : c.conditions) {
        TwoMassModel m = nm.model;
        m.sigma_w = sw;
        const std::vector<TwoMassModel> bank = free_and_contact(m);
        GradientOptions gopt;
        gopt.eval_time = c.eval_time;
        const GradientReport g = info_gain_gradient(bank, gap, flat, gopt);
        csv << nm.name << ',' << contactig::detail::format_double(sw) << ','
            << contactig::detail::format_double(gap) << ','
            << contactig::detail::format_double(g.value);
        for (int i = 0; i < 4; ++i) {
          csv << ',' << contactig::detail::format_double(g.gradient[i]);
        }
        csv << '\n';
        values[nm.name] = g.value;
        ranked.emplace_back(g.value, nm.name);
      }
      std::stable_sort(ranked.begin(), ranked.end(),
                       [](const auto& x, const auto& y) { return x.first > y.first; });
      Json order = Json::array();
      for (const auto& [v, name] : ranked) order.push_back(name);
      if (!c.expected_ordering.empty()) {
        std::vector<std::string> got;
        for (const auto& [v, name] : ranked) got.push_back(name);
        std::vector<std::string> want;
        for (const std::string& n : c.expected_ordering) {
          if (std::find(got.begin(), got.end(), n) != got.end()) want.push_back(n);
        }
        std::vector<std::string> got_filtered;
        for (const std::string& n : got) {
          if (std::find(want.begin(), want.end(), n) != want.end()) {
            got_filtered.push_back(n);
          }
        }
        if (got_filtered != want) ordering_holds = false;
      }
      points.push_back({{"sigma_w", sw}, {"gap", gap}, {"values", values},
                        {"ordering", order}});
    }
  }
  detail::write_file(detail::out_path(o, "table.csv"), csv.str());
  Json report{{"schema_version", kSchemaVersion},
              {"kind", "table"},
              {"points", points},
              {"expected_ordering", c.expected_ordering}};
  report["ordering_holds"] =
      c.expected_ordering.empty() ? Json(nullptr) : Json(ordering_holds);
  detail::write_file(detail::out_path(o, "report.json"), detail::dump(report));

  Json conds = Json::array();
  for (const NamedModel& nm : c.conditions) {
    conds.push_back({{"name", nm.name}, {"model", model_to_json(nm.model)}});
  }
  a["conditions"] = conds;
  a["sigma_w"] = c.sigma_w;
  a["gaps"] = c.gaps;
  a["eval_time"] = c.eval_time;
  a["expected_ordering"] = c.expected_ordering;
}

inline void cmd_infogain(const Options& o) {
  const Json cfg = detail::load_config(o);
  ObjectReader r(cfg, "config");
  detail::begin(r, "infogain");
  const std::string kind = r.string("kind", "partial");
  const std::uint64_t seed = detail::seed_field(r, o);
  Json a = detail::header("infogain");
  a["kind"] = kind;
  a["seed"] = seed;
  if (kind == "surface") {
    infogain_surface(r, a, o);
  } else if (kind == "partial") {
    infogain_partial(r, a, o, seed);
  } else if (kind == "fully_observed") {
    infogain_fully_observed(r, a, o);
  } else if (kind == "table") {
    infogain_table(r, a, o);
  } else {
    throw ConfigError(r.child("kind"), "unknown kind '" + kind +
                                           "' (surface, partial, fully_observed, table)");
  }
  detail::write_file(detail::out_path(o, "assumptions.json"), detail::dump(a));
}

// ---------------------------------------------------------------------------
// identify

inline void cmd_identify(const Options& o) {
  const Json cfg = detail::load_config(o);
  ObjectReader r(cfg, "config");
  detail::begin(r, "identify");
  std::optional<std::string> trace_arg =
      r.has("trace") ? std::optional(r.string("trace")) : std::nullopt;
  if (!o.trace.empty()) trace_arg = o.trace;
  if (!trace_arg) throw ConfigError("config.trace", "missing field (or pass --trace)");
  const std::string trace_path = detail::absolute(*trace_arg);
  const Trace trace = read_trace_csv(trace_path);
  if (trace.size() < 100) {
    throw ArgumentError("trace '" + trace_path + "' has fewer than 100 samples");
  }

  const double sigma_f = detail::positive(r, "sigma_f", kDefaultForceNoise);
  TwoMassModel guess;
  if (r.has("initial_guess")) {
    TwoMassModel defaults;
    defaults.Ts = trace.sample_period();
    defaults.sigma_f = sigma_f;
    guess = model_from_json(r.at("initial_guess"), r.child("initial_guess"), defaults);
  } else {
    guess = default_initial_guess(trace, sigma_f);
  }
  ParamBounds bounds = ParamBounds::around(guess);
  if (r.has("bounds")) {
    ObjectReader b(r.at("bounds"), r.child("bounds"));
    const std::vector<double> lo = b.numbers("lower");
    const std::vector<double> hi = b.numbers("upper");
    b.finish();
    if (lo.size() != 4 || hi.size() != 4) {
      throw ConfigError(r.child("bounds"), "lower/upper need [K1, M2, B2, K2]");
    }
    bounds.lower = Eigen::Vector4d(lo[0], lo[1], lo[2], lo[3]);
    bounds.upper = Eigen::Vector4d(hi[0], hi[1], hi[2], hi[3]);
    try {
      bounds.validate();
    } catch (const ArgumentError& e) {
      throw ConfigError(r.child("bounds"), e.what());
    }
  }
  FitOptions fo;
  fo.seed = detail::seed_field(r, o);
  fo.restarts = static_cast<int>(r.integer("restarts", fo.restarts));
  if (fo.restarts < 1) throw ConfigError(r.child("restarts"), "must be >= 1");
  fo.restart_spread = r.number("restart_spread", fo.restart_spread);
  fo.initial_step = detail::positive(r, "initial_step", fo.initial_step);
  fo.optimizer.max_iterations =
      static_cast<long>(r.integer("max_iterations", fo.optimizer.max_iterations));
  if (fo.optimizer.max_iterations < 1) {
    throw ConfigError(r.child("max_iterations"), "must be >= 1");
  }
  r.finish();

  const FitResult fr = fit(trace, guess, bounds, fo);
  const Json assumptions{
      {"schema_version", kSchemaVersion},
      {"command", "identify"},
      {"trace", trace_path},
      {"seed", fo.seed},
      {"sigma_f", sigma_f},
      {"initial_guess", model_to_json(guess)},
      {"bounds",
       {{"lower", detail::vector_to_json(bounds.lower)},
        {"upper", detail::vector_to_json(bounds.upper)}}},
      {"restarts", fo.restarts},
      {"restart_spread", fo.restart_spread},
      {"initial_step", fo.initial_step},
      {"max_iterations", fo.optimizer.max_iterations}};
  const Json result{{"schema_version", kSchemaVersion},
                    {"params", model_to_json(fr.params)},
                    {"residual_rms", fr.residual_rms},
                    {"objective", fr.objective},
                    {"initial_objective", fr.initial_objective},
                    {"iterations", fr.iterations},
                    {"converged", fr.converged},
                    {"identifiable", fr.identifiable},
                    {"restart_objectives", fr.restart_objectives},
                    {"assumptions", assumptions}};
  const std::filesystem::path out =
      o.out.empty() ? detail::out_path(o, "fit.json") : std::filesystem::path(o.out);
  detail::write_file(out, detail::dump(result));

  std::ostringstream csv;
  csv << "t,residual\n";
  for (std::size_t k = 0; k < trace.size(); ++k) {
    csv << contactig::detail::format_double(trace.t[k]) << ','
        << contactig::detail::format_double(fr.residual[k]) << '\n';
  }
  detail::write_file(detail::out_path(o, "residual.csv"), csv.str());
  detail::write_file(detail::out_path(o, "assumptions.json"), detail::dump(assumptions));
}

// ---------------------------------------------------------------------------
// gradient

inline void cmd_gradient(const Options& o) {
  const Json cfg = detail::load_config(o);
  ObjectReader r(cfg, "config");
  detail::begin(r, "gradient");
  const std::vector<TwoMassModel> models =
      detail::models_from_json(r.at("models"), r.child("models"));
  const double gap = r.number("gap", 0.2e-3);
  const BeliefVector prior = detail::prior_field(r, models.size());
  GradientOptions go;
  go.eval_time = detail::positive(r, "eval_time", go.eval_time);
  go.relative_step = detail::positive(r, "relative_step", go.relative_step);
  go.max_relative_step = detail::positive(r, "max_relative_step", go.max_relative_step);
  go.dare.tolerance = detail::positive(r, "dare_tolerance", go.dare.tolerance);
  if (r.has("mode_index")) {
    const long long m = r.integer("mode_index");
    if (m < 0 || static_cast<std::size_t>(m) >= models.size()) {
      throw ConfigError(r.child("mode_index"), "out of range");
    }
    go.mode_index = static_cast<std::size_t>(m);
  }
  r.finish();

  const GradientReport g = info_gain_gradient(models, gap, prior, go);
  auto named = [](const Eigen::Vector4d& v) {
    Json j = Json::object();
    for (int i = 0; i < 4; ++i) j[kFitParamNames[static_cast<std::size_t>(i)]] = v[i];
    return j;
  };
  Json failed = Json::object();
  for (std::size_t i = 0; i < 4; ++i) failed[kFitParamNames[i]] = g.failed[i];
  Json result{{"schema_version", kSchemaVersion},
              {"mode_index", g.mode_index},
              {"params", model_to_json(g.params)},
              {"value", g.value},
              {"gradient", named(g.gradient)},
              {"half_step_gradient", named(g.half_step_gradient)},
              {"steps", named(g.steps)},
              {"failed", failed},
              {"richardson_consistent", g.richardson_consistent()}};

  // With no process noise the bound reduces to the fully observed two-mode
  // expression; report both the closed-form derivative and the derivative
  // of the exact two-mode bound next to the numerical one.
  bool collapse = models.size() == 2 && prior.is_flat();
  for (const TwoMassModel& m : models) collapse = collapse && m.sigma_w == 0.0;
  const TwoMassModel& other = models[1 - std::min<std::size_t>(g.mode_index, 1)];
  collapse = collapse && other.K1 == 0.0 && other.sigma_f == g.params.sigma_f;
  if (collapse) {
    const double k1 = g.params.K1;
    const double sf = g.params.sigma_f;
    const double x = k1 * k1 * gap * gap / (4.0 * sf);
    const double closed = k1 * gap * gap / (2.0 * sf);
    const double exact = closed / (1.0 + std::exp(x));
    auto rel = [](double a, double b) {
      return std::abs(a - b) / std::max(std::abs(b), 1e-300);
    };
    result["sigma_w_zero_check"] = {
        {"numerical_dK1", g.gradient[kK1]},
        {"closed_form_dK1", closed},
        {"bound_dK1", exact},
        {"relative_error_closed_form", rel(g.gradient[kK1], closed)},
        {"relative_error_bound", rel(g.gradient[kK1], exact)},
        {"matches_closed_form", rel(g.gradient[kK1], closed) <= 1e-6},
        {"matches_bound", rel(g.gradient[kK1], exact) <= 1e-6}};
  }

  Json assumptions = detail::header("gradient");
  assumptions["models"] = detail::models_to_json(models);
  assumptions["gap"] = gap;
  assumptions["prior"] = belief_to_json(prior);
  assumptions["eval_time"] = go.eval_time;
  assumptions["relative_step"] = go.relative_step;
  assumptions["max_relative_step"] = go.max_relative_step;
  assumptions["dare_tolerance"] = go.dare.tolerance;
  assumptions["mode_index"] = g.mode_index;
  result["assumptions"] = assumptions;

  const std::filesystem::path out =
      o.out.empty() ? detail::out_path(o, "grad.json") : std::filesystem::path(o.out);
  detail::write_file(out, detail::dump(result));
  detail::write_file(detail::out_path(o, "assumptions.json"), detail::dump(assumptions));
}

// ---------------------------------------------------------------------------
// driver

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Contact-mode estimation and information-gain design metric"};
  app.require_subcommand(1);
  Options o;
  std::uint64_t seed = 0;
  double threshold = 0.0;
  app.add_option("--out-dir", o.out_dir, "Directory for outputs (created)");
  auto* seed_opt = app.add_option("--seed", seed, "Override the config seed");

  struct Sub {
    const char* name;
    const char* help;
    void (*fn)(const Options&);
  };
  const Sub subs[] = {
      {"simulate", "Simulate a two-mass trace", cmd_simulate},
      {"estimate", "Run the mode estimator over a trace", cmd_estimate},
      {"infogain", "Information-gain reports and sweeps", cmd_infogain},
      {"identify", "Fit K1, M2, B2, K2 to a trace", cmd_identify},
      {"gradient", "Gradient of the partially observed bound", cmd_gradient},
  };
  std::vector<std::pair<CLI::App*, void (*)(const Options&)>> commands;
  CLI::Option* threshold_opt = nullptr;
  for (const Sub& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->fallthrough();
    sub->add_option("--config", o.config, "JSON config");
    const std::string name = s.name;
    if (name == "estimate" || name == "identify") {
      sub->add_option("--trace", o.trace, "Trace CSV (overrides config)");
    }
    if (name == "identify" || name == "gradient") {
      sub->add_option("--out", o.out, "Result JSON path");
    }
    if (name == "estimate") {
      threshold_opt = sub->add_option("--threshold-newtons", threshold,
                                      "Force threshold for the comparison detector");
    }
    commands.emplace_back(sub, s.fn);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }
  if (seed_opt->count() > 0) o.seed = seed;
  if (threshold_opt && threshold_opt->count() > 0) o.threshold_newtons = threshold;

  try {
    std::filesystem::create_directories(o.out_dir);
    for (const auto& [sub, fn] : commands) {
      if (sub->parsed()) fn(o);
    }
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Json::exception& e) {
    err << "error: config: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace contactig::cli

#endif  // CONTACTIG_TOOLS_CLI_HPP_
