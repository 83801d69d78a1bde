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

// JSON forms of the model/mode configuration. Field names mirror the C++
// members exactly; unknown fields are rejected with the offending path.

#ifndef CONTACTIG_CONFIG_HPP_
#define CONTACTIG_CONFIG_HPP_

#include <Eigen/Dense>

#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "contactig/contact_model.hpp"
#include "contactig/errors.hpp"
#include "contactig/gaussian.hpp"
#include "contactig/mode_estimator.hpp"
#include "contactig/signals.hpp"

namespace contactig {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// Raised for malformed configuration; what() starts with the JSON path.
class ConfigError : public ArgumentError {
 public:
  ConfigError(const std::string& path, const std::string& msg)
      : ArgumentError(path + ": " + msg), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// Reads fields of one JSON object and remembers which were consumed, so
// finish() can reject anything left over.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string path)
      : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  std::string child(const std::string& key) const { return path_ + "." + key; }

  const Json& at(const std::string& key) {
    if (!j_.contains(key)) throw ConfigError(child(key), "missing field");
    seen_.insert(key);
    return j_.at(key);
  }

  void mark(const std::string& key) { seen_.insert(key); }

  double number(const std::string& key) {
    const Json& v = at(key);
    if (!v.is_number()) throw ConfigError(child(key), "expected a number");
    return v.get<double>();
  }
  double number(const std::string& key, double fallback) {
    return has(key) ? number(key) : fallback;
  }

  long long integer(const std::string& key) {
    const Json& v = at(key);
    if (!v.is_number_integer()) {
      throw ConfigError(child(key), "expected an integer");
    }
    return v.get<long long>();
  }
  long long integer(const std::string& key, long long fallback) {
    return has(key) ? integer(key) : fallback;
  }

  std::string string(const std::string& key) {
    const Json& v = at(key);
    if (!v.is_string()) throw ConfigError(child(key), "expected a string");
    return v.get<std::string>();
  }
  std::string string(const std::string& key, const std::string& fallback) {
    return has(key) ? string(key) : fallback;
  }

  std::vector<double> numbers(const std::string& key) {
    const Json& v = at(key);
    if (!v.is_array()) throw ConfigError(child(key), "expected an array");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) {
        throw ConfigError(child(key) + "[" + std::to_string(i) + "]",
                          "expected a number");
      }
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) {
        throw ConfigError(child(it.key()), "unknown field");
      }
    }
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline Json load_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError(path, "cannot open file");
  try {
    return Json::parse(is);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path, std::string("invalid JSON: ") + e.what());
  }
}

inline void check_schema_version(ObjectReader& r) {
  if (!r.has("schema_version")) return;
  const long long v = r.integer("schema_version");
  if (v != kSchemaVersion) {
    throw ConfigError(r.child("schema_version"),
                      "unsupported version " + std::to_string(v));
  }
}

// --- TwoMassModel -----------------------------------------------------------

inline TwoMassModel model_from_json(const Json& j, const std::string& path,
                                    const TwoMassModel& defaults = {}) {
  ObjectReader r(j, path);
  TwoMassModel m;
  m.M2 = r.number("M2", defaults.M2);
  m.B2 = r.number("B2", defaults.B2);
  m.K2 = r.number("K2", defaults.K2);
  m.K1 = r.number("K1", defaults.K1);
  m.Ts = r.number("Ts", defaults.Ts);
  m.sigma_w = r.number("sigma_w", defaults.sigma_w);
  m.sigma_f = r.number("sigma_f", defaults.sigma_f);
  r.finish();
  try {
    m.validate();
  } catch (const ArgumentError& e) {
    throw ConfigError(path, e.what());
  }
  return m;
}

inline Json model_to_json(const TwoMassModel& m) {
  return Json{{"M2", m.M2}, {"B2", m.B2},   {"K2", m.K2},
              {"K1", m.K1}, {"Ts", m.Ts},   {"sigma_w", m.sigma_w},
              {"sigma_f", m.sigma_f}};
}

// --- ContactMode ------------------------------------------------------------

inline Eigen::MatrixXd matrix_from_json(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a matrix");
  const bool nested = j.front().is_array();
  const std::size_t rows = nested ? j.size() : 1;
  const std::size_t cols = nested ? j.front().size() : j.size();
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const Json& row = nested ? j[r] : j;
    if (!row.is_array() || row.size() != cols) {
      throw ConfigError(path + "[" + std::to_string(r) + "]", "ragged matrix");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!row[c].is_number()) {
        throw ConfigError(path + "[" + std::to_string(r) + "][" +
                              std::to_string(c) + "]",
                          "expected a number");
      }
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          row[c].get<double>();
    }
  }
  return m;
}

inline Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

inline ContactMode contact_mode_from_json(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  ContactMode mode;
  mode.name = r.string("name", "");
  mode.stiffness = matrix_from_json(r.at("stiffness"), r.child("stiffness"));
  const std::vector<double> rest = r.numbers("rest_position");
  mode.rest_position = Eigen::Map<const Eigen::VectorXd>(
      rest.data(), static_cast<Eigen::Index>(rest.size()));
  r.finish();
  try {
    mode.validate();
  } catch (const ArgumentError& e) {
    throw ConfigError(path, e.what());
  }
  return mode;
}

inline Json contact_mode_to_json(const ContactMode& mode) {
  return Json{{"name", mode.name},
              {"stiffness", matrix_to_json(mode.stiffness)},
              {"rest_position", std::vector<double>(mode.rest_position.begin(),
                                                    mode.rest_position.end())}};
}

// --- beliefs, transitions ---------------------------------------------------

inline BeliefVector belief_from_json(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of probabilities");
  std::vector<double> p;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      throw ConfigError(path + "[" + std::to_string(i) + "]", "expected a number");
    }
    p.push_back(j[i].get<double>());
  }
  try {
    return BeliefVector(Eigen::Map<const Eigen::VectorXd>(
        p.data(), static_cast<Eigen::Index>(p.size())));
  } catch (const ArgumentError& e) {
    throw ConfigError(path, e.what());
  }
}

inline Json belief_to_json(const BeliefVector& b) {
  return std::vector<double>(b.probs().begin(), b.probs().end());
}

// --- filter modes -----------------------------------------------------------

// {"name": ..., "model": {TwoMassModel}} or {"name": ..., "contact_mode": {...}}
inline FilterMode filter_mode_from_json(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  FilterMode fm;
  fm.name = r.string("name", "");
  const bool has_model = r.has("model");
  const bool has_mode = r.has("contact_mode");
  if (has_model == has_mode) {
    throw ConfigError(path, "give exactly one of 'model' or 'contact_mode'");
  }
  if (has_model) {
    fm.model = model_from_json(r.at("model"), r.child("model"));
  } else {
    ContactMode cm = contact_mode_from_json(r.at("contact_mode"),
                                            r.child("contact_mode"));
    if (cm.name.empty()) cm.name = fm.name;
    fm.model = std::move(cm);
  }
  r.finish();
  return fm;
}

inline Json filter_mode_to_json(const FilterMode& fm) {
  Json j{{"name", fm.name}};
  if (const auto* m = std::get_if<TwoMassModel>(&fm.model)) {
    j["model"] = model_to_json(*m);
  } else {
    j["contact_mode"] = contact_mode_to_json(std::get<ContactMode>(fm.model));
  }
  return j;
}

// --- input signals ----------------------------------------------------------

inline InputSignal input_from_json(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  const std::string type = r.string("type");
  InputSignal out;
  if (type == "constant") {
    out = ConstantInput{r.number("value", 0.0)};
  } else if (type == "step") {
    out = StepInput{r.number("at"), r.number("before", 0.0),
                    r.number("after")};
  } else if (type == "ramp") {
    out = RampInput{r.number("t0", 0.0), r.number("start", 0.0),
                    r.number("rate")};
  } else if (type == "chirp") {
    out = ChirpInput{r.number("amplitude"), r.number("f0", 0.5),
                     r.number("f1", 50.0), r.number("duration"),
                     r.number("offset", 0.0)};
  } else if (type == "piecewise_linear") {
    PiecewiseLinearInput p{r.numbers("times"), r.numbers("values")};
    if (p.times.empty() || p.times.size() != p.values.size()) {
      throw ConfigError(path, "times and values must be non-empty and equal length");
    }
    out = std::move(p);
  } else {
    throw ConfigError(r.child("type"), "unknown input type '" + type + "'");
  }
  r.finish();
  return out;
}

inline Json input_to_json(const InputSignal& s) {
  struct Visitor {
    Json operator()(const ConstantInput& c) const {
      return {{"type", "constant"}, {"value", c.value}};
    }
    Json operator()(const StepInput& c) const {
      return {{"type", "step"}, {"at", c.at}, {"before", c.before},
              {"after", c.after}};
    }
    Json operator()(const RampInput& c) const {
      return {{"type", "ramp"}, {"t0", c.t0}, {"start", c.start},
              {"rate", c.rate}};
    }
    Json operator()(const ChirpInput& c) const {
      return {{"type", "chirp"}, {"amplitude", c.amplitude}, {"f0", c.f0},
              {"f1", c.f1},      {"duration", c.duration},   {"offset", c.offset}};
    }
    Json operator()(const PiecewiseLinearInput& c) const {
      return {{"type", "piecewise_linear"}, {"times", c.times},
              {"values", c.values}};
    }
  };
  return std::visit(Visitor{}, s);
}

inline std::vector<ModeInterval> schedule_from_json(const Json& j,
                                                    const std::string& path) {
  if (!j.is_array() || j.empty()) {
    throw ConfigError(path, "expected a non-empty array of intervals");
  }
  std::vector<ModeInterval> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    ObjectReader r(j[i], path + "[" + std::to_string(i) + "]");
    ModeInterval iv;
    iv.start = r.number("start");
    iv.end = r.number("end");
    iv.mode_id = static_cast<int>(r.integer("mode_id"));
    r.finish();
    out.push_back(iv);
  }
  return out;
}

inline Json schedule_to_json(std::span<const ModeInterval> s) {
  Json a = Json::array();
  for (const ModeInterval& iv : s) {
    a.push_back({{"start", iv.start}, {"end", iv.end}, {"mode_id", iv.mode_id}});
  }
  return a;
}

}  // namespace contactig

#endif  // CONTACTIG_CONFIG_HPP_
