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

// Contact-mode observation models and the two-mass plant
//
//   robot q1 --K1-- [M2] --K2,B2-- ground
//
// q1 is measured, the environment (or link) position q2 is not. Force is
// read on the sensor spring as f = K1 (q2 - q1) + eps. Some texts write the
// contact-mode mean as K1 (q1 - q2); this library uses the q2 - q1 sign
// everywhere, so pushing the robot in -q reads as positive force. The
// information measures are invariant to that sign.

#ifndef CONTACTIG_CONTACT_MODEL_HPP_
#define CONTACTIG_CONTACT_MODEL_HPP_

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "contactig/errors.hpp"
#include "contactig/gaussian.hpp"
#include "contactig/trace.hpp"

namespace contactig {

inline constexpr double kDefaultSamplePeriod = 0.0008;  // 1250 Hz
inline constexpr double kDefaultForceNoise = 1.25;      // N^2

// Linear spring observation model for one contact mode:
//   f = stiffness * (q - rest_position).
struct ContactMode {
  std::string name;
  Eigen::MatrixXd stiffness;      // L x D, N/m
  Eigen::VectorXd rest_position;  // D, m

  Eigen::Index force_dim() const { return stiffness.rows(); }
  Eigen::Index position_dim() const { return stiffness.cols(); }

  bool is_free_space() const {
    return stiffness.size() > 0 && (stiffness.array() == 0.0).all();
  }

  void validate() const {
    if (stiffness.size() == 0) {
      throw ArgumentError("ContactMode '" + name + "': empty stiffness");
    }
    if (rest_position.size() != stiffness.cols()) {
      throw ArgumentError("ContactMode '" + name + "': rest_position has " +
                          std::to_string(rest_position.size()) +
                          " entries, stiffness has " +
                          std::to_string(stiffness.cols()) + " columns");
    }
    if (!stiffness.allFinite() || !rest_position.allFinite()) {
      throw ArgumentError("ContactMode '" + name + "': non-finite entries");
    }
  }

  static ContactMode free_space(Eigen::Index force_dim = 1,
                                Eigen::Index position_dim = 1) {
    return {"free", Eigen::MatrixXd::Zero(force_dim, position_dim),
            Eigen::VectorXd::Zero(position_dim)};
  }

  static ContactMode scalar_spring(std::string name, double k, double rest) {
    return {std::move(name), Eigen::MatrixXd::Constant(1, 1, k),
            Eigen::VectorXd::Constant(1, rest)};
  }
};

// Parameters of the two-mass plant plus sampling and noise.
struct TwoMassModel {
  double M2 = 1.0;       // kg
  double B2 = 0.0;       // N s/m
  double K2 = 0.0;       // N/m
  double K1 = 0.0;       // N/m, sensor / contact stiffness
  double Ts = kDefaultSamplePeriod;  // s
  double sigma_w = 0.0;  // process force variance, N^2
  double sigma_f = kDefaultForceNoise;  // measurement variance, N^2

  void validate() const {
    auto bad = [](const char* what) {
      throw ArgumentError(std::string("TwoMassModel: ") + what);
    };
    for (double v : {M2, B2, K2, K1, Ts, sigma_w, sigma_f}) {
      if (!std::isfinite(v)) bad("non-finite parameter");
    }
    if (!(M2 > 0.0)) bad("M2 must be > 0");
    if (!(Ts > 0.0)) bad("Ts must be > 0");
    if (!(sigma_f > 0.0)) bad("sigma_f must be > 0");
    if (sigma_w < 0.0) bad("sigma_w must be >= 0");
    if (B2 < 0.0) bad("B2 must be >= 0");
    if (K2 < 0.0) bad("K2 must be >= 0");
    if (K1 < 0.0) bad("K1 must be >= 0");
  }

  TwoMassModel with_k1(double k1) const {
    TwoMassModel m = *this;
    m.K1 = k1;
    return m;
  }

  std::string describe() const {
    std::ostringstream os;
    os.precision(6);
    os << "M2=" << M2 << " B2=" << B2 << " K2=" << K2 << " K1=" << K1
       << " Ts=" << Ts;
    return os.str();
  }
};

// x[t+1] = A x[t] + B q1[t] + Bw w[t],  f[t] = C x[t] - K1 q1[t] + eps
// with x = [q2, dq2].
struct StateSpace {
  Eigen::Matrix2d A;
  Eigen::Vector2d B;
  Eigen::Vector2d Bw;
  Eigen::RowVector2d C;

  double k1() const { return C[0]; }
};

// First-order (forward Euler) discretization. The disturbance is a force,
// so it enters the velocity row as Ts/M2, the same way K1 q1 does.
inline StateSpace discretize(const TwoMassModel& m) {
  m.validate();
  StateSpace ss;
  ss.A << 1.0, m.Ts, -m.Ts * (m.K2 + m.K1) / m.M2, 1.0 - m.Ts * m.B2 / m.M2;
  ss.B << 0.0, m.Ts * m.K1 / m.M2;
  ss.Bw << 0.0, m.Ts / m.M2;
  ss.C << m.K1, 0.0;
  return ss;
}

inline double spectral_radius(const Eigen::Matrix2d& a) {
  return Eigen::EigenSolver<Eigen::Matrix2d>(a, false)
      .eigenvalues()
      .cwiseAbs()
      .maxCoeff();
}

// Not fatal: an unstable discretization is reported, not rejected.
inline bool is_stable(const TwoMassModel& m) {
  return spectral_radius(discretize(m).A) < 1.0;
}

inline Gaussian mode_force_distribution(const ContactMode& mode,
                                        const Eigen::VectorXd& q,
                                        const Eigen::MatrixXd& sigma_f) {
  mode.validate();
  if (q.size() != mode.position_dim()) {
    throw ArgumentError("mode_force_distribution: q has length " +
                        std::to_string(q.size()) + ", mode '" + mode.name +
                        "' expects " + std::to_string(mode.position_dim()));
  }
  if (sigma_f.rows() != mode.force_dim() || sigma_f.cols() != mode.force_dim()) {
    throw ArgumentError("mode_force_distribution: sigma_f is " +
                        detail::shape(sigma_f) + ", mode '" + mode.name +
                        "' measures " + std::to_string(mode.force_dim()) +
                        " forces");
  }
  return Gaussian(mode.stiffness * (q - mode.rest_position), sigma_f);
}

inline Gaussian mode_force_distribution(const ContactMode& mode,
                                        const Eigen::VectorXd& q,
                                        double sigma_f) {
  return mode_force_distribution(
      mode, q,
      Eigen::MatrixXd(sigma_f * Eigen::MatrixXd::Identity(mode.force_dim(),
                                                          mode.force_dim())));
}

// [start, end) in seconds; the last interval also covers its end point.
struct ModeInterval {
  double start = 0.0;
  double end = 0.0;
  int mode_id = 0;
};

namespace detail {

inline void check_schedule(std::span<const ModeInterval> schedule,
                           double duration, std::size_t n_modes) {
  if (schedule.empty()) throw ArgumentError("simulate: empty mode schedule");
  const double tol = 1e-9 * std::max(1.0, duration);
  if (std::abs(schedule.front().start) > tol) {
    throw ArgumentError("simulate: mode schedule must start at t=0");
  }
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const ModeInterval& iv = schedule[i];
    if (!(iv.end > iv.start)) {
      throw ArgumentError("simulate: empty or reversed interval " +
                          std::to_string(i));
    }
    if (iv.mode_id < 0 || static_cast<std::size_t>(iv.mode_id) >= n_modes) {
      throw ArgumentError("simulate: interval " + std::to_string(i) +
                          " names mode " + std::to_string(iv.mode_id) +
                          " but only " + std::to_string(n_modes) +
                          " models were given");
    }
    if (i > 0 && std::abs(iv.start - schedule[i - 1].end) > tol) {
      throw ArgumentError("simulate: gap or overlap before interval " +
                          std::to_string(i));
    }
  }
  if (schedule.back().end < duration - tol) {
    throw ArgumentError("simulate: mode schedule ends before the duration");
  }
}

inline int mode_at(std::span<const ModeInterval> schedule, double t) {
  for (const ModeInterval& iv : schedule) {
    if (t >= iv.start && t < iv.end) return iv.mode_id;
  }
  return schedule.back().mode_id;
}

}  // namespace detail

inline std::size_t sample_count(double duration, double ts) {
  return static_cast<std::size_t>(std::llround(duration / ts));
}

// Rolls the plant forward with one model per mode id; the state is carried
// across mode switches unchanged. Defaults to x0 = [q1(0), 0].
inline Trace simulate(std::span<const TwoMassModel> models_per_mode,
                      std::span<const ModeInterval> schedule,
                      const std::function<double(double)>& q1_input,
                      double duration, std::uint64_t seed,
                      std::optional<Eigen::Vector2d> initial_state = {}) {
  if (models_per_mode.empty()) throw ArgumentError("simulate: no models");
  std::vector<StateSpace> systems;
  for (const TwoMassModel& m : models_per_mode) {
    systems.push_back(discretize(m));
    if (std::abs(m.Ts - models_per_mode.front().Ts) >
        1e-15 * models_per_mode.front().Ts) {
      throw ArgumentError("simulate: models disagree on Ts");
    }
  }
  const double ts = models_per_mode.front().Ts;
  if (!(duration > 0.0)) throw ArgumentError("simulate: duration must be > 0");
  detail::check_schedule(schedule, duration, models_per_mode.size());
  const std::size_t n = sample_count(duration, ts);
  if (n < 2) throw ArgumentError("simulate: duration shorter than 2 samples");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  Trace trace;
  trace.t.resize(n);
  trace.q1.resize(n);
  trace.f.resize(n);
  trace.q2.emplace(n);
  trace.mode_id.emplace(n);

  Eigen::Vector2d x =
      initial_state.value_or(Eigen::Vector2d(q1_input(0.0), 0.0));
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * ts;
    const int mode = detail::mode_at(schedule, t);
    const TwoMassModel& m = models_per_mode[static_cast<std::size_t>(mode)];
    const StateSpace& ss = systems[static_cast<std::size_t>(mode)];
    const double q1 = q1_input(t);
    const double eps = std::sqrt(m.sigma_f) * normal(rng);
    const double w = std::sqrt(m.sigma_w) * normal(rng);

    trace.t[k] = t;
    trace.q1[k] = q1;
    trace.f[k] = m.K1 * (x[0] - q1) + eps;
    (*trace.q2)[k] = x[0];
    (*trace.mode_id)[k] = mode;

    x = ss.A * x + ss.B * q1 + ss.Bw * w;
    if (!x.allFinite() || x.cwiseAbs().maxCoeff() > 1e9) {
      throw DivergenceError("simulate: state diverged at t=" +
                            std::to_string(t) + " (" + m.describe() +
                            ", spectral radius " +
                            std::to_string(spectral_radius(ss.A)) + ")");
    }
  }
  return trace;
}

// Two-mode form: mode 0 is free space (K1 = 0), mode 1 is contact with
// model.K1.
inline Trace simulate(const TwoMassModel& model,
                      std::span<const ModeInterval> schedule,
                      const std::function<double(double)>& q1_input,
                      double duration, std::uint64_t seed,
                      std::optional<Eigen::Vector2d> initial_state = {}) {
  const TwoMassModel models[] = {model.with_k1(0.0), model};
  return simulate(std::span<const TwoMassModel>(models), schedule, q1_input,
                  duration, seed, initial_state);
}

}  // namespace contactig

#endif  // CONTACTIG_CONTACT_MODEL_HPP_
