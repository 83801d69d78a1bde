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

// Synthetic experiments shared by the unit tests and the acceptance run.

#ifndef CONTACTIG_TESTS_SCENARIOS_HPP_
#define CONTACTIG_TESTS_SCENARIOS_HPP_

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "contactig/contact_model.hpp"
#include "contactig/mode_estimator.hpp"
#include "contactig/presets.hpp"
#include "contactig/signals.hpp"
#include "contactig/sysid.hpp"

namespace scenario {

using contactig::TwoMassModel;

// sigma_f must stay positive; 1e-24 N^2 is 1e-12 N of noise
inline constexpr double kNoNoise = 1e-24;

// Log-uniform draw around the magazine setups, rejected until the Euler
// discretization is stable.
inline TwoMassModel random_plant(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto log_uniform = [&](double lo, double hi) {
    return lo * std::pow(hi / lo, u(rng));
  };
  while (true) {
    TwoMassModel m;
    m.K1 = log_uniform(1e4, 2e5);
    m.M2 = log_uniform(10.0, 80.0);
    m.B2 = log_uniform(300.0, 2000.0);
    m.K2 = log_uniform(2e3, 2e4);
    m.Ts = contactig::kDefaultSamplePeriod;
    m.sigma_f = contactig::kDefaultForceNoise;
    if (contactig::is_stable(m)) return m;
  }
}

// 0.5 to 50 Hz chirp on q1, in contact for the whole trace.
inline contactig::Trace chirp_trace(const TwoMassModel& m, double sigma_f,
                                    std::uint64_t seed, double duration = 5.0,
                                    double amplitude = 1e-3) {
  TwoMassModel truth = m;
  truth.sigma_f = sigma_f;
  truth.sigma_w = 0.0;
  const contactig::InputSignal chirp =
      contactig::ChirpInput{amplitude, 0.5, 50.0, duration, 0.0};
  const contactig::ModeInterval contact[] = {{0.0, duration, 1}};
  return contactig::simulate(
      truth, contact, [&](double t) { return contactig::evaluate(chirp, t); },
      duration, seed);
}

inline double max_relative_error(const TwoMassModel& fit,
                                 const TwoMassModel& truth) {
  const Eigen::Vector4d a = contactig::fit_vector(fit);
  const Eigen::Vector4d b = contactig::fit_vector(truth);
  return ((a - b).array() / b.array()).abs().maxCoeff();
}

// Detection-latency sweep: a well-damped environment, the robot approaching
// from clearance at `speed` and touching at `touch`, process noise in both
// the truth and the filter bank.
struct Approach {
  double M2 = 20.0;
  double B2 = 800.0;
  double K2 = 2e4;
  double sigma_w = 100.0;
  double speed = 5e-3;
  double touch = 1.0;
  double duration = 1.4;

  TwoMassModel plant(double k1) const {
    TwoMassModel m;
    m.M2 = M2;
    m.B2 = B2;
    m.K2 = K2;
    m.K1 = k1;
    m.sigma_w = sigma_w;
    return m;
  }

  contactig::Trace trace(double k1, std::uint64_t seed) const {
    const std::vector<TwoMassModel> bank = contactig::free_and_contact(plant(k1));
    const std::vector<contactig::ModeInterval> sched{{0.0, touch, 0},
                                                     {touch, duration, 1}};
    const double v = speed;
    const double t0 = touch;
    return contactig::simulate(bank, sched,
                               [v, t0](double t) { return -v * (t - t0); },
                               duration, seed);
  }

  // Samples from touch to debounced detection; +inf if never detected.
  double latency(double k1, std::uint64_t seed) const {
    const TwoMassModel m = plant(k1);
    const std::vector<contactig::FilterMode> modes{{"free", m.with_k1(0.0)},
                                                   {"contact", m}};
    contactig::FilterOptions opts;
    opts.transition = contactig::sticky_transition(2);
    const contactig::FilterResult r = contactig::run_filter(
        trace(k1, seed), modes, contactig::BeliefVector::uniform(2), opts);
    if (!r.latency || !r.latency->samples) return INFINITY;
    return static_cast<double>(*r.latency->samples);
  }

  // Gap reached 2 ms after touch, where the bound is evaluated.
  double eval_gap() const { return speed * 0.002; }
};

}  // namespace scenario

#endif  // CONTACTIG_TESTS_SCENARIOS_HPP_
