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

// Sensitivity of the partially observed information-gain bound to the
// contact-mode plant parameters, by central finite differences with the
// Riccati solution re-converged at every perturbed point.

#ifndef CONTACTIG_DESIGN_GRADIENT_HPP_
#define CONTACTIG_DESIGN_GRADIENT_HPP_

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "contactig/contact_model.hpp"
#include "contactig/errors.hpp"
#include "contactig/info_gain.hpp"
#include "contactig/sysid.hpp"

namespace contactig {

inline constexpr double kDefaultEvalTime = 0.002;

struct GradientOptions {
  double relative_step = 1e-5;
  double absolute_floor = 1e-8;
  int retries = 2;  // on solver failure, each retry divides the step by 10
  double max_relative_step = 1e-2;
  double richardson_tolerance = 0.01;
  DareOptions dare{1e-14, 1'000'000};
  std::optional<std::size_t> mode_index;  // default: last mode with K1 > 0
  double eval_time = kDefaultEvalTime;
};

struct GradientReport {
  TwoMassModel params;
  std::size_t mode_index = 0;
  double value = 0.0;
  // d bound / d (K1, M2, B2, K2)
  Eigen::Vector4d gradient = Eigen::Vector4d::Zero();
  Eigen::Vector4d half_step_gradient = Eigen::Vector4d::Zero();
  Eigen::Vector4d steps = Eigen::Vector4d::Zero();
  std::array<bool, 4> failed{};
  InfoGainAssumptions assumptions;

  // Halving the step moved every entry by less than `tol` relative.
  bool richardson_consistent(double tol = 0.01) const {
    for (int i = 0; i < 4; ++i) {
      if (failed[static_cast<std::size_t>(i)]) return false;
      const double scale = std::max(std::abs(gradient[i]),
                                    std::abs(half_step_gradient[i]));
      if (scale != 0.0 &&
          std::abs(gradient[i] - half_step_gradient[i]) > tol * scale) {
        return false;
      }
    }
    return true;
  }
};

namespace detail {

inline bool consistent(double full, double half, double tol) {
  const double scale = std::max(std::abs(full), std::abs(half));
  return scale == 0.0 || std::abs(full - half) <= tol * scale;
}

inline std::size_t contact_mode_index(std::span<const TwoMassModel> models,
                                      std::optional<std::size_t> requested) {
  if (requested) {
    if (*requested >= models.size()) {
      throw ArgumentError("gradient: mode index out of range");
    }
    return *requested;
  }
  for (std::size_t i = models.size(); i-- > 0;) {
    if (models[i].K1 > 0.0) return i;
  }
  throw ArgumentError("gradient: no mode with K1 > 0 to differentiate");
}

}  // namespace detail

inline GradientReport info_gain_gradient(std::span<const TwoMassModel> models,
                                         double gap_mean,
                                         const BeliefVector& prior,
                                         const GradientOptions& opts = {}) {
  const std::size_t idx = detail::contact_mode_index(models, opts.mode_index);
  std::vector<TwoMassModel> work(models.begin(), models.end());
  auto bound_at = [&](const Eigen::Vector4d& v) {
    work[idx] = with_fit_vector(models[idx], v);
    return info_gain_partially_observed(work, gap_mean, prior, opts.eval_time,
                                        opts.dare)
        .lower_bound;
  };

  GradientReport rep;
  rep.params = models[idx];
  rep.mode_index = idx;
  const InfoGainReport nominal = info_gain_partially_observed(
      models, gap_mean, prior, opts.eval_time, opts.dare);
  rep.value = nominal.lower_bound;
  rep.assumptions = nominal.assumptions;

  const Eigen::Vector4d x = fit_vector(models[idx]);
  using detail::consistent;
  auto central = [&](int i, double h) {
    Eigen::Vector4d up = x;
    Eigen::Vector4d dn = x;
    up[i] += h;
    dn[i] -= h;
    return (bound_at(up) - bound_at(dn)) / (2.0 * h);
  };
  for (int i = 0; i < 4; ++i) {
    double h = std::max(opts.relative_step * std::abs(x[i]), opts.absolute_floor);
    // keep the lower point physical (M2 > 0, others >= 0)
    if (x[i] > 0.0) h = std::min(h, 0.5 * x[i]);
    bool done = false;
    for (int attempt = 0; attempt <= opts.retries && !done; ++attempt) {
      try {
        rep.gradient[i] = central(i, h);
        rep.half_step_gradient[i] = central(i, 0.5 * h);
        rep.steps[i] = h;
        done = true;
      } catch (const ConvergenceError&) {
        h /= 10.0;
      }
    }
    rep.failed[static_cast<std::size_t>(i)] = !done;
    // Entries near the rounding floor of the bound (|g| h ~ 1e-15) are
    // dominated by differencing noise; widen the step until halving it
    // agrees, never past max_relative_step.
    while (done && !consistent(rep.gradient[i], rep.half_step_gradient[i],
                               opts.richardson_tolerance)) {
      const double wider = 10.0 * h;
      if (wider > opts.max_relative_step * std::abs(x[i]) ||
          (x[i] > 0.0 && wider > 0.5 * x[i])) {
        break;
      }
      try {
        const double g = central(i, wider);
        const double g_half = central(i, 0.5 * wider);
        h = wider;
        rep.gradient[i] = g;
        rep.half_step_gradient[i] = g_half;
        rep.steps[i] = h;
      } catch (const ConvergenceError&) {
        break;
      }
    }
  }
  return rep;
}

// Bound before and after scaling each parameter by (1 + rel * sign(grad)).
struct AscentCheck {
  double before = 0.0;
  double after = 0.0;
};

inline AscentCheck ascent_check(std::span<const TwoMassModel> models,
                                double gap_mean, const BeliefVector& prior,
                                const GradientReport& rep, double rel = 1e-3,
                                const GradientOptions& opts = {}) {
  std::vector<TwoMassModel> work(models.begin(), models.end());
  Eigen::Vector4d v = fit_vector(work[rep.mode_index]);
  for (int i = 0; i < 4; ++i) {
    const double s = rep.gradient[i] > 0.0 ? 1.0 : (rep.gradient[i] < 0.0 ? -1.0 : 0.0);
    v[i] *= 1.0 + rel * s;
  }
  work[rep.mode_index] = with_fit_vector(work[rep.mode_index], v);
  AscentCheck out;
  out.before = rep.value;
  out.after = info_gain_partially_observed(work, gap_mean, prior,
                                           opts.eval_time, opts.dare)
                  .lower_bound;
  return out;
}

}  // namespace contactig

#endif  // CONTACTIG_DESIGN_GRADIENT_HPP_
