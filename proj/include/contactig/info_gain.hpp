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

// Mode information gain specialized to contact sensing.

#ifndef CONTACTIG_INFO_GAIN_HPP_
#define CONTACTIG_INFO_GAIN_HPP_

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "contactig/contact_model.hpp"
#include "contactig/errors.hpp"
#include "contactig/gaussian.hpp"
#include "contactig/mode_estimator.hpp"
#include "contactig/random.hpp"

namespace contactig {

// Closed form for two modes {N(0, Sf), N(K1 gap, Sf)} at a flat prior:
//   K1^2 gap^2 / (4 Sf) - (1 - ln 2) / 2.
// It keeps only the cross-mode overlap term, so it grows without bound in
// K1 gap and sits above info_gain_lower_bound on the same two Gaussians by
// exactly ln((1 + exp(x)) / 2), x = (K1 gap)^2 / (4 Sf). They agree at
// gap = 0.
inline double info_gain_closed_form(double k1, double gap, double sigma_f) {
  if (!(sigma_f > 0.0)) throw ArgumentError("info gain: sigma_f must be > 0");
  const double d = k1 * gap;
  return 0.5 * d * d / (2.0 * sigma_f) - 0.5 * (1.0 - std::numbers::ln2);
}

struct FullyObservedInfoGain {
  double value = 0.0;  // closed form at a flat prior, else the bound
  double closed_form = std::numeric_limits<double>::quiet_NaN();
  double bound = 0.0;  // info_gain_lower_bound over the two Gaussians
  double prior_entropy = 0.0;
  double saturated = 0.0;  // min(value, prior_entropy)
  bool saturation = false;
};

inline std::vector<Gaussian> contact_force_pair(double k1, double gap,
                                                double sigma_f) {
  return {Gaussian::scalar(0.0, sigma_f), Gaussian::scalar(k1 * gap, sigma_f)};
}

inline FullyObservedInfoGain info_gain_fully_observed(
    double k1, double gap, double sigma_f, const BeliefVector& prior) {
  if (prior.size() != 2) {
    throw ArgumentError("info_gain_fully_observed: needs a 2-mode prior");
  }
  const std::vector<Gaussian> comps = contact_force_pair(k1, gap, sigma_f);
  FullyObservedInfoGain out;
  out.bound = info_gain_lower_bound(prior, comps);
  out.prior_entropy = belief_entropy(prior);
  if (prior.is_flat()) {
    out.closed_form = info_gain_closed_form(k1, gap, sigma_f);
    out.value = out.closed_form;
  } else {
    out.value = out.bound;
  }
  out.saturation = out.value > out.prior_entropy;
  out.saturated = std::min(out.value, out.prior_entropy);
  return out;
}

// Average of the fully observed gain over |gap| in [gap_lo, gap_hi]
// (trapezoid rule on `points` nodes), as used for assembly-style
// comparisons of gripper stiffness.
struct GapAverage {
  double value = 0.0;
  double bound = 0.0;
};

inline GapAverage info_gain_gap_average(double k1, double sigma_f,
                                        const BeliefVector& prior,
                                        double gap_lo = 0.0,
                                        double gap_hi = 0.5e-3,
                                        int points = 101) {
  if (points < 2 || !(gap_hi > gap_lo)) {
    throw ArgumentError("info_gain_gap_average: bad gap range");
  }
  GapAverage avg;
  const double h = (gap_hi - gap_lo) / (points - 1);
  for (int i = 0; i < points; ++i) {
    const double w = (i == 0 || i == points - 1) ? 0.5 : 1.0;
    const FullyObservedInfoGain g =
        info_gain_fully_observed(k1, gap_lo + i * h, sigma_f, prior);
    avg.value += w * g.value;
    avg.bound += w * g.bound;
  }
  avg.value /= (points - 1);
  avg.bound /= (points - 1);
  return avg;
}

// ---------------------------------------------------------------------------
// Partially observed

struct InfoGainAssumptions {
  double gap = 0.0;  // q2 - q1 at evaluation, m
  std::vector<double> prior;
  std::vector<double> sigma_w;  // per mode, N^2
  std::vector<double> sigma_f;  // per mode, N^2
  double Ts = 0.0;
  double eval_time = 0.0;
  std::string covariance = "steady-state Riccati P+";
  double dare_tolerance = 0.0;
};

struct InfoGainReport {
  double lower_bound = 0.0;
  double prior_entropy = 0.0;
  double saturated = 0.0;
  bool saturation = false;
  std::vector<Gaussian> per_mode_distributions;
  std::vector<std::optional<SteadyStateGains>> gains;  // empty for K1 = 0
  InfoGainAssumptions assumptions;
};

// Gap history to read the evaluation gap from.
struct GapTrajectory {
  std::vector<double> t;
  std::vector<double> gap;

  double at(double time) const {
    if (t.empty() || t.size() != gap.size()) {
      throw ArgumentError("GapTrajectory: times/gaps mismatch");
    }
    if (time <= t.front()) return gap.front();
    if (time >= t.back()) return gap.back();
    const auto it = std::upper_bound(t.begin(), t.end(), time);
    const std::size_t i = static_cast<std::size_t>(it - t.begin());
    const double w = (time - t[i - 1]) / (t[i] - t[i - 1]);
    return gap[i - 1] + w * (gap[i] - gap[i - 1]);
  }
};

// Per-mode force predictive at steady-state hidden-state covariance, then
// the mixture bound over them. Free-space modes (K1 = 0) give N(0, Sf)
// without touching the Riccati solver.
inline InfoGainReport info_gain_partially_observed(
    std::span<const TwoMassModel> models, double gap_mean,
    const BeliefVector& prior, double eval_time, DareOptions dare = {}) {
  if (models.empty()) throw ArgumentError("info gain: empty mode list");
  if (static_cast<Eigen::Index>(models.size()) != prior.size()) {
    throw ArgumentError("info gain: " + std::to_string(models.size()) +
                        " models for a " + std::to_string(prior.size()) +
                        "-mode prior");
  }
  if (!std::isfinite(gap_mean)) throw ArgumentError("info gain: bad gap");
  InfoGainReport rep;
  rep.assumptions.gap = gap_mean;
  rep.assumptions.Ts = models.front().Ts;
  rep.assumptions.eval_time = eval_time;
  rep.assumptions.dare_tolerance = dare.tolerance;
  rep.assumptions.prior.assign(prior.probs().begin(), prior.probs().end());
  for (const TwoMassModel& m : models) {
    m.validate();
    if (eval_time < m.Ts) {
      throw ArgumentError("info gain: eval_time must be >= Ts");
    }
    rep.assumptions.sigma_w.push_back(m.sigma_w);
    rep.assumptions.sigma_f.push_back(m.sigma_f);
    if (m.K1 == 0.0) {
      rep.per_mode_distributions.push_back(Gaussian::scalar(0.0, m.sigma_f));
      rep.gains.emplace_back();
      continue;
    }
    SteadyStateGains g = solve_dare(m, dare);
    rep.per_mode_distributions.push_back(
        predictive_force_steady_state(m, gap_mean, 0.0, g));
    rep.gains.emplace_back(g);
  }
  rep.lower_bound = info_gain_lower_bound(prior, rep.per_mode_distributions);
  rep.prior_entropy = belief_entropy(prior);
  rep.saturation = rep.lower_bound > rep.prior_entropy;
  rep.saturated = std::min(rep.lower_bound, rep.prior_entropy);
  return rep;
}

inline InfoGainReport info_gain_partially_observed(
    std::span<const TwoMassModel> models, const GapTrajectory& trajectory,
    const BeliefVector& prior, double eval_time, DareOptions dare = {}) {
  return info_gain_partially_observed(models, trajectory.at(eval_time), prior,
                                      eval_time, dare);
}

// ---------------------------------------------------------------------------
// Monte Carlo estimate of H(n) - E[H(n | f)]

struct MonteCarloEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

inline MonteCarloEstimate info_gain_monte_carlo(
    const BeliefVector& prior, std::span<const Gaussian> components,
    std::size_t samples, std::uint64_t seed = kDefaultSeed) {
  detail::check_mixture(prior, components);
  if (samples < 1000) {
    throw ArgumentError("info_gain_monte_carlo: need at least 1000 samples");
  }
  std::vector<Eigen::MatrixXd> chol;
  for (const Gaussian& g : components) chol.push_back(g.cholesky_l());
  const std::size_t n_modes = components.size();
  std::vector<double> ll(n_modes);

  double sum = 0.0;
  double sum_sq = 0.0;
  const std::size_t blocks = (samples + kSampleBlock - 1) / kSampleBlock;
  for (std::size_t blk = 0; blk < blocks; ++blk) {
    std::mt19937_64 rng = block_engine(seed, blk);
    const std::size_t lo = blk * kSampleBlock;
    const std::size_t hi = std::min(samples, lo + kSampleBlock);
    for (std::size_t s = lo; s < hi; ++s) {
      const auto mode = static_cast<std::size_t>(sample_index(prior, rng));
      const Gaussian& g = components[mode];
      const Eigen::VectorXd f =
          g.mean() + chol[mode] * standard_normal(rng, g.dim());
      for (std::size_t m = 0; m < n_modes; ++m) {
        ll[m] = components[m].log_pdf(f);
      }
      const double h = belief_entropy(bayes_update(prior, ll).belief);
      sum += h;
      sum_sq += h * h;
    }
  }
  const double n = static_cast<double>(samples);
  const double mean = sum / n;
  const double var = std::max(sum_sq / n - mean * mean, 0.0) * n / (n - 1.0);
  return {belief_entropy(prior) - mean, std::sqrt(var / n)};
}

// ---------------------------------------------------------------------------
// Two-mode scalar surface: mu1 = 0, Sigma1 = 1, flat prior, (mu2, Sigma2)
// varied.

struct SurfacePoint {
  double mu2 = 0.0;
  double sigma2 = 0.0;
  double info_gain = 0.0;
};

inline std::vector<SurfacePoint> info_gain_surface(
    std::span<const double> mu2_grid, std::span<const double> sigma2_grid,
    double mu1 = 0.0, double sigma1 = 1.0) {
  const BeliefVector flat = BeliefVector::uniform(2);
  std::vector<SurfacePoint> out;
  out.reserve(mu2_grid.size() * sigma2_grid.size());
  for (double mu2 : mu2_grid) {
    for (double s2 : sigma2_grid) {
      const Gaussian comps[] = {Gaussian::scalar(mu1, sigma1),
                                Gaussian::scalar(mu2, s2)};
      out.push_back({mu2, s2, info_gain_lower_bound(flat, comps)});
    }
  }
  return out;
}

inline std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 1) throw ArgumentError("linspace: need at least one point");
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    v[static_cast<std::size_t>(i)] =
        n == 1 ? lo : lo + (hi - lo) * i / static_cast<double>(n - 1);
  }
  return v;
}

}  // namespace contactig

#endif  // CONTACTIG_INFO_GAIN_HPP_
