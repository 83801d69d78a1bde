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

// Grey-box identification of the two-mass plant by simulation error:
// the model is driven open loop by the measured q1 and its force output is
// matched to the measured force in the least-squares sense. Ts and Sf are
// held fixed; K1, M2, B2, K2 are searched in log space so they stay
// positive and are scaled alike.

#ifndef CONTACTIG_SYSID_HPP_
#define CONTACTIG_SYSID_HPP_

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "contactig/contact_model.hpp"
#include "contactig/errors.hpp"
#include "contactig/nelder_mead.hpp"
#include "contactig/random.hpp"
#include "contactig/trace.hpp"

namespace contactig {

class FitError : public NumericalError {
 public:
  FitError(const std::string& what, std::vector<double> restart_objectives)
      : NumericalError(what), restart_objectives_(std::move(restart_objectives)) {}
  const std::vector<double>& restart_objectives() const {
    return restart_objectives_;
  }

 private:
  std::vector<double> restart_objectives_;
};

// Fitted parameters, in the optimizer's order.
enum FitParam { kK1 = 0, kM2 = 1, kB2 = 2, kK2 = 3 };
inline constexpr std::array<const char*, 4> kFitParamNames = {"K1", "M2", "B2",
                                                              "K2"};

inline Eigen::Vector4d fit_vector(const TwoMassModel& m) {
  return {m.K1, m.M2, m.B2, m.K2};
}

inline TwoMassModel with_fit_vector(TwoMassModel m, const Eigen::Vector4d& v) {
  m.K1 = v[kK1];
  m.M2 = v[kM2];
  m.B2 = v[kB2];
  m.K2 = v[kK2];
  return m;
}

// Noise-free open-loop force f^m[t] = K1 (q2[t] - q1[t]) from x0 = [q1[0], 0].
inline std::vector<double> simulate_model_output(const TwoMassModel& params,
                                                 std::span<const double> q1) {
  const StateSpace ss = discretize(params);
  if (q1.empty()) return {};
  std::vector<double> f(q1.size());
  Eigen::Vector2d x(q1.front(), 0.0);
  for (std::size_t k = 0; k < q1.size(); ++k) {
    f[k] = params.K1 * (x[0] - q1[k]);
    x = ss.A * x + ss.B * q1[k];
    if (!x.allFinite() || x.cwiseAbs().maxCoeff() > 1e9) {
      throw DivergenceError("simulate_model_output: state diverged at sample " +
                            std::to_string(k) + " (" + params.describe() +
                            ", spectral radius " +
                            std::to_string(spectral_radius(ss.A)) + ")");
    }
  }
  return f;
}

// Mean squared simulation error.
inline double simulation_error(const TwoMassModel& params, const Trace& trace) {
  const std::vector<double> fm = simulate_model_output(params, trace.q1);
  double acc = 0.0;
  for (std::size_t k = 0; k < fm.size(); ++k) {
    const double r = fm[k] - trace.f[k];
    acc += r * r;
  }
  return acc / static_cast<double>(fm.size());
}

struct ParamBounds {
  Eigen::Vector4d lower;
  Eigen::Vector4d upper;

  // Three decades either side of a guess.
  static ParamBounds around(const TwoMassModel& guess, double decades = 3.0) {
    const Eigen::Vector4d g = fit_vector(guess);
    const double s = std::pow(10.0, decades);
    return {g / s, g * s};
  }

  void validate() const {
    if (!(lower.array() > 0.0).all() || !(upper.array() > lower.array()).all() ||
        !upper.allFinite()) {
      throw ArgumentError("fit: bounds must satisfy 0 < lo < hi < inf");
    }
  }
};

struct FitOptions {
  int restarts = 5;
  double restart_spread = 0.5;  // log-space std of restart perturbations
  double initial_step = 0.3;    // log-space simplex size
  std::uint64_t seed = kDefaultSeed;
  NelderMeadOptions optimizer{};
};

struct FitResult {
  TwoMassModel params;
  double residual_rms = 0.0;
  std::vector<double> residual;  // f^m - f per sample
  long iterations = 0;
  bool converged = false;
  bool identifiable = true;
  std::vector<double> restart_objectives;
  double initial_objective = 0.0;
  double objective = 0.0;
};

// Spectral heuristics for a starting point: K1 from peak force over peak
// displacement, the dominant force frequency as sqrt((K1 + K2)/M2),
// K2 = K1/10, and 10% of critical damping.
inline TwoMassModel default_initial_guess(const Trace& trace,
                                          double sigma_f = kDefaultForceNoise) {
  trace.validate();
  const double ts = trace.sample_period();
  double peak_f = 0.0;
  double peak_q = 0.0;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    peak_f = std::max(peak_f, std::abs(trace.f[k]));
    peak_q = std::max(peak_q, std::abs(trace.q1[k] - trace.q1.front()));
  }
  if (!(peak_q > 0.0) || !(peak_f > 0.0)) {
    throw ArgumentError("default_initial_guess: trace has no excitation");
  }
  double mean_f = 0.0;
  for (double v : trace.f) mean_f += v;
  mean_f /= static_cast<double>(trace.size());

  // coarse DFT scan, 0.5 Hz to a quarter of the sample rate
  const double f_hi = 0.25 / ts;
  double best_hz = 1.0;
  double best_mag = -1.0;
  for (double hz = 0.5; hz <= f_hi; hz *= 1.02) {
    std::complex<double> acc = 0.0;
    const double w = 2.0 * std::numbers::pi * hz * ts;
    for (std::size_t k = 0; k < trace.size(); ++k) {
      acc += (trace.f[k] - mean_f) *
             std::polar(1.0, -w * static_cast<double>(k));
    }
    if (std::abs(acc) > best_mag) {
      best_mag = std::abs(acc);
      best_hz = hz;
    }
  }
  const double omega = 2.0 * std::numbers::pi * best_hz;
  TwoMassModel g;
  g.Ts = ts;
  g.sigma_f = sigma_f;
  g.K1 = peak_f / peak_q;
  g.K2 = g.K1 / 10.0;
  g.M2 = (g.K1 + g.K2) / (omega * omega);
  g.B2 = 0.1 * 2.0 * std::sqrt(g.K2 * g.M2);
  return g;
}

inline FitResult fit(const Trace& trace, const TwoMassModel& initial_guess,
                     const ParamBounds& bounds, const FitOptions& opts = {}) {
  trace.validate();
  if (trace.size() < 100) throw ArgumentError("fit: need at least 100 samples");
  initial_guess.validate();
  bounds.validate();
  if (std::abs(trace.sample_period() - initial_guess.Ts) >
      1e-6 * initial_guess.Ts) {
    throw ArgumentError("fit: trace sample period does not match Ts");
  }
  if (opts.restarts < 1) throw ArgumentError("fit: need at least one restart");

  const Eigen::Vector4d log_lo = bounds.lower.array().log();
  const Eigen::Vector4d log_hi = bounds.upper.array().log();
  auto to_model = [&](const Eigen::VectorXd& z) {
    const Eigen::Vector4d v = z.array().exp();
    return with_fit_vector(initial_guess, v);
  };
  auto objective = [&](const Eigen::VectorXd& z) {
    try {
      return simulation_error(to_model(z), trace);
    } catch (const NumericalError&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  NelderMeadOptions nm = opts.optimizer;
  nm.lower = Eigen::VectorXd(log_lo);
  nm.upper = Eigen::VectorXd(log_hi);
  const Eigen::VectorXd z0 =
      fit_vector(initial_guess).array().log().matrix().cwiseMax(log_lo).cwiseMin(
          log_hi);
  const Eigen::VectorXd step = Eigen::VectorXd::Constant(4, opts.initial_step);

  FitResult out;
  out.initial_objective = objective(z0);
  NelderMeadResult best;
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal(0.0, opts.restart_spread);
  std::vector<Eigen::VectorXd> starts{z0};
  for (int r = 1; r < opts.restarts; ++r) {
    Eigen::VectorXd z = z0;
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] += normal(rng);
    starts.push_back(z.cwiseMax(log_lo).cwiseMin(log_hi));
  }
  for (std::size_t r = 0; r < starts.size(); ++r) {
    NelderMeadResult res = nelder_mead(objective, starts[r], step, nm);
    out.restart_objectives.push_back(res.value);
    out.iterations += res.iterations;
    if (r == 0 || res.value < best.value) best = std::move(res);
  }
  if (!std::isfinite(best.value)) {
    std::ostringstream os;
    os << "fit: every restart diverged; objectives:";
    for (double v : out.restart_objectives) os << ' ' << v;
    throw FitError(os.str(), out.restart_objectives);
  }

  Eigen::VectorXd z_best = best.x;
  out.converged = best.converged;
  if (best.value > out.initial_objective) {
    z_best = z0;
    best.value = out.initial_objective;
  }
  out.params = to_model(z_best);
  out.objective = best.value;

  // flat directions: +-10% in one parameter leaves the objective unchanged
  for (Eigen::Index i = 0; i < 4; ++i) {
    double lo = best.value;
    double hi = best.value;
    for (double factor : {0.9, 1.1}) {
      Eigen::VectorXd z = z_best;
      z[i] += std::log(factor);
      const double v = objective(z);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(best.value))) {
      out.identifiable = false;
    }
  }

  const std::vector<double> fm = simulate_model_output(out.params, trace.q1);
  out.residual.resize(fm.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < fm.size(); ++k) {
    out.residual[k] = fm[k] - trace.f[k];
    acc += out.residual[k] * out.residual[k];
  }
  out.residual_rms = std::sqrt(acc / static_cast<double>(fm.size()));
  return out;
}

}  // namespace contactig

#endif  // CONTACTIG_SYSID_HPP_
