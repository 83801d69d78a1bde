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

// Recursive contact-mode inference.
//
// Fully observed modes score each force sample directly against their
// spring model. Partially observed modes run their own Kalman filter over
// the hidden environment state [q2, dq2] and score the force against the
// filter's one-step predictive. The mode belief is the HMM forward
// recursion over those per-sample likelihoods.

#ifndef CONTACTIG_MODE_ESTIMATOR_HPP_
#define CONTACTIG_MODE_ESTIMATOR_HPP_

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "contactig/contact_model.hpp"
#include "contactig/errors.hpp"
#include "contactig/gaussian.hpp"
#include "contactig/trace.hpp"

namespace contactig {

inline const double kLogLikelihoodFloor = std::log(kProbabilityFloor);

struct BayesUpdate {
  BeliefVector belief;
  // every likelihood was below the floor; belief is the prior
  bool degenerate = false;
};

// Posterior over modes from per-mode log-likelihoods of one observation.
inline BayesUpdate bayes_update(const BeliefVector& prior,
                                std::span<const double> log_likelihoods) {
  if (static_cast<Eigen::Index>(log_likelihoods.size()) != prior.size()) {
    throw ArgumentError("bayes_update: " +
                        std::to_string(log_likelihoods.size()) +
                        " likelihoods for " + std::to_string(prior.size()) +
                        " modes");
  }
  bool any_above_floor = false;
  std::vector<double> log_post(log_likelihoods.size());
  for (std::size_t i = 0; i < log_likelihoods.size(); ++i) {
    const double ll = log_likelihoods[i];
    if (std::isnan(ll)) throw NumericalError("bayes_update: NaN likelihood");
    if (ll > kLogLikelihoodFloor) any_above_floor = true;
    log_post[i] = std::max(ll, kLogLikelihoodFloor) +
                  std::log(prior[static_cast<Eigen::Index>(i)]);
  }
  if (!any_above_floor) return {prior, true};
  const double norm = detail::log_sum_exp(log_post);
  Eigen::VectorXd p(prior.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    p[i] = std::exp(log_post[static_cast<std::size_t>(i)] - norm);
  }
  return {BeliefVector::normalized(p), false};
}

inline BayesUpdate bayes_update_fully_observed(
    const BeliefVector& belief, std::span<const ContactMode> modes,
    const Eigen::VectorXd& q, const Eigen::VectorXd& f,
    const Eigen::MatrixXd& sigma_f) {
  if (static_cast<Eigen::Index>(modes.size()) != belief.size()) {
    throw ArgumentError("bayes_update_fully_observed: mode count mismatch");
  }
  std::vector<double> ll;
  ll.reserve(modes.size());
  for (const ContactMode& mode : modes) {
    ll.push_back(mode_force_distribution(mode, q, sigma_f).log_pdf(f));
  }
  return bayes_update(belief, ll);
}

inline BayesUpdate bayes_update_fully_observed(
    const BeliefVector& belief, std::span<const ContactMode> modes,
    const Eigen::VectorXd& q, double f, double sigma_f) {
  return bayes_update_fully_observed(belief, modes, q,
                                     Eigen::VectorXd::Constant(1, f),
                                     Eigen::MatrixXd::Constant(1, 1, sigma_f));
}

inline void check_transition(const Eigen::MatrixXd& transition,
                             Eigen::Index n) {
  if (transition.rows() != n || transition.cols() != n) {
    throw ArgumentError("transition matrix is " + detail::shape(transition) +
                        ", expected " + std::to_string(n) + "x" +
                        std::to_string(n));
  }
  if (!transition.allFinite() || transition.minCoeff() < 0.0) {
    throw ArgumentError("transition matrix has negative or non-finite entries");
  }
  for (Eigen::Index r = 0; r < n; ++r) {
    if (std::abs(transition.row(r).sum() - 1.0) > 1e-12) {
      throw ArgumentError("transition matrix row " + std::to_string(r) +
                          " does not sum to 1");
    }
  }
}

// One HMM prediction: b' = T^T b with T row-stochastic.
inline BeliefVector hmm_step(const BeliefVector& belief,
                             const Eigen::MatrixXd& transition) {
  check_transition(transition, belief.size());
  return BeliefVector::normalized(transition.transpose() * belief.probs());
}

// Diagonal 1 - rho, the rest spread evenly over the other modes.
inline Eigen::MatrixXd sticky_transition(Eigen::Index n, double rho = 1e-4) {
  if (n < 1) throw ArgumentError("sticky_transition: no modes");
  if (n == 1) return Eigen::MatrixXd::Ones(1, 1);
  Eigen::MatrixXd t =
      Eigen::MatrixXd::Constant(n, n, rho / static_cast<double>(n - 1));
  t.diagonal().setConstant(1.0 - rho);
  return t;
}

// ---------------------------------------------------------------------------
// Steady-state covariance

struct SteadyStateGains {
  Eigen::Matrix2d P = Eigen::Matrix2d::Zero();       // Riccati fixed point
  Eigen::Matrix2d P_plus = Eigen::Matrix2d::Zero();  // A P A' + Bw Sw Bw'
  long iterations = 0;
  double residual = 0.0;  // ||P - Ric(P)||_max / ||P||_max
};

struct DareOptions {
  double tolerance = 1e-12;  // relative change between iterates
  long max_iterations = 1'000'000;
};

inline Eigen::Matrix2d riccati_step(const StateSpace& ss, double sigma_w,
                                    double sigma_f, const Eigen::Matrix2d& p) {
  // measurement update in Joseph form, then the time update; algebraically
  // A P A' - A P C' (C P C' + Sf)^-1 C P A' + Bw Sw Bw' without the
  // cancellation when C P C' >> Sf
  const double s = ss.C * p * ss.C.transpose() + sigma_f;
  const Eigen::Vector2d gain = p * ss.C.transpose() / s;
  const Eigen::Matrix2d ikc = Eigen::Matrix2d::Identity() - gain * ss.C;
  const Eigen::Matrix2d post =
      ikc * p * ikc.transpose() + gain * sigma_f * gain.transpose();
  Eigen::Matrix2d next =
      ss.A * post * ss.A.transpose() + ss.Bw * sigma_w * ss.Bw.transpose();
  return 0.5 * (next + next.transpose());
}

inline double dare_residual(const StateSpace& ss, double sigma_w,
                            double sigma_f, const Eigen::Matrix2d& p) {
  const double scale = p.cwiseAbs().maxCoeff();
  const double diff =
      (p - riccati_step(ss, sigma_w, sigma_f, p)).cwiseAbs().maxCoeff();
  return scale > 0.0 ? diff / scale : diff;
}

// Fixed-point iteration of the Riccati recursion
//   P <- A P A' - A P C' (C P C' + Sf)^-1 C P A' + Bw Sw Bw'
// from P0 = Bw Sw Bw' + 1e-9 I.
inline SteadyStateGains solve_dare(const StateSpace& ss, double sigma_w,
                                   double sigma_f, DareOptions opts = {}) {
  if (!(sigma_f > 0.0)) throw ArgumentError("solve_dare: sigma_f must be > 0");
  if (sigma_w < 0.0) throw ArgumentError("solve_dare: sigma_w must be >= 0");
  SteadyStateGains out;
  if (sigma_w == 0.0) return out;  // P = 0 is an exact fixed point

  const Eigen::Matrix2d q = ss.Bw * sigma_w * ss.Bw.transpose();
  Eigen::Matrix2d p = q + 1e-9 * Eigen::Matrix2d::Identity();
  double change = 0.0;
  for (long it = 1; it <= opts.max_iterations; ++it) {
    const Eigen::Matrix2d next = riccati_step(ss, sigma_w, sigma_f, p);
    if (!next.allFinite()) {
      throw ConvergenceError("solve_dare: iterate became non-finite after " +
                                 std::to_string(it) + " iterations",
                             change);
    }
    change = (next - p).cwiseAbs().maxCoeff() / next.cwiseAbs().maxCoeff();
    p = next;
    if (change < opts.tolerance) {
      // a few more sweeps while they still help; differencing callers need
      // the fixed point to the last bit, not just to the tolerance
      for (int extra = 0; extra < 64 && change > 0.0; ++extra) {
        const Eigen::Matrix2d again = riccati_step(ss, sigma_w, sigma_f, p);
        const double c =
            (again - p).cwiseAbs().maxCoeff() / again.cwiseAbs().maxCoeff();
        if (c >= change) break;
        change = c;
        p = again;
      }
      out.P = p;
      out.P_plus = ss.A * p * ss.A.transpose() + q;
      out.P_plus = 0.5 * (out.P_plus + out.P_plus.transpose()).eval();
      out.iterations = it;
      out.residual = dare_residual(ss, sigma_w, sigma_f, p);
      return out;
    }
  }
  std::ostringstream os;
  os << "solve_dare: no convergence in " << opts.max_iterations
     << " iterations, last relative change " << change;
  throw ConvergenceError(os.str(), change);
}

inline SteadyStateGains solve_dare(const TwoMassModel& model,
                                   DareOptions opts = {}) {
  return solve_dare(discretize(model), model.sigma_w, model.sigma_f, opts);
}

// ---------------------------------------------------------------------------
// Kalman filter over x = [q2, dq2]

struct KalmanStep {
  Gaussian posterior;         // x[t+1] given f[1..t]
  Gaussian predictive_force;  // f[t] given f[1..t-1]
};

inline KalmanStep kalman_step(const Gaussian& prior, const StateSpace& ss,
                              double q1, double f, double sigma_w,
                              double sigma_f) {
  if (prior.dim() != 2) {
    throw ArgumentError("kalman_step: state prior must be 2-dimensional");
  }
  const Eigen::Vector2d mu = prior.mean();
  const Eigen::Matrix2d sigma = prior.cov();
  const double k1 = ss.k1();

  const double f_mean = ss.C * mu - k1 * q1;
  const double s = ss.C * sigma * ss.C.transpose() + sigma_f;
  Gaussian predictive = Gaussian::scalar(f_mean, s);

  // Joseph form keeps the update symmetric PSD
  const Eigen::Vector2d gain = sigma * ss.C.transpose() / s;
  const Eigen::Vector2d mu_post = mu + gain * (f - f_mean);
  const Eigen::Matrix2d ikc = Eigen::Matrix2d::Identity() - gain * ss.C;
  const Eigen::Matrix2d sigma_post =
      ikc * sigma * ikc.transpose() + gain * sigma_f * gain.transpose();

  const Eigen::Vector2d mu_next = ss.A * mu_post + ss.B * q1;
  Eigen::Matrix2d sigma_next = ss.A * sigma_post * ss.A.transpose() +
                               ss.Bw * sigma_w * ss.Bw.transpose();
  sigma_next = 0.5 * (sigma_next + sigma_next.transpose()).eval();
  if (!mu_next.allFinite() || !sigma_next.allFinite()) {
    std::ostringstream os;
    os << "kalman_step: non-finite state\nmean:\n"
       << mu_next << "\ncov:\n"
       << sigma_next;
    throw NumericalError(os.str());
  }
  return {Gaussian(mu_next, sigma_next), std::move(predictive)};
}

// Force predictive for the contact mode with the steady-state covariance:
//   N(K1 (mu_q2 - q1), K1 P+ K1 + Sf).
inline Gaussian predictive_force_steady_state(const TwoMassModel& model,
                                              double mu_q2, double q1,
                                              const SteadyStateGains& gains) {
  return Gaussian::scalar(
      model.K1 * (mu_q2 - q1),
      model.K1 * gains.P_plus(0, 0) * model.K1 + model.sigma_f);
}

// ---------------------------------------------------------------------------
// Filtering a whole trace

// One hypothesis in the filter bank. A ContactMode is scored fully observed
// against q = [q1] (1 column) or q = [q1, q2] (2 columns, trace must carry
// q2). A TwoMassModel is scored through its own Kalman filter.
struct FilterMode {
  std::string name;
  std::variant<ContactMode, TwoMassModel> model;
};

struct DetectionLatency {
  std::size_t switch_index = 0;
  int new_mode = 0;
  std::optional<std::size_t> samples;  // empty: never detected
  std::optional<double> seconds;
};

struct FilterOptions {
  std::optional<Eigen::MatrixXd> transition;  // identity when empty
  double sigma_f = kDefaultForceNoise;        // for fully observed modes
  std::optional<Eigen::Vector2d> initial_mean;  // default [q1(0), 0]
  Eigen::Vector2d initial_variance{1e-4, 1e-2};
  std::size_t debounce = 5;
  double threshold_newtons = 6.0;
};

struct FilterResult {
  std::vector<BeliefVector> beliefs;
  std::vector<double> entropy;
  std::vector<int> map_mode;
  double total_entropy = 0.0;
  std::size_t degenerate_steps = 0;
  std::optional<DetectionLatency> latency;
  std::optional<DetectionLatency> threshold_latency;
};

namespace detail {

inline std::optional<std::size_t> first_switch(const std::vector<int>& ids) {
  for (std::size_t i = 1; i < ids.size(); ++i) {
    if (ids[i] != ids[i - 1]) return i;
  }
  return std::nullopt;
}

}  // namespace detail

// Debounced: the first sample at or after the switch where the MAP mode is
// the new mode and stays so for `debounce` consecutive samples.
inline DetectionLatency detection_latency(const std::vector<int>& map_mode,
                                          std::size_t switch_index,
                                          int new_mode, double ts,
                                          std::size_t debounce) {
  DetectionLatency out{switch_index, new_mode, std::nullopt, std::nullopt};
  const std::size_t need = std::max<std::size_t>(debounce, 1);
  std::size_t run = 0;
  for (std::size_t k = switch_index; k < map_mode.size(); ++k) {
    run = map_mode[k] == new_mode ? run + 1 : 0;
    if (run == need) {
      const std::size_t first = k + 1 - need;
      out.samples = first - switch_index;
      out.seconds = static_cast<double>(*out.samples) * ts;
      break;
    }
  }
  return out;
}

inline DetectionLatency threshold_latency(const std::vector<double>& force,
                                          std::size_t switch_index,
                                          int new_mode, double ts,
                                          double threshold) {
  DetectionLatency out{switch_index, new_mode, std::nullopt, std::nullopt};
  for (std::size_t k = switch_index; k < force.size(); ++k) {
    if (std::abs(force[k]) > threshold) {
      out.samples = k - switch_index;
      out.seconds = static_cast<double>(*out.samples) * ts;
      break;
    }
  }
  return out;
}

inline FilterResult run_filter(const Trace& trace,
                               std::span<const FilterMode> modes,
                               const BeliefVector& prior,
                               const FilterOptions& opts = {}) {
  trace.validate();
  if (modes.empty()) throw ArgumentError("run_filter: no modes");
  if (static_cast<Eigen::Index>(modes.size()) != prior.size()) {
    throw ArgumentError("run_filter: prior has " + std::to_string(prior.size()) +
                        " entries for " + std::to_string(modes.size()) +
                        " modes");
  }
  const Eigen::Index n_modes = prior.size();
  const Eigen::MatrixXd transition =
      opts.transition.value_or(Eigen::MatrixXd::Identity(n_modes, n_modes));
  check_transition(transition, n_modes);
  if (!(opts.sigma_f > 0.0)) throw ArgumentError("run_filter: sigma_f <= 0");
  const double ts = trace.sample_period();

  // per-mode Kalman state (only for TwoMassModel hypotheses)
  struct Bank {
    std::optional<StateSpace> ss;
    std::optional<Gaussian> state;
  };
  std::vector<Bank> bank(modes.size());
  const Eigen::Vector2d mean0 =
      opts.initial_mean.value_or(Eigen::Vector2d(trace.q1.front(), 0.0));
  for (std::size_t i = 0; i < modes.size(); ++i) {
    if (const auto* cm = std::get_if<ContactMode>(&modes[i].model)) {
      cm->validate();
      if (cm->force_dim() != 1 ||
          (cm->position_dim() != 1 && cm->position_dim() != 2)) {
        throw ArgumentError("run_filter: mode '" + modes[i].name +
                            "' must map [q1] or [q1,q2] to one force");
      }
      if (cm->position_dim() == 2 && !trace.q2) {
        throw ArgumentError("run_filter: mode '" + modes[i].name +
                            "' needs q2 but the trace has none");
      }
    } else {
      const auto& m = std::get<TwoMassModel>(modes[i].model);
      m.validate();
      if (std::abs(m.Ts - ts) > 1e-6 * ts) {
        throw ArgumentError("run_filter: mode '" + modes[i].name +
                            "' has Ts=" + std::to_string(m.Ts) +
                            " but the trace is sampled at " +
                            std::to_string(ts));
      }
      bank[i].ss = discretize(m);
      bank[i].state.emplace(
          mean0, Eigen::Matrix2d(opts.initial_variance.asDiagonal()));
    }
  }

  FilterResult out;
  const std::size_t n = trace.size();
  out.beliefs.reserve(n);
  out.entropy.reserve(n);
  out.map_mode.reserve(n);
  BeliefVector belief = prior;
  std::vector<double> ll(modes.size());
  for (std::size_t k = 0; k < n; ++k) {
    const double q1 = trace.q1[k];
    const double f = trace.f[k];
    for (std::size_t i = 0; i < modes.size(); ++i) {
      if (const auto* cm = std::get_if<ContactMode>(&modes[i].model)) {
        Eigen::VectorXd q(cm->position_dim());
        q[0] = q1;
        if (q.size() == 2) q[1] = (*trace.q2)[k];
        ll[i] = mode_force_distribution(*cm, q, opts.sigma_f)
                    .log_pdf(Eigen::VectorXd::Constant(1, f));
      } else {
        const auto& m = std::get<TwoMassModel>(modes[i].model);
        KalmanStep step =
            kalman_step(*bank[i].state, *bank[i].ss, q1, f, m.sigma_w, m.sigma_f);
        ll[i] = step.predictive_force.log_pdf(Eigen::VectorXd::Constant(1, f));
        bank[i].state = std::move(step.posterior);
      }
    }
    if (k > 0) belief = hmm_step(belief, transition);
    BayesUpdate upd = bayes_update(belief, ll);
    if (upd.degenerate) ++out.degenerate_steps;
    belief = upd.belief;
    const double h = belief_entropy(belief);
    out.beliefs.push_back(belief);
    out.entropy.push_back(h);
    out.map_mode.push_back(static_cast<int>(belief.argmax()));
    out.total_entropy += h;
  }

  if (trace.mode_id) {
    if (auto sw = detail::first_switch(*trace.mode_id)) {
      const int new_mode = (*trace.mode_id)[*sw];
      out.latency =
          detection_latency(out.map_mode, *sw, new_mode, ts, opts.debounce);
      out.threshold_latency = threshold_latency(trace.f, *sw, new_mode, ts,
                                                opts.threshold_newtons);
    }
  }
  return out;
}

inline void write_belief_csv(std::ostream& os, const Trace& trace,
                             const FilterResult& result) {
  if (result.beliefs.size() != trace.size()) {
    throw ArgumentError("write_belief_csv: result does not match trace");
  }
  const Eigen::Index n_modes =
      result.beliefs.empty() ? 0 : result.beliefs.front().size();
  os << "t";
  for (Eigen::Index i = 0; i < n_modes; ++i) os << ",b_" << (i + 1);
  os << ",entropy,map_mode\n";
  for (std::size_t k = 0; k < trace.size(); ++k) {
    os << detail::format_double(trace.t[k]);
    for (Eigen::Index i = 0; i < n_modes; ++i) {
      os << ',' << detail::format_double(result.beliefs[k][i]);
    }
    os << ',' << detail::format_double(result.entropy[k]) << ','
       << result.map_mode[k] << '\n';
  }
}

}  // namespace contactig

#endif  // CONTACTIG_MODE_ESTIMATOR_HPP_
