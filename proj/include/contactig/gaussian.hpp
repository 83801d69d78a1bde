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

// Gaussian beliefs over forces/positions, discrete mode beliefs, and the
// entropy quantities built from them. Everything here works in the log
// domain; densities are only exponentiated at the very end.

#ifndef CONTACTIG_GAUSSIAN_HPP_
#define CONTACTIG_GAUSSIAN_HPP_

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "contactig/errors.hpp"

namespace contactig {

inline constexpr double kLn2PiE = 2.837877066409345483560659472811;  // ln(2*pi*e)
inline constexpr double kLn2Pi = 1.837877066409345483560659472811;   // ln(2*pi)
inline constexpr double kProbabilityFloor = 1e-300;

namespace detail {

inline std::string shape(const Eigen::MatrixXd& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

inline double log_sum_exp(std::span<const double> terms) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double t : terms) hi = std::max(hi, t);
  if (!std::isfinite(hi)) return hi;
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - hi);
  return hi + std::log(acc);
}

}  // namespace detail

// Multivariate normal N(mean, cov). The covariance is validated (finite,
// symmetric, Cholesky-factorable) on construction and its factor is kept,
// so every later evaluation is a triangular solve.
class Gaussian {
 public:
  Gaussian(Eigen::VectorXd mean, Eigen::MatrixXd cov)
      : mean_(std::move(mean)), cov_(std::move(cov)) {
    if (mean_.size() == 0) throw ArgumentError("Gaussian: empty mean");
    if (cov_.rows() != mean_.size() || cov_.cols() != mean_.size()) {
      throw ArgumentError("Gaussian: covariance is " + detail::shape(cov_) +
                          " but mean has length " +
                          std::to_string(mean_.size()));
    }
    if (!mean_.allFinite() || !cov_.allFinite()) {
      throw ArgumentError("Gaussian: non-finite mean or covariance");
    }
    const double scale = cov_.cwiseAbs().maxCoeff();
    if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
      throw ArgumentError("Gaussian: covariance is not symmetric");
    }
    llt_.compute(cov_);
    if (llt_.info() != Eigen::Success ||
        llt_.matrixL().toDenseMatrix().diagonal().minCoeff() <= 0.0) {
      std::ostringstream os;
      os << "Gaussian: covariance is not positive definite:\n" << cov_;
      throw NumericalError(os.str());
    }
    log_det_ = 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
  }

  static Gaussian scalar(double mean, double variance) {
    return Gaussian(Eigen::VectorXd::Constant(1, mean),
                    Eigen::MatrixXd::Constant(1, 1, variance));
  }

  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& cov() const { return cov_; }
  Eigen::Index dim() const { return mean_.size(); }
  double log_det() const { return log_det_; }
  // Lower Cholesky factor of cov.
  Eigen::MatrixXd cholesky_l() const { return llt_.matrixL(); }

  double log_pdf(const Eigen::VectorXd& x) const {
    if (x.size() != dim()) {
      throw ArgumentError("gaussian_pdf: point has length " +
                          std::to_string(x.size()) + ", expected " +
                          std::to_string(dim()));
    }
    const Eigen::VectorXd z = llt_.matrixL().solve(x - mean_);
    return -0.5 * (static_cast<double>(dim()) * kLn2Pi + log_det_ +
                   z.squaredNorm());
  }

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd cov_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double log_det_ = 0.0;
};

// Discrete distribution over N contact modes. Entries are floored at
// kProbabilityFloor so ln(b) is always finite; measurements can drive a
// mode to machine zero and it must stay recoverable.
class BeliefVector {
 public:
  explicit BeliefVector(Eigen::VectorXd probs) : probs_(std::move(probs)) {
    if (probs_.size() == 0) throw ArgumentError("BeliefVector: no modes");
    if (!probs_.allFinite() || probs_.minCoeff() < 0.0) {
      throw ArgumentError("BeliefVector: entries must be finite and >= 0");
    }
    if (std::abs(probs_.sum() - 1.0) > 1e-12) {
      std::ostringstream os;
      os.precision(17);
      os << "BeliefVector: entries sum to " << probs_.sum() << ", not 1";
      throw ArgumentError(os.str());
    }
    probs_ = probs_.cwiseMax(kProbabilityFloor);
  }

  static BeliefVector uniform(Eigen::Index n) {
    if (n <= 0) throw ArgumentError("BeliefVector: no modes");
    return BeliefVector(
        Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n)));
  }

  // Normalizes nonnegative weights; fails if they are all zero.
  static BeliefVector normalized(const Eigen::VectorXd& weights) {
    if (weights.size() == 0) throw ArgumentError("BeliefVector: no modes");
    if (!weights.allFinite() || weights.minCoeff() < 0.0) {
      throw ArgumentError("BeliefVector: weights must be finite and >= 0");
    }
    const double total = weights.sum();
    if (!(total > 0.0)) throw ArgumentError("BeliefVector: zero total weight");
    Eigen::VectorXd p = (weights / total).cwiseMax(kProbabilityFloor);
    return BeliefVector(p / p.sum());
  }

  const Eigen::VectorXd& probs() const { return probs_; }
  Eigen::Index size() const { return probs_.size(); }
  double operator[](Eigen::Index i) const { return probs_[i]; }

  Eigen::Index argmax() const {
    Eigen::Index idx = 0;
    probs_.maxCoeff(&idx);
    return idx;
  }

  bool is_flat(double tol = 1e-12) const {
    const double u = 1.0 / static_cast<double>(size());
    return (probs_.array() - u).abs().maxCoeff() <= tol;
  }

 private:
  Eigen::VectorXd probs_;
};

inline double gaussian_log_pdf(const Gaussian& g, const Eigen::VectorXd& x) {
  return g.log_pdf(x);
}

inline double gaussian_pdf(const Gaussian& g, const Eigen::VectorXd& x) {
  return std::exp(g.log_pdf(x));
}

inline double gaussian_entropy(const Gaussian& g) {
  return 0.5 * static_cast<double>(g.dim()) * kLn2PiE + 0.5 * g.log_det();
}

inline double belief_entropy(const BeliefVector& b) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    const double p = std::clamp(b[i], kProbabilityFloor, 1.0);
    h -= p * std::log(p);
  }
  return std::max(h, 0.0);
}

namespace detail {

inline void check_mixture(const BeliefVector& b,
                          std::span<const Gaussian> components) {
  if (components.empty()) throw ArgumentError("mixture: no components");
  if (static_cast<Eigen::Index>(components.size()) != b.size()) {
    throw ArgumentError("mixture: " + std::to_string(components.size()) +
                        " components for a belief over " +
                        std::to_string(b.size()) + " modes");
  }
  const Eigen::Index dim = components.front().dim();
  for (const Gaussian& g : components) {
    if (g.dim() != dim) {
      throw ArgumentError("mixture: components have mixed dimensions");
    }
  }
}

// ln N(a | b, cov_a + cov_b)
inline double log_overlap(const Gaussian& a, const Gaussian& b) {
  const Eigen::MatrixXd s = a.cov() + b.cov();
  Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("mixture: summed covariance is not positive definite");
  }
  const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  const Eigen::VectorXd z = llt.matrixL().solve(a.mean() - b.mean());
  return -0.5 * (static_cast<double>(a.dim()) * kLn2Pi + log_det +
                 z.squaredNorm());
}

}  // namespace detail

// Lower bound on the differential entropy of sum_n b_n N(mu_n, Sigma_n):
//   -sum_n b_n ln sum_m b_m N(mu_n | mu_m, Sigma_n + Sigma_m).
inline double mixture_entropy_lower_bound(const BeliefVector& b,
                                          std::span<const Gaussian> components) {
  detail::check_mixture(b, components);
  const std::size_t n_modes = components.size();
  std::vector<double> terms(n_modes);
  double bound = 0.0;
  for (std::size_t n = 0; n < n_modes; ++n) {
    for (std::size_t m = 0; m < n_modes; ++m) {
      terms[m] = std::log(b[static_cast<Eigen::Index>(m)]) +
                 detail::log_overlap(components[n], components[m]);
    }
    bound -= b[static_cast<Eigen::Index>(n)] * detail::log_sum_exp(terms);
  }
  return bound;
}

// Lower bound on the mode information gain H(n) - H(n | f) of one
// observation f drawn from the per-mode components. Not clamped: callers
// that want the saturated value take min(bound, belief_entropy(b)).
inline double info_gain_lower_bound(const BeliefVector& b,
                                    std::span<const Gaussian> components) {
  const double mixture = mixture_entropy_lower_bound(b, components);
  double conditional =
      0.5 * static_cast<double>(components.front().dim()) * kLn2PiE;
  for (std::size_t n = 0; n < components.size(); ++n) {
    conditional +=
        0.5 * b[static_cast<Eigen::Index>(n)] * components[n].log_det();
  }
  return mixture - conditional;
}

}  // namespace contactig

#endif  // CONTACTIG_GAUSSIAN_HPP_
