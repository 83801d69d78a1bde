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

// Nelder-Mead downhill simplex with optional box projection.

#ifndef CONTACTIG_NELDER_MEAD_HPP_
#define CONTACTIG_NELDER_MEAD_HPP_

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "contactig/errors.hpp"

namespace contactig {

struct NelderMeadOptions {
  long max_iterations = 20000;
  // converged when the best value moved less than ftol_rel (relative) over
  // the last `window` iterations
  double ftol_rel = 1e-10;
  long window = 50;
  double ftol_abs = 0.0;  // best value at or below this also counts
  double xtol = 1e-13;    // simplex diameter, in the optimizer's coordinates
  std::optional<Eigen::VectorXd> lower;
  std::optional<Eigen::VectorXd> upper;
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = std::numeric_limits<double>::infinity();
  long iterations = 0;
  long evaluations = 0;
  bool converged = false;
  // final simplex, vertices sorted best first
  std::vector<Eigen::VectorXd> simplex;
  std::vector<double> simplex_values;
};

template <class Objective>
NelderMeadResult nelder_mead(Objective&& objective, const Eigen::VectorXd& x0,
                             const Eigen::VectorXd& step,
                             const NelderMeadOptions& opts = {}) {
  const Eigen::Index n = x0.size();
  if (n == 0 || step.size() != n) {
    throw ArgumentError("nelder_mead: start and step sizes disagree");
  }
  auto project = [&](Eigen::VectorXd x) {
    if (opts.lower) x = x.cwiseMax(*opts.lower);
    if (opts.upper) x = x.cwiseMin(*opts.upper);
    return x;
  };
  NelderMeadResult res;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++res.evaluations;
    const double v = objective(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  std::vector<Eigen::VectorXd> pts;
  std::vector<double> vals;
  pts.push_back(project(x0));
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd p = x0;
    p[i] += step[i];
    p = project(p);
    if (p == pts.front()) {
      p[i] = x0[i] - step[i];
      p = project(p);
    }
    pts.push_back(p);
  }
  for (const auto& p : pts) vals.push_back(eval(p));

  std::vector<std::size_t> order(pts.size());
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return vals[a] < vals[b];
                     });
    std::vector<Eigen::VectorXd> p2;
    std::vector<double> v2;
    for (std::size_t i : order) {
      p2.push_back(pts[i]);
      v2.push_back(vals[i]);
    }
    pts = std::move(p2);
    vals = std::move(v2);
  };

  std::deque<double> history;
  sort_simplex();
  for (long it = 0; it < opts.max_iterations; ++it) {
    res.iterations = it + 1;
    const std::size_t worst = pts.size() - 1;
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < worst; ++i) centroid += pts[i];
    centroid /= static_cast<double>(worst);

    const Eigen::VectorXd xr = project(centroid + (centroid - pts[worst]));
    const double fr = eval(xr);
    if (fr < vals.front()) {
      const Eigen::VectorXd xe =
          project(centroid + 2.0 * (centroid - pts[worst]));
      const double fe = eval(xe);
      if (fe < fr) {
        pts[worst] = xe;
        vals[worst] = fe;
      } else {
        pts[worst] = xr;
        vals[worst] = fr;
      }
    } else if (fr < vals[worst - 1]) {
      pts[worst] = xr;
      vals[worst] = fr;
    } else {
      const bool outside = fr < vals[worst];
      const Eigen::VectorXd xc =
          outside ? project(centroid + 0.5 * (xr - centroid))
                  : project(centroid + 0.5 * (pts[worst] - centroid));
      const double fc = eval(xc);
      if (fc < (outside ? fr : vals[worst])) {
        pts[worst] = xc;
        vals[worst] = fc;
      } else {
        for (std::size_t i = 1; i < pts.size(); ++i) {
          pts[i] = project(pts.front() + 0.5 * (pts[i] - pts.front()));
          vals[i] = eval(pts[i]);
        }
      }
    }
    sort_simplex();

    history.push_back(vals.front());
    if (static_cast<long>(history.size()) > opts.window + 1) history.pop_front();
    double diameter = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      diameter = std::max(diameter,
                          (pts[i] - pts.front()).cwiseAbs().maxCoeff());
    }
    const bool flat_window =
        static_cast<long>(history.size()) == opts.window + 1 &&
        std::abs(history.front() - history.back()) <=
            opts.ftol_rel * std::max(std::abs(history.back()),
                                     std::numeric_limits<double>::min());
    if (vals.front() <= opts.ftol_abs || flat_window || diameter < opts.xtol) {
      res.converged = true;
      break;
    }
  }
  res.x = pts.front();
  res.value = vals.front();
  res.simplex = pts;
  res.simplex_values = vals;
  return res;
}

}  // namespace contactig

#endif  // CONTACTIG_NELDER_MEAD_HPP_
