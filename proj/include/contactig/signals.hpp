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

// Position inputs q1(t) for driving the two-mass plant.

#ifndef CONTACTIG_SIGNALS_HPP_
#define CONTACTIG_SIGNALS_HPP_

#include <cmath>
#include <numbers>
#include <variant>
#include <vector>

#include "contactig/errors.hpp"

namespace contactig {

struct ConstantInput {
  double value = 0.0;
};

// before for t < at, after from then on
struct StepInput {
  double at = 0.0;
  double before = 0.0;
  double after = 0.0;
};

// Holds start until t0, moves at `rate` (m/s) afterwards.
struct RampInput {
  double t0 = 0.0;
  double start = 0.0;
  double rate = 0.0;
};

// Linear-frequency sweep from f0 to f1 Hz over `duration` seconds.
struct ChirpInput {
  double amplitude = 0.0;
  double f0 = 0.5;
  double f1 = 50.0;
  double duration = 1.0;
  double offset = 0.0;
};

// Piecewise-linear through (times[i], values[i]); held flat outside.
struct PiecewiseLinearInput {
  std::vector<double> times;
  std::vector<double> values;
};

using InputSignal = std::variant<ConstantInput, StepInput, RampInput,
                                 ChirpInput, PiecewiseLinearInput>;

inline double evaluate(const InputSignal& signal, double t) {
  struct Visitor {
    double t;
    double operator()(const ConstantInput& s) const { return s.value; }
    double operator()(const StepInput& s) const {
      return t < s.at ? s.before : s.after;
    }
    double operator()(const RampInput& s) const {
      return t < s.t0 ? s.start : s.start + s.rate * (t - s.t0);
    }
    double operator()(const ChirpInput& s) const {
      const double k = (s.f1 - s.f0) / s.duration;
      const double phase =
          2.0 * std::numbers::pi * (s.f0 * t + 0.5 * k * t * t);
      return s.offset + s.amplitude * std::sin(phase);
    }
    double operator()(const PiecewiseLinearInput& s) const {
      if (s.times.empty() || s.times.size() != s.values.size()) {
        throw ArgumentError("piecewise input: times/values mismatch");
      }
      if (t <= s.times.front()) return s.values.front();
      if (t >= s.times.back()) return s.values.back();
      std::size_t i = 1;
      while (s.times[i] < t) ++i;
      const double w = (t - s.times[i - 1]) / (s.times[i] - s.times[i - 1]);
      return s.values[i - 1] + w * (s.values[i] - s.values[i - 1]);
    }
  };
  return std::visit(Visitor{t}, signal);
}

}  // namespace contactig

#endif  // CONTACTIG_SIGNALS_HPP_
