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

// A robot approaches a compliant surface at 5 mm/s and touches it at
// t = 1 s. A two-hypothesis filter bank (free space, contact) tracks the
// mode; the debounced Bayesian detection is compared with a 6 N force
// threshold.

#include <cstdio>
#include <vector>

#include "contactig/contactig.hpp"

int main() {
  using namespace contactig;  // NOLINT

  TwoMassModel contact;
  contact.M2 = 20.0;
  contact.B2 = 800.0;
  contact.K2 = 2e4;
  contact.K1 = 2e4;
  contact.sigma_w = 100.0;

  const std::vector<TwoMassModel> truth = free_and_contact(contact);
  const std::vector<ModeInterval> schedule{{0.0, 1.0, 0}, {1.0, 1.4, 1}};
  const Trace trace = simulate(
      truth, schedule, [](double t) { return -5e-3 * (t - 1.0); }, 1.4, 42);

  const std::vector<FilterMode> modes{{"free", contact.with_k1(0.0)},
                                      {"contact", contact}};
  FilterOptions opts;
  opts.transition = sticky_transition(2);
  const FilterResult r =
      run_filter(trace, modes, BeliefVector::uniform(2), opts);

  std::printf("%8s %9s %9s %9s\n", "t", "force", "p(contact)", "entropy");
  for (std::size_t k = 1230; k < 1300; k += 5) {
    std::printf("%8.4f %9.3f %9.4f %9.4f\n", trace.t[k], trace.f[k],
                r.beliefs[k][1], r.entropy[k]);
  }
  auto show = [](const char* name, const std::optional<DetectionLatency>& l) {
    if (l && l->seconds) {
      std::printf("%s: %zu samples (%.1f ms)\n", name, *l->samples,
                  *l->seconds * 1e3);
    } else {
      std::printf("%s: not detected\n", name);
    }
  };
  show("bayesian detection", r.latency);
  show("6 N threshold", r.threshold_latency);
  std::printf("total belief entropy: %.3f\n", r.total_entropy);
  return 0;
}
