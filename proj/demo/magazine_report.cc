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

// Compares the three magazine-contact setups: the partially observed
// information-gain bound and its gradient in the plant parameters, over a
// small grid of process noise and evaluation gap.

#include <cstdio>

#include "contactig/contactig.hpp"

int main() {
  using namespace contactig;  // NOLINT
  const BeliefVector flat = BeliefVector::uniform(2);

  std::printf("%-18s %8s %7s %10s %11s %11s %11s %11s\n", "setup", "Sw", "gap_mm",
              "bound", "dK1", "dM2", "dB2", "dK2");
  for (double sw : kMagazineSigmaW) {
    for (double gap : kMagazineGaps) {
      for (const NamedModel& nm : magazine_conditions(sw)) {
        const GradientReport g =
            info_gain_gradient(free_and_contact(nm.model), gap, flat);
        std::printf("%-18s %8.1e %7.2f %10.4f %11.3e %11.3e %11.3e %11.3e\n",
                    nm.name.c_str(), sw, gap * 1e3, g.value, g.gradient[kK1],
                    g.gradient[kM2], g.gradient[kB2], g.gradient[kK2]);
      }
    }
  }
  return 0;
}
