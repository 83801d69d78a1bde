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

// Identified plant parameters of three magazine-contact setups (compliance
// in the magazine joints, on the contact surface, under the feet), each
// at 1250 Hz with Sf = 1.25 N^2.

#ifndef CONTACTIG_PRESETS_HPP_
#define CONTACTIG_PRESETS_HPP_

#include <array>
#include <string>
#include <vector>

#include "contactig/contact_model.hpp"

namespace contactig {

struct NamedModel {
  std::string name;
  TwoMassModel model;
};

inline TwoMassModel magazine_model(double k1, double m2, double b2, double k2,
                                   double sigma_w = 0.0) {
  TwoMassModel m;
  m.K1 = k1;
  m.M2 = m2;
  m.B2 = b2;
  m.K2 = k2;
  m.Ts = kDefaultSamplePeriod;
  m.sigma_w = sigma_w;
  m.sigma_f = kDefaultForceNoise;
  return m;
}

inline NamedModel flex_joints(double sigma_w = 0.0) {
  return {"flex_joints", magazine_model(17.4e4, 20.1, 305.0, 2630.0, sigma_w)};
}
inline NamedModel compliant_surface(double sigma_w = 0.0) {
  return {"compliant_surface", magazine_model(1.3e4, 63.9, 1870.0, 7350.0, sigma_w)};
}
inline NamedModel compliant_feet(double sigma_w = 0.0) {
  return {"compliant_feet", magazine_model(2.61e4, 69.3, 1080.0, 1.81e4, sigma_w)};
}

inline std::vector<NamedModel> magazine_conditions(double sigma_w = 0.0) {
  return {flex_joints(sigma_w), compliant_surface(sigma_w),
          compliant_feet(sigma_w)};
}

// Assumption grid for comparing the setups: process-noise variance (N^2,
// entering through Bw = [0, Ts/M2]) and evaluation gap q2 - q1 (m), flat
// prior over {free space, contact}.
inline constexpr std::array<double, 3> kMagazineSigmaW = {5e6, 1e7, 2e7};
inline constexpr std::array<double, 3> kMagazineGaps = {0.15e-3, 0.2e-3,
                                                        0.25e-3};

// Two-mode bank for one setup: free space (same plant, K1 = 0) and contact.
inline std::vector<TwoMassModel> free_and_contact(const TwoMassModel& contact) {
  return {contact.with_k1(0.0), contact};
}

}  // namespace contactig

#endif  // CONTACTIG_PRESETS_HPP_
