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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "contactig/info_gain.hpp"
#include "contactig/presets.hpp"
#include "oracles.hpp"

namespace contactig {
namespace {

const double kAnchor = -0.5 * (1.0 - std::numbers::ln2);

// Two-mode bound over {N(0, Sf), N(d, Sf)} at a flat prior, written out:
//   -ln((1 + exp(-d^2 / (4 Sf))) / 2) + ln(4 pi Sf)/2 - ln(2 pi e Sf)/2
double two_mode_bound(double d, double sf) {
  const double x = d * d / (4.0 * sf);
  return -std::log(0.5 * (1.0 + std::exp(-x))) + 0.5 * std::log(2.0) - 0.5;
}

oracle::Mixture mixture(const BeliefVector& b, const std::vector<Gaussian>& c) {
  oracle::Mixture m;
  for (Eigen::Index i = 0; i < b.size(); ++i) m.weights.push_back(b[i]);
  for (const Gaussian& g : c) {
    m.means.push_back(g.mean());
    m.covs.push_back(g.cov());
  }
  return m;
}

TEST(FullyObserved, ZeroGapAnchor) {
  for (double k1 : {0.0, 1.0, 1e4, 17.4e4}) {
    const FullyObservedInfoGain g = info_gain_fully_observed(k1, 0.0, 1.25, BeliefVector::uniform(2));
    EXPECT_NEAR(g.value, kAnchor, 1e-12);
    EXPECT_NEAR(g.bound, kAnchor, 1e-12);
    EXPECT_NEAR(g.value, -0.153426, 1e-6);
  }
}

TEST(FullyObserved, UnitExample) {
  const FullyObservedInfoGain g = info_gain_fully_observed(1.0, 1.0, 1.0, BeliefVector::uniform(2));
  EXPECT_NEAR(g.closed_form, 0.25 + kAnchor, 1e-15);
  EXPECT_NEAR(g.closed_form, 0.096574, 1e-6);
}

TEST(FullyObserved, SaturatedExample) {
  const FullyObservedInfoGain g =
      info_gain_fully_observed(100.0, 0.05, 1.25, BeliefVector::uniform(2));
  EXPECT_NEAR(g.closed_form, 5.0 + kAnchor, 1e-12);
  EXPECT_NEAR(g.closed_form, 4.846574, 1e-6);
  EXPECT_TRUE(g.saturation);
  EXPECT_DOUBLE_EQ(g.saturated, std::log(2.0));
  EXPECT_LE(g.bound, std::log(2.0));
}

TEST(FullyObserved, NonFlatPriorFallsBackToTheBound) {
  const BeliefVector prior(Eigen::Vector2d(0.3, 0.7));
  const FullyObservedInfoGain g = info_gain_fully_observed(1e3, 1e-3, 1.25, prior);
  EXPECT_TRUE(std::isnan(g.closed_form));
  const std::vector<Gaussian> pair = contact_force_pair(1e3, 1e-3, 1.25);
  EXPECT_EQ(g.value, info_gain_lower_bound(prior, pair));
  EXPECT_THROW(info_gain_fully_observed(1.0, 1.0, 1.0, BeliefVector::uniform(3)), ArgumentError);
}

// The closed form keeps only the cross-mode overlap, so it differs from
// the bound on the same two Gaussians by ln((1 + e^x) / 2).
TEST(FullyObserved, ClosedFormMinusBoundIdentity) {
  const BeliefVector flat = BeliefVector::uniform(2);
  int points = 0;
  for (double k1 : {10.0, 1e3, 1.3e4, 17.4e4}) {
    for (double gap : {0.0, 1e-5, 1e-4, 3e-4, 1e-3}) {
      for (double sf : {0.5, 1.25, 4.0, 10.0, 100.0}) {
        const FullyObservedInfoGain g = info_gain_fully_observed(k1, gap, sf, flat);
        const double x = (k1 * gap) * (k1 * gap) / (4.0 * sf);
        if (x > 600.0) continue;
        ++points;
        const double diff = g.closed_form - g.bound;
        EXPECT_NEAR(diff, std::log1p(std::exp(x)) - std::numbers::ln2,
                    1e-12 * std::max(1.0, std::abs(g.closed_form)))
            << "K1=" << k1 << " gap=" << gap << " Sf=" << sf;
        EXPECT_NEAR(g.bound, two_mode_bound(k1 * gap, sf), 1e-12);
      }
    }
  }
  EXPECT_GE(points, 90);
}

TEST(FullyObserved, Monotonicities) {
  const BeliefVector flat = BeliefVector::uniform(2);
  double prev = -INFINITY;
  for (double k1 = 100.0; k1 <= 5e3; k1 += 100.0) {
    const FullyObservedInfoGain g = info_gain_fully_observed(k1, 1e-3, 1.25, flat);
    EXPECT_GT(g.bound, prev);
    prev = g.bound;
  }
  prev = -INFINITY;
  for (double gap = 1e-4; gap <= 5e-3; gap += 1e-4) {
    const double v = info_gain_fully_observed(1e3, gap, 1.25, flat).bound;
    EXPECT_GT(v, prev);
    EXPECT_NEAR(v, info_gain_fully_observed(1e3, -gap, 1.25, flat).bound, 1e-15);
    prev = v;
  }
  prev = INFINITY;
  for (double sf = 0.25; sf <= 10.0; sf += 0.25) {
    const double v = info_gain_fully_observed(1e3, 1e-3, sf, flat).bound;
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(FullyObserved, GapAverageMatchesSimpson) {
  const BeliefVector flat = BeliefVector::uniform(2);
  for (double k1 : {1e3, 5e3, 2e4}) {
    const GapAverage avg = info_gain_gap_average(k1, 1.25, flat);
    const double closed = oracle::simpson(
        [&](double g) { return info_gain_closed_form(k1, g, 1.25); }, 0.0, 0.5e-3, 2000) / 0.5e-3;
    const double bound =
        oracle::simpson([&](double g) { return two_mode_bound(k1 * g, 1.25); }, 0.0, 0.5e-3, 2000) /
        0.5e-3;
    // trapezoid on 101 nodes against Simpson on 2001
    EXPECT_NEAR(avg.value, closed, 1e-4 * std::abs(closed) + 1e-9);
    EXPECT_NEAR(avg.bound, bound, 5e-4 * std::abs(bound) + 1e-9);
  }
  EXPECT_THROW(info_gain_gap_average(1e3, 1.25, flat, 1e-3, 0.0), ArgumentError);
}

TEST(PartiallyObserved, NoProcessNoiseIsTheFullyObservedBound) {
  const BeliefVector flat = BeliefVector::uniform(2);
  for (const NamedModel& nm : magazine_conditions(0.0)) {
    const std::vector<TwoMassModel> bank = free_and_contact(nm.model);
    for (double gap : {0.0, 0.1e-3, 0.2e-3}) {
      const InfoGainReport r = info_gain_partially_observed(bank, gap, flat, 0.002);
      const FullyObservedInfoGain f = info_gain_fully_observed(nm.model.K1, gap, 1.25, flat);
      EXPECT_NEAR(r.lower_bound, f.bound, 1e-12) << nm.name;
    }
  }
  const BeliefVector skew(Eigen::Vector2d(0.2, 0.8));
  const std::vector<TwoMassModel> bank = free_and_contact(flex_joints(0.0).model);
  EXPECT_NEAR(info_gain_partially_observed(bank, 0.1e-3, skew, 0.002).lower_bound,
              info_gain_fully_observed(17.4e4, 0.1e-3, 1.25, skew).value, 1e-12);
}

// Once the modes are many sigma apart the bound sits on its plateau
// ln 2 - (1 - ln 2)/2 whatever the variances are.
const double kSeparatedPlateau = std::numbers::ln2 + kAnchor;

TEST(PartiallyObserved, StrictlyDecreasingInProcessNoise) {
  const BeliefVector flat = BeliefVector::uniform(2);
  int strict = 0;
  for (double gap : {0.05e-3, 0.2e-3}) {
    for (const NamedModel& nm : magazine_conditions()) {
      double prev = INFINITY;
      for (double sw : {0.0, 0.1, 1.0, 10.0}) {
        TwoMassModel m = nm.model;
        m.sigma_w = sw;
        const double v =
            info_gain_partially_observed(free_and_contact(m), gap, flat, 0.002).lower_bound;
        if (std::abs(v - kSeparatedPlateau) < 1e-12) {
          EXPECT_LE(v, prev + 1e-15);
        } else {
          EXPECT_LT(v, prev) << nm.name << " gap=" << gap << " sw=" << sw;
          ++strict;
        }
        prev = v;
      }
    }
  }
  EXPECT_GE(strict, 20);
}

TEST(PartiallyObserved, SeparatedModesSitOnThePlateau) {
  const BeliefVector flat = BeliefVector::uniform(2);
  for (double sw : {0.0, 10.0, 1e3}) {
    const InfoGainReport r = info_gain_partially_observed(
        free_and_contact(flex_joints(sw).model), 0.2e-3, flat, 0.002);
    EXPECT_NEAR(r.lower_bound, kSeparatedPlateau, 1e-12);
  }
}

TEST(PartiallyObserved, NeverAboveFullyObserved) {
  const BeliefVector flat = BeliefVector::uniform(2);
  auto check = [&](double sw, double gap) {
    for (const NamedModel& nm : magazine_conditions(sw)) {
      const InfoGainReport r =
          info_gain_partially_observed(free_and_contact(nm.model), gap, flat, 0.002);
      EXPECT_LE(r.lower_bound, info_gain_fully_observed(nm.model.K1, gap, 1.25, flat).bound + 1e-12)
          << nm.name << " sw=" << sw << " gap=" << gap;
      EXPECT_LE(r.lower_bound, r.prior_entropy);
    }
  };
  for (double sw : {0.1, 1.0, 10.0, 1e3}) {
    for (double gap : {0.05e-3, 0.2e-3, 1e-3}) check(sw, gap);
  }
  for (double sw : {1e7, 2e7}) {
    for (double gap : {0.2e-3, 1e-3}) check(sw, gap);
  }
}

// With the means nearly equal, a variance mismatch is itself evidence, so
// inflating the contact variance can raise the bound.
TEST(PartiallyObserved, VarianceInflationCanRaiseTheBoundAtSmallGaps) {
  const BeliefVector flat = BeliefVector::uniform(2);
  const TwoMassModel m = compliant_surface(1e7).model;
  const InfoGainReport r = info_gain_partially_observed(free_and_contact(m), 0.05e-3, flat, 0.002);
  EXPECT_GT(r.lower_bound, info_gain_fully_observed(m.K1, 0.05e-3, 1.25, flat).bound);
}

TEST(PartiallyObserved, ReportRecordsAssumptions) {
  const std::vector<TwoMassModel> bank = free_and_contact(compliant_feet(1e7).model);
  const InfoGainReport r =
      info_gain_partially_observed(bank, 0.2e-3, BeliefVector::uniform(2), 0.002);
  EXPECT_EQ(r.assumptions.gap, 0.2e-3);
  EXPECT_EQ(r.assumptions.sigma_w, (std::vector<double>{1e7, 1e7}));
  EXPECT_EQ(r.assumptions.sigma_f, (std::vector<double>{1.25, 1.25}));
  EXPECT_EQ(r.assumptions.Ts, 0.0008);
  EXPECT_EQ(r.assumptions.eval_time, 0.002);
  EXPECT_EQ(r.assumptions.prior, (std::vector<double>{0.5, 0.5}));
  ASSERT_EQ(r.per_mode_distributions.size(), 2u);
  EXPECT_EQ(r.per_mode_distributions[0].mean()[0], 0.0);
  EXPECT_FALSE(r.gains[0].has_value());
  ASSERT_TRUE(r.gains[1].has_value());
  EXPECT_GT(r.per_mode_distributions[1].cov()(0, 0), 1.25);
}

TEST(PartiallyObserved, GapFromTrajectory) {
  const std::vector<TwoMassModel> bank = free_and_contact(compliant_feet(1e7).model);
  const GapTrajectory traj{{0.0, 0.004}, {0.0, 0.4e-3}};
  EXPECT_NEAR(traj.at(0.002), 0.2e-3, 1e-18);
  const InfoGainReport a = info_gain_partially_observed(bank, traj, BeliefVector::uniform(2), 0.002);
  const InfoGainReport b = info_gain_partially_observed(bank, 0.2e-3, BeliefVector::uniform(2), 0.002);
  EXPECT_NEAR(a.lower_bound, b.lower_bound, 1e-15);
}

TEST(PartiallyObserved, Errors) {
  const std::vector<TwoMassModel> bank = free_and_contact(compliant_feet(1e7).model);
  const BeliefVector flat = BeliefVector::uniform(2);
  EXPECT_THROW(info_gain_partially_observed(std::vector<TwoMassModel>{}, 0.0,
                                            BeliefVector::uniform(1), 0.002),
               ArgumentError);
  EXPECT_THROW(info_gain_partially_observed(bank, 0.0, BeliefVector::uniform(3), 0.002),
               ArgumentError);
  EXPECT_THROW(info_gain_partially_observed(bank, 0.0, flat, 1e-4), ArgumentError);
  EXPECT_THROW(info_gain_partially_observed(bank, NAN, flat, 0.002), ArgumentError);
  EXPECT_THROW(info_gain_partially_observed(bank, 0.0, flat, 0.002, DareOptions{1e-12, 2}),
               ConvergenceError);
}

TEST(TableOrdering, HoldsOverTheAssumptionGrid) {
  const BeliefVector flat = BeliefVector::uniform(2);
  for (double sw : kMagazineSigmaW) {
    for (double gap : kMagazineGaps) {
      double v[3];
      int i = 0;
      for (const NamedModel& nm : magazine_conditions(sw)) {
        v[i++] = info_gain_partially_observed(free_and_contact(nm.model), gap, flat, 0.002)
                     .lower_bound;
      }
      // flex joints, compliant surface, compliant feet
      EXPECT_GT(v[2], v[0]) << "sw=" << sw << " gap=" << gap;
      EXPECT_GT(v[0], v[1]) << "sw=" << sw << " gap=" << gap;
    }
  }
}

TEST(MonteCarlo, IdenticalComponentsGiveZero) {
  const BeliefVector flat = BeliefVector::uniform(2);
  const std::vector<Gaussian> c{Gaussian::scalar(0, 1), Gaussian::scalar(0, 1)};
  const MonteCarloEstimate e = info_gain_monte_carlo(flat, c, 20'000, 42);
  EXPECT_NEAR(e.estimate, 0.0, 3.0 * e.std_error + 1e-12);
}

TEST(MonteCarlo, FarApartIsFullCertainty) {
  const BeliefVector flat = BeliefVector::uniform(2);
  const std::vector<Gaussian> c{Gaussian::scalar(0, 1), Gaussian::scalar(10, 1)};
  const MonteCarloEstimate e = info_gain_monte_carlo(flat, c, 100'000, 42);
  // the residual posterior entropy at 5 sigma from each mode is ~1e-5
  EXPECT_NEAR(e.estimate, std::log(2.0), 3.0 * e.std_error + 1e-4);
}

TEST(MonteCarlo, BoundHolds) {
  const BeliefVector flat = BeliefVector::uniform(2);
  const std::vector<Gaussian> c{Gaussian::scalar(0, 1), Gaussian::scalar(2, 1)};
  const MonteCarloEstimate e = info_gain_monte_carlo(flat, c, 100'000, 42);
  EXPECT_LE(info_gain_lower_bound(flat, c), e.estimate + 3.0 * e.std_error);
}

TEST(MonteCarlo, AgreesWithIndependentEstimator) {
  const BeliefVector b(Eigen::Vector3d(0.2, 0.3, 0.5));
  const std::vector<Gaussian> c{Gaussian::scalar(0, 1), Gaussian::scalar(1.5, 0.5),
                                Gaussian::scalar(-1, 2)};
  const MonteCarloEstimate e = info_gain_monte_carlo(b, c, 100'000, 3);
  const oracle::Estimate o = oracle::mc_info_gain(mixture(b, c), 100'000, 4);
  EXPECT_NEAR(e.estimate, o.mean, 4.0 * std::hypot(e.std_error, o.std_error));
}

TEST(MonteCarlo, SeedReproducibleAndBlockwise) {
  const BeliefVector flat = BeliefVector::uniform(2);
  const std::vector<Gaussian> c{Gaussian::scalar(0, 1), Gaussian::scalar(2, 1)};
  const MonteCarloEstimate a = info_gain_monte_carlo(flat, c, 10'000, 9);
  const MonteCarloEstimate b = info_gain_monte_carlo(flat, c, 10'000, 9);
  const MonteCarloEstimate d = info_gain_monte_carlo(flat, c, 10'000, 10);
  EXPECT_EQ(a.estimate, b.estimate);
  EXPECT_EQ(a.std_error, b.std_error);
  EXPECT_NE(a.estimate, d.estimate);
  EXPECT_THROW(info_gain_monte_carlo(flat, c, 999, 9), ArgumentError);
}

TEST(MonteCarlo, RandomTwoModeInstancesRespectTheBound) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::normal_distribution<double> normal(0.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const BeliefVector b = BeliefVector::normalized(Eigen::Vector2d(u(rng), u(rng)));
    const std::vector<Gaussian> c{Gaussian::scalar(normal(rng), 0.1 + 2.0 * u(rng)),
                                  Gaussian::scalar(normal(rng), 0.1 + 2.0 * u(rng))};
    const MonteCarloEstimate e = info_gain_monte_carlo(b, c, 10'000, 100 + trial);
    EXPECT_LE(info_gain_lower_bound(b, c), e.estimate + 3.0 * e.std_error) << "trial " << trial;
  }
}

TEST(Surface, MinimumAtEqualComponents) {
  const std::vector<double> mu2 = linspace(-5.0, 5.0, 101);
  const std::vector<double> s2 = linspace(0.025, 3.0, 120);
  const std::vector<SurfacePoint> pts = info_gain_surface(mu2, s2);
  ASSERT_EQ(pts.size(), mu2.size() * s2.size());
  const auto best = std::min_element(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.info_gain < b.info_gain;
  });
  EXPECT_NEAR(best->mu2, 0.0, 1e-12);
  EXPECT_NEAR(best->sigma2, 1.0, 1e-12);
  EXPECT_NEAR(best->info_gain, kAnchor, 1e-12);
}

TEST(Linspace, EndpointsAndErrors) {
  const std::vector<double> v = linspace(1.0, 2.0, 5);
  EXPECT_EQ(v.front(), 1.0);
  EXPECT_EQ(v.back(), 2.0);
  EXPECT_EQ(linspace(3.0, 4.0, 1), std::vector<double>{3.0});
  EXPECT_THROW(linspace(0.0, 1.0, 0), ArgumentError);
}

}  // namespace
}  // namespace contactig
