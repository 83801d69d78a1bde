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

#ifndef CONTACTIG_RANDOM_HPP_
#define CONTACTIG_RANDOM_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <random>

#include "contactig/gaussian.hpp"

namespace contactig {

inline constexpr std::uint64_t kDefaultSeed = 42;

// Monte Carlo work is chunked into fixed-size blocks, each with its own
// engine seeded from (seed, block). Sample i always comes from the same
// stream position no matter how blocks are scheduled.
inline constexpr std::size_t kSampleBlock = 4096;

inline std::mt19937_64 block_engine(std::uint64_t seed, std::uint64_t block) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(block),
                    static_cast<std::uint32_t>(block >> 32), 0x636f6e74u};
  return std::mt19937_64(seq);
}

inline Eigen::VectorXd standard_normal(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = normal(rng);
  return z;
}

inline Eigen::VectorXd sample(const Gaussian& g, std::mt19937_64& rng) {
  return g.mean() + g.cholesky_l() * standard_normal(rng, g.dim());
}

inline Eigen::Index sample_index(const BeliefVector& b, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double u = uniform(rng);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    acc += b[i];
    if (u < acc) return i;
  }
  return b.size() - 1;
}

}  // namespace contactig

#endif  // CONTACTIG_RANDOM_HPP_
