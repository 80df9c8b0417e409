// Copyright 2026 The ONRAP Authors
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

// Shared generators and oracles for the C++ tests.

#ifndef ONRAP_TESTS_TEST_UTIL_H_
#define ONRAP_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "onrap/cost.h"
#include "onrap/errors.h"
#include "onrap/occupancy.h"
#include "onrap/reference.h"

namespace onrap::testing_util {

inline EgoGrid RandomGrid(const GridSpec& spec, double density,
                          std::mt19937_64& rng) {
  std::bernoulli_distribution hit(density);
  std::uniform_real_distribution<double> occ(0.5, 1.0);
  EgoGrid grid(spec);
  for (int i = 0; i < spec.n_rows; ++i) {
    for (int j = 0; j < spec.n_cols; ++j) {
      if (hit(rng)) grid.set(i, j, occ(rng));
    }
  }
  return grid;
}

// N = 20, default weights, random grid and a random (noisy) reference.
inline ObjectiveProblem RandomProblem(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ObjectiveProblem p;
  p.ds = 0.5;
  const PoseBoundary goal{8.0 + 4.0 * unit(rng), -3.0 + 6.0 * unit(rng),
                          -0.5 + unit(rng)};
  p.reference = InjectReferenceNoise(BuildReference(goal, 0.5, 20), 0.3, rng);
  p.risk_field = RiskField::FromGrid(
      RandomGrid(GridSpec{}, 0.02 + 0.08 * unit(rng), rng), 0.5, 20);
  return p;
}

inline std::vector<double> RandomFeasibleControls(const ObjectiveProblem& p,
                                                  std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-0.3, 0.3);
  for (;;) {
    std::vector<double> u(p.n_steps());
    for (double& v : u) v = dist(rng);
    try {
      const auto states = Rollout(p.initial, u, p.ds, p.geometry);
      bool interior = true;
      for (std::size_t k = 0; k < u.size(); ++k) {
        interior = interior && std::abs(states[k].heading + u[k]) < 1.2;
      }
      if (interior) return u;
    } catch (const DomainError&) {
    }
  }
}

inline std::vector<double> CentralDifference(const ObjectiveProblem& p,
                                             const std::vector<double>& u,
                                             double h = 1e-6) {
  std::vector<double> grad(u.size());
  std::vector<double> probe = u;
  for (std::size_t i = 0; i < u.size(); ++i) {
    probe[i] = u[i] + h;
    const double up = EvaluateObjective(p, probe, false).cost.total();
    probe[i] = u[i] - h;
    const double down = EvaluateObjective(p, probe, false).cost.total();
    probe[i] = u[i];
    grad[i] = (up - down) / (2 * h);
  }
  return grad;
}

// |a - b| / max(1, |a|, |b|).
inline double RelativeError(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace onrap::testing_util

#endif  // ONRAP_TESTS_TEST_UTIL_H_
