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

#include "onrap/cost.h"

#include <cmath>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "onrap/errors.h"
#include "test_util.h"

namespace onrap {
namespace {

TEST(RiskKernelTest, AnchorValues) {
  // exp(-1 / (2 * 0.7^2)) at one sigma.
  EXPECT_NEAR(RiskKernel(1.5, 0.0, 1.5, 0.7), std::exp(-1.0 / 0.98), 1e-15);
  EXPECT_NEAR(RiskKernel(1.5, 0.0, 1.5, 0.7), 0.35, 0.02);
  EXPECT_LT(RiskKernel(3.0, 0.0, 1.5, 0.7), 0.02);
  EXPECT_EQ(RiskKernel(0.3, 0.3, 1.5, 0.7), 1.0);
}

TEST(RiskKernelTest, SymmetricAndMonotone) {
  double previous = 2.0;
  for (int i = 0; i <= 100; ++i) {
    const double d = 0.05 * i;
    const double v = RiskKernel(d, 0.0, 1.5, 2.0 / 3.0);
    EXPECT_EQ(v, RiskKernel(-d, 0.0, 1.5, 2.0 / 3.0));
    EXPECT_LT(v, previous);
    previous = v;
  }
}

TEST(CalibrationTest, LambdaBound) {
  const double bound = LambdaGridLowerBound(1.5, 2.0 / 3.0);
  EXPECT_NEAR(bound, 2.25 * std::exp(9.0 / 8.0), 1e-12);
  EXPECT_NEAR(bound, 6.93, 0.005);
  EXPECT_GT(100.0, bound);
}

TEST(CalibrationTest, DominanceSweep) {
  const double sigma = 1.5, tau = 2.0 / 3.0;
  const double lambda = LambdaGridLowerBound(sigma, tau);
  int violations = 0;
  for (int i = 0; i <= 1000; ++i) {
    const double y = sigma * i / 1000.0;
    if (lambda * RiskKernel(y, 0.0, sigma, tau) < y * y - 1e-12) ++violations;
  }
  EXPECT_EQ(violations, 0);
  // The bound is tight at y = sigma.
  EXPECT_NEAR(lambda * RiskKernel(sigma, 0.0, sigma, tau), sigma * sigma,
              1e-12);
  EXPECT_NEAR(ImpliedMaxDeviation(100.0, 1.0), 10.0, 1e-15);
}

TEST(ArcBoundTest, MatchesClosedFormAndStaysBelowArcLength) {
  const double delta = 0.6, wheelbase = 2.0;
  const double r = wheelbase / std::tan(delta);
  EXPECT_NEAR(TurningRadius(delta, wheelbase), r, 1e-15);
  for (double s : {0.0, 0.1, 1.0, 5.0, 10.0}) {
    EXPECT_NEAR(MaxLateralDeviation(s, delta, wheelbase),
                r * (1 - std::cos(s / r)), 1e-12);
  }
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dist(0.0, 10 * r);
  int violations = 0;
  for (int i = 0; i < 10000; ++i) {
    const double s = dist(rng);
    if (MaxLateralDeviation(s, delta, wheelbase) > s) ++violations;
  }
  EXPECT_EQ(violations, 0);
  EXPECT_THROW(TurningRadius(0.0, 2.0), std::invalid_argument);
}

TEST(RiskFieldTest, ColumnsMapToNearestStep) {
  GridSpec spec;  // 0.25 m cells, ds 0.5: two or three columns per step
  EgoGrid grid(spec);
  grid.set(spec.ego_row, spec.ego_col + 4, 1.0);      // x = 1.0 -> k = 2
  grid.set(spec.ego_row - 2, spec.ego_col + 5, 1.0);  // x = 1.25 -> k = 3
  grid.set(spec.ego_row + 1, spec.ego_col + 6, 0.4);  // below threshold
  const RiskField field = RiskField::FromGrid(grid, 0.5, 20);
  ASSERT_EQ(field.n_steps(), 20);
  EXPECT_EQ(field.occupied_y(2), std::vector<double>{0.0});
  EXPECT_EQ(field.occupied_y(3), std::vector<double>{0.5});
  int total = 0;
  for (int k = 0; k <= 20; ++k) total += field.occupied_y(k).size();
  EXPECT_EQ(total, 2);
}

TEST(RiskFieldTest, BruteForceOracle) {
  std::mt19937_64 rng(17);
  const GridSpec spec;
  const EgoGrid grid = testing_util::RandomGrid(spec, 0.05, rng);
  std::vector<double> y(21);
  std::uniform_real_distribution<double> lat(-2.0, 2.0);
  for (double& v : y) v = lat(rng);
  const RiskParams params;
  double expected = 0.0;
  for (int i = 0; i < spec.n_rows; ++i) {
    for (int j = 0; j < spec.n_cols; ++j) {
      if (grid.at(i, j) < 0.5) continue;
      const double x = spec.ColX(j);
      const int k = static_cast<int>(std::floor(x / 0.5 + 0.5));
      if (k < 0 || k > 20) continue;
      const double d = y[k] - spec.RowY(i);
      expected += std::pow(0.95, k) * std::exp(-d * d / (2 * 1.0));
    }
  }
  EXPECT_NEAR(GridRisk(y, grid, 0.5, params), expected, 1e-10);
}

TEST(RiskFieldTest, RejectsShortGrid) {
  GridSpec spec;
  spec.n_cols = 20;
  EXPECT_THROW(RiskField::FromGrid(EgoGrid(spec), 0.5, 20),
               std::invalid_argument);
}

TEST(ObjectiveTest, HandComputedCost) {
  ObjectiveProblem p;
  p.reference.ds = 0.5;
  p.reference.y = {0.0, 0.1, 0.2};
  p.risk_field = RiskField::FromGrid(EgoGrid(GridSpec{}), 0.5, 2);
  const std::vector<double> u{0.1, -0.05};
  const auto eval = EvaluateObjective(p, u);
  const auto states = Rollout({}, u, 0.5, VehicleGeometry{});
  double dev = 0;
  for (int k = 0; k <= 2; ++k) dev += std::pow(states[k].y - p.reference.y[k], 2);
  EXPECT_NEAR(eval.cost.deviation, dev, 1e-15);
  EXPECT_NEAR(eval.cost.effort, 0.01 + 0.0025, 1e-15);
  EXPECT_NEAR(eval.cost.curvature,
              10 * (std::pow(std::tan(0.1), 2) + std::pow(std::tan(0.05), 2)),
              1e-14);
  EXPECT_EQ(eval.cost.risk, 0.0);
}

TEST(ObjectiveTest, DomainErrorCarriesStep) {
  ObjectiveProblem p;
  p.reference.y.assign(21, 0.0);
  p.risk_field = RiskField::FromGrid(EgoGrid(GridSpec{}), 0.5, 20);
  std::vector<double> u(20, 0.0);
  u[3] = 1.6;
  try {
    EvaluateObjective(p, u);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_EQ(e.step_index(), 3u);
  }
}

TEST(ObjectiveGradientPropertyTest, MatchesCentralDifferences) {
  std::mt19937_64 rng(2024);
  int checked = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const ObjectiveProblem p = testing_util::RandomProblem(rng);
    const std::vector<double> u = testing_util::RandomFeasibleControls(p, rng);
    const auto eval = EvaluateObjective(p, u);
    const std::vector<double> fd = testing_util::CentralDifference(p, u);
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double err = testing_util::RelativeError(eval.gradient[i], fd[i]);
      worst = std::max(worst, err);
      EXPECT_LT(err, 1e-5) << "trial " << trial << " component " << i;
    }
    ++checked;
  }
  EXPECT_EQ(checked, 100);
  RecordProperty("worst_relative_error", std::to_string(worst));
}

}  // namespace
}  // namespace onrap
