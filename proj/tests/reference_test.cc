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

#include "onrap/reference.h"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "gtest/gtest.h"
#include "onrap/errors.h"

namespace onrap {
namespace {

// Oracle: solve the 6x6 boundary-value system for one coordinate of
// p(t) = sum c_n t^n with p, p', p'' prescribed at t = 0 and t = 1.
Eigen::VectorXd QuinticCoefficients(double p0, double d0, double a0,
                                    double p1, double d1, double a1) {
  Eigen::Matrix<double, 6, 6> m;
  m << 1, 0, 0, 0, 0, 0,  //
      0, 1, 0, 0, 0, 0,   //
      0, 0, 2, 0, 0, 0,   //
      1, 1, 1, 1, 1, 1,   //
      0, 1, 2, 3, 4, 5,   //
      0, 0, 2, 6, 12, 20;
  Eigen::Matrix<double, 6, 1> rhs;
  rhs << p0, d0, a0, p1, d1, a1;
  return m.fullPivLu().solve(rhs);
}

double Horner(const Eigen::VectorXd& c, double t) {
  double v = 0;
  for (int n = 5; n >= 0; --n) v = v * t + c[n];
  return v;
}

TEST(QuinticHermiteTest, MatchesBoundaryValueOracle) {
  const PoseBoundary start{0, 0, 0.2, 0, 0.05};
  const PoseBoundary goal{9, 1.5, -0.3, 7, -0.02};
  const auto pts = QuinticHermite(start, goal, 101);
  const double s0 = 9.0, s1 = 7.0;
  const auto cx = QuinticCoefficients(
      0, s0 * std::cos(0.2), -std::sin(0.2) * 0.05 * s0 * s0, 9,
      s1 * std::cos(-0.3), -std::sin(-0.3) * -0.02 * s1 * s1);
  const auto cy = QuinticCoefficients(
      0, s0 * std::sin(0.2), std::cos(0.2) * 0.05 * s0 * s0, 1.5,
      s1 * std::sin(-0.3), std::cos(-0.3) * -0.02 * s1 * s1);
  for (int n = 0; n < 101; ++n) {
    const double t = n / 100.0;
    EXPECT_NEAR(pts[n].x, Horner(cx, t), 1e-12);
    EXPECT_NEAR(pts[n].y, Horner(cy, t), 1e-12);
  }
}

TEST(QuinticHermiteTest, EndpointsAndTangents) {
  const PoseBoundary goal{8, -2, -0.4};
  const auto pts = QuinticHermite(PoseBoundary{}, goal, 2001);
  EXPECT_EQ(pts.front().x, 0.0);
  EXPECT_EQ(pts.front().y, 0.0);
  EXPECT_EQ(pts.back().x, 8.0);
  EXPECT_EQ(pts.back().y, -2.0);
  const double h0 = std::atan2(pts[1].y - pts[0].y, pts[1].x - pts[0].x);
  const double h1 = std::atan2(pts[2000].y - pts[1999].y,
                               pts[2000].x - pts[1999].x);
  EXPECT_NEAR(h0, 0.0, 1e-3);
  EXPECT_NEAR(h1, -0.4, 1e-3);
}

TEST(QuinticHermiteTest, CollinearIsStraight) {
  const auto pts = QuinticHermite(PoseBoundary{}, PoseBoundary{10, 0, 0}, 50);
  for (const Point2& p : pts) EXPECT_NEAR(p.y, 0.0, 1e-14);
}

TEST(QuinticHermiteTest, RejectsGoalBehind) {
  EXPECT_THROW(QuinticHermite(PoseBoundary{}, PoseBoundary{0, 1, 0}, 10),
               std::invalid_argument);
  EXPECT_THROW(QuinticHermite(PoseBoundary{}, PoseBoundary{-3, 0, 0}, 10),
               std::invalid_argument);
}

TEST(ResampleTest, LinearInterpolationAndExtrapolation) {
  const std::vector<Point2> curve{{0, 0}, {1, 1}, {3, 1}};
  const ReferencePath ref = ResampleToSteps(curve, 0.5, 8);
  const std::vector<double> expected{0, 0.5, 1, 1, 1, 1, 1, 1, 1};
  ASSERT_EQ(ref.y.size(), expected.size());
  for (std::size_t k = 0; k < expected.size(); ++k) {
    EXPECT_NEAR(ref.y[k], expected[k], 1e-15) << k;
  }
  EXPECT_TRUE(ref.extrapolated);
  EXPECT_DOUBLE_EQ(ref.x(8), 4.0);
}

TEST(ResampleTest, RejectsNonMonotoneCurve) {
  const std::vector<Point2> curve{{0, 0}, {2, 1}, {1, 2}};
  EXPECT_THROW(ResampleToSteps(curve, 0.5, 4), std::invalid_argument);
}

TEST(BuildReferenceTest, StraightGoalGivesZeroReference) {
  const ReferencePath ref = BuildReference(PoseBoundary{10, 0, 0}, 0.5, 20);
  ASSERT_EQ(ref.n_steps(), 20);
  for (double y : ref.y) EXPECT_NEAR(y, 0.0, 1e-14);
  EXPECT_FALSE(ref.extrapolated);
}

TEST(SelectLocalGoalTest, PicksVertexAtLookahead) {
  std::vector<Point2> route;
  for (int i = 0; i <= 60; ++i) route.push_back({0.5 * i, 0.0});
  const LocalGoal g = SelectLocalGoal(route, Pose2{2.1, 0.3, 0.0}, 10.0);
  EXPECT_FALSE(g.end_of_route);
  EXPECT_EQ(g.route_index, 24u);  // closest is 4 (x = 2.0), +20 vertices
  EXPECT_NEAR(g.pose.x, 9.9, 1e-12);
  EXPECT_NEAR(g.pose.y, -0.3, 1e-12);
  EXPECT_NEAR(g.pose.heading, 0.0, 1e-12);
}

TEST(SelectLocalGoalTest, EgoFrameHeading) {
  std::vector<Point2> route;
  for (int i = 0; i <= 60; ++i) route.push_back({0.5 * i, 0.5 * i});
  const double quarter = std::numbers::pi / 4;
  const LocalGoal g = SelectLocalGoal(route, Pose2{0, 0, quarter}, 5.0);
  EXPECT_NEAR(g.pose.heading, 0.0, 1e-12);
  EXPECT_NEAR(g.pose.y, 0.0, 1e-12);
  EXPECT_NEAR(g.pose.x, 0.5 * std::sqrt(2.0) * g.route_index, 1e-12);
}

TEST(SelectLocalGoalTest, EndOfRoute) {
  const std::vector<Point2> route{{0, 0}, {1, 0}, {2, 0}};
  const LocalGoal g = SelectLocalGoal(route, Pose2{}, 10.0);
  EXPECT_TRUE(g.end_of_route);
  EXPECT_EQ(g.route_index, 2u);
}

TEST(ReferenceNoiseTest, BoundedLateralOnly) {
  const ReferencePath ref = BuildReference(PoseBoundary{10, 1, 0.1}, 0.5, 20);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const ReferencePath noisy = InjectReferenceNoise(ref, 0.3, seed);
    ASSERT_EQ(noisy.y.size(), ref.y.size());
    EXPECT_EQ(noisy.ds, ref.ds);
    for (std::size_t k = 0; k < ref.y.size(); ++k) {
      EXPECT_LE(std::abs(noisy.y[k] - ref.y[k]), 0.3);
    }
  }
  EXPECT_EQ(InjectReferenceNoise(ref, 0.3, 5).y,
            InjectReferenceNoise(ref, 0.3, 5).y);
  EXPECT_EQ(InjectReferenceNoise(ref, 0.0, 5).y, ref.y);
}

TEST(RouteIoTest, RoundTripAndErrors) {
  const std::vector<Point2> route{{0, 0}, {0.5, 0.125}, {1.0, -3.75}};
  std::stringstream buf;
  buf << "# route\n";
  WriteRoute(buf, route);
  const auto back = ReadRoute(buf);
  ASSERT_EQ(back.size(), route.size());
  for (std::size_t i = 0; i < route.size(); ++i) {
    EXPECT_EQ(back[i].x, route[i].x);
    EXPECT_EQ(back[i].y, route[i].y);
  }
  std::istringstream bad("0 0\n1 two\n");
  try {
    ReadRoute(bad);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 2);
  }
}

}  // namespace
}  // namespace onrap
