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

#include "onrap/occupancy.h"

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "gtest/gtest.h"
#include "onrap/errors.h"
#include "onrap/grid_io.h"

namespace onrap {
namespace {

TEST(GridSpecTest, DefaultCoversHorizon) {
  const GridSpec spec;
  EXPECT_NO_THROW(spec.ValidateCovers(10.0));
  EXPECT_DOUBLE_EQ(spec.ColX(spec.ego_col), 0.0);
  EXPECT_DOUBLE_EQ(spec.RowY(spec.ego_row), 0.0);
  EXPECT_DOUBLE_EQ(spec.ColX(48), 10.0);
  EXPECT_THROW(spec.ValidateCovers(12.5), std::invalid_argument);
}

TEST(GridSpecTest, RejectsBadSpecs) {
  GridSpec spec;
  spec.cell_size = 0;
  EXPECT_THROW(spec.Validate(), std::invalid_argument);
  spec = GridSpec{};
  spec.ego_row = 49;
  EXPECT_THROW(spec.Validate(), std::invalid_argument);
}

TEST(EgoGridTest, RowCoordinatesStrictlyDecrease) {
  const EgoGrid grid{GridSpec{}};
  const auto& ys = grid.row_lateral_coords();
  ASSERT_EQ(ys.size(), 49u);
  for (std::size_t i = 1; i < ys.size(); ++i) EXPECT_LT(ys[i], ys[i - 1]);
  EXPECT_DOUBLE_EQ(ys.front(), 6.0);
  EXPECT_DOUBLE_EQ(ys.back(), -6.0);
}

TEST(EgoGridTest, SetClamps) {
  EgoGrid grid{GridSpec{}};
  grid.set(0, 0, 1.7);
  grid.set(0, 1, -0.2);
  EXPECT_EQ(grid.at(0, 0), 1.0);
  EXPECT_EQ(grid.at(0, 1), 0.0);
}

TEST(ProjectToEgoTest, EmptySceneGivesEmptyGrid) {
  const EgoGrid grid = ProjectToEgo(WorldScene{}, Pose2{}, GridSpec{});
  EXPECT_EQ(grid.CountOccupied(), 0);
}

TEST(ProjectToEgoTest, SinglePointLandsInHandComputedCell) {
  // 2 m ahead and 1 m left at 0.25 m cells: 8 columns right of the ego
  // column and 4 rows above the ego row.
  WorldScene scene;
  scene.points.push_back({2.0, 1.0});
  const EgoGrid grid = ProjectToEgo(scene, Pose2{}, GridSpec{});
  EXPECT_EQ(grid.CountOccupied(), 1);
  EXPECT_EQ(grid.at(20, 16), 1.0);
}

TEST(ProjectToEgoTest, RotatedPose) {
  // Ego at (5, 5) facing +y: a world point at (4, 7) is 2 m ahead, 1 m left.
  WorldScene scene;
  scene.points.push_back({4.0, 7.0});
  const EgoGrid grid =
      ProjectToEgo(scene, Pose2{5, 5, std::acos(-1.0) / 2}, GridSpec{});
  EXPECT_EQ(grid.at(20, 16), 1.0);
}

TEST(ProjectToEgoTest, OutsideFootprintIsDropped) {
  WorldScene scene;
  scene.points.push_back({-5.0, 0.0});
  scene.points.push_back({30.0, 0.0});
  EXPECT_EQ(ProjectToEgo(scene, Pose2{}, GridSpec{}).CountOccupied(), 0);
}

TEST(ProjectToEgoTest, BoxCoversItsCells) {
  WorldScene scene;
  scene.boxes.push_back({1.0, -0.5, 2.0, 0.5});
  const GridSpec spec;
  const EgoGrid grid = ProjectToEgo(scene, Pose2{}, spec);
  for (int i = 0; i < spec.n_rows; ++i) {
    for (int j = 0; j < spec.n_cols; ++j) {
      const double x = spec.ColX(j), y = spec.RowY(i);
      const bool inside = x >= 1.0 && x <= 2.0 && y >= -0.5 && y <= 0.5;
      if (inside) EXPECT_EQ(grid.at(i, j), 1.0) << i << "," << j;
      const bool far = x < 0.8 || x > 2.2 || y < -0.7 || y > 0.7;
      if (far) EXPECT_EQ(grid.at(i, j), 0.0) << i << "," << j;
    }
  }
}

TEST(ProjectToEgoTest, NoiseStaysBounded) {
  const GridSpec spec;
  const Point2 truth{3.1, -0.7};
  WorldScene scene;
  scene.points.push_back(truth);
  const double bound = 0.3 + spec.cell_size / std::sqrt(2.0);
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    std::mt19937_64 rng(seed);
    const EgoGrid grid = ProjectToEgo(scene, Pose2{}, spec, 0.3, rng);
    ASSERT_EQ(grid.CountOccupied(), 1);
    for (int i = 0; i < spec.n_rows; ++i) {
      for (int j = 0; j < spec.n_cols; ++j) {
        if (!grid.Occupied(i, j)) continue;
        EXPECT_LE(std::hypot(spec.ColX(j) - truth.x, spec.RowY(i) - truth.y),
                  bound + 1e-12);
      }
    }
  }
}

TEST(ProjectToEgoTest, DeterministicPerSeed) {
  WorldScene scene;
  for (int k = 0; k < 30; ++k) scene.points.push_back({0.3 * k, 0.1 * k - 1});
  std::mt19937_64 a(42), b(42);
  EXPECT_EQ(ProjectToEgo(scene, Pose2{}, GridSpec{}, 0.3, a),
            ProjectToEgo(scene, Pose2{}, GridSpec{}, 0.3, b));
}

TEST(WorldSceneTest, ClearanceAndAgents) {
  WorldScene scene;
  EXPECT_TRUE(std::isinf(scene.Clearance({0, 0})));
  scene.points.push_back({3, 4});
  scene.boxes.push_back({10, 10, 11, 11});
  scene.agents.push_back({{0, 2}, {1, 0}});
  EXPECT_DOUBLE_EQ(scene.Clearance({0, 0}), 2.0);
  scene.AdvanceAgents(2.0);
  EXPECT_DOUBLE_EQ(scene.agents[0].position.x, 2.0);
  EXPECT_DOUBLE_EQ(scene.Clearance({10.5, 9}), 1.0);
}

// ---------------------------------------------------------------------------
// Flow.

GridSpec SmallSpec() {
  GridSpec spec;
  spec.n_rows = 9;
  spec.n_cols = 40;
  spec.ego_row = 4;
  spec.ego_col = 0;
  return spec;
}

TEST(FlowMeasureTest, StaticGridMeasuresZero) {
  EgoGrid g(SmallSpec());
  g.set(3, 5, 1.0);
  g.set(4, 6, 1.0);
  const FlowField flow(g.rows(), g.cols(), FlowParams{});
  const FlowMeasurement z = FlowMeasure(g, g, flow);
  int valid = 0;
  for (std::size_t o = 0; o < z.valid.size(); ++o) {
    if (!z.valid[o]) continue;
    ++valid;
    EXPECT_EQ(z.z_x[o], 0.0);
    EXPECT_EQ(z.z_y[o], 0.0);
  }
  EXPECT_EQ(valid, 2);
}

TEST(FlowMeasureTest, OneColumnShift) {
  EgoGrid prev(SmallSpec()), curr(SmallSpec());
  prev.set(4, 10, 1.0);
  curr.set(4, 11, 1.0);
  const FlowField flow(prev.rows(), prev.cols(), FlowParams{});
  const FlowMeasurement z = FlowMeasure(prev, curr, flow);
  const std::size_t o = flow.Offset(4, 10);
  ASSERT_TRUE(z.valid[o]);
  EXPECT_EQ(z.z_x[o], 1.0);
  EXPECT_EQ(z.z_y[o], 0.0);
}

TEST(FlowMeasureTest, EdgeLandingIsClamped) {
  EgoGrid prev(SmallSpec()), curr(SmallSpec());
  prev.set(0, 39, 1.0);
  curr.set(0, 39, 1.0);
  FlowField flow(prev.rows(), prev.cols(), FlowParams{});
  flow.v_x[flow.Offset(0, 39)] = 3.0;
  flow.v_y[flow.Offset(0, 39)] = -3.0;
  const FlowMeasurement z = FlowMeasure(prev, curr, flow);
  EXPECT_EQ(z.z_x[flow.Offset(0, 39)], 0.0);
  EXPECT_EQ(z.z_y[flow.Offset(0, 39)], 0.0);
}

TEST(FlowUpdateTest, FixedPointShrinksVariance) {
  EgoGrid g(SmallSpec());
  g.set(2, 2, 1.0);
  FlowField flow(g.rows(), g.cols(), FlowParams{});
  const std::size_t o = flow.Offset(2, 2);
  const FlowMeasurement z = FlowMeasure(g, g, flow);
  const FlowField next = FlowUpdate(flow, z);
  EXPECT_EQ(next.v_x[o], 0.0);
  EXPECT_LT(next.p_x[o], flow.p_x[o]);
}

TEST(FlowUpdateTest, ScalarConvergenceOracle) {
  // Independent scalar Kalman recursion for z = 1 at every frame.
  const FlowParams fp;
  double v = 0.0, p = fp.initial_variance;
  FlowField flow(1, 1, fp);
  FlowMeasurement z{1, 1, {1}, {1.0}, {0.0}};
  for (int t = 0; t < 20; ++t) {
    p += fp.q;
    const double k = p / (p + fp.r);
    v += k * (1.0 - v);
    p *= 1.0 - k;
    flow = FlowUpdate(flow, z);
    EXPECT_NEAR(flow.v_x[0], v, 1e-15);
    EXPECT_NEAR(flow.p_x[0], std::max(p, fp.p_floor), 1e-15);
  }
  EXPECT_LT(std::abs(flow.v_x[0] - 1.0), 0.5);
}

TEST(FlowUpdateTest, ClipsToVmax) {
  FlowField flow(1, 1, FlowParams{});
  for (int t = 0; t < 200; ++t) {
    flow = FlowUpdate(flow, FlowMeasurement{1, 1, {1}, {30.0}, {-30.0}});
    EXPECT_LE(flow.v_x[0], flow.params.v_max);
    EXPECT_GE(flow.v_y[0], -flow.params.v_max);
  }
  EXPECT_EQ(flow.v_x[0], flow.params.v_max);
}

TEST(FlowSmoothTest, WindowOneIsIdentityAndMeanOfTwo) {
  FlowField a(1, 2, FlowParams{}), b(1, 2, FlowParams{});
  b.v_x = {2.0, -1.0};
  b.p_x = {0.3, 0.4};
  const std::vector<FlowField> hist{a, b};
  const FlowField one = FlowSmooth(hist, 1);
  EXPECT_EQ(one.v_x, b.v_x);
  const FlowField two = FlowSmooth(hist, 2);
  EXPECT_DOUBLE_EQ(two.v_x[0], 1.0);
  EXPECT_DOUBLE_EQ(two.v_x[1], -0.5);
  EXPECT_EQ(two.p_x, b.p_x);
}

TEST(FlowSmoothTest, ReducesAlternatingNoise) {
  const double base = 1.2;
  std::vector<FlowField> hist;
  double raw_se = 0, smooth_se = 0;
  for (int t = 0; t < 100; ++t) {
    FlowField f(1, 1, FlowParams{});
    f.v_x[0] = base + (t % 2 ? 1.0 : -1.0);
    hist.push_back(f);
    const FlowField s = FlowSmooth(hist, 4);
    raw_se += std::pow(f.v_x[0] - base, 2);
    smooth_se += std::pow(s.v_x[0] - base, 2);
  }
  EXPECT_LT(smooth_se, raw_se);
}

TEST(PredictOccupancyTest, ZeroFlowIsIdentity) {
  EgoGrid g(SmallSpec());
  g.set(1, 1, 0.9);
  g.set(2, 7, 0.3);
  const FlowField flow(g.rows(), g.cols(), FlowParams{});
  EXPECT_EQ(PredictOccupancy(g, flow, 5.0), g);
}

TEST(PredictOccupancyTest, MovesAndClamps) {
  EgoGrid g(SmallSpec());
  g.set(4, 10, 1.0);
  g.set(4, 38, 1.0);
  FlowField flow(g.rows(), g.cols(), FlowParams{});
  flow.v_x[flow.Offset(4, 10)] = 1.0;
  flow.v_x[flow.Offset(4, 38)] = 1.0;
  const EgoGrid out = PredictOccupancy(g, flow, 3.0);
  EXPECT_EQ(out.at(4, 13), 1.0);
  EXPECT_EQ(out.at(4, 39), 1.0);
  EXPECT_EQ(out.CountOccupied(), 2);
}

TEST(FlowPropertyTest, RandomSequencesStayBoundedAndConserveOccupancy) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> occ(0.0, 1.0);
  const GridSpec spec = SmallSpec();
  FlowField flow(spec.n_rows, spec.n_cols, FlowParams{});
  EgoGrid prev(spec);
  for (int t = 0; t < 50; ++t) {
    EgoGrid curr(spec);
    for (int i = 0; i < spec.n_rows; ++i) {
      for (int j = 0; j < spec.n_cols; ++j) {
        const double v = occ(rng);
        curr.set(i, j, v > 0.8 ? v : 0.0);
      }
    }
    flow = FlowUpdate(flow, FlowMeasure(prev, curr, flow));
    for (std::size_t o = 0; o < flow.v_x.size(); ++o) {
      ASSERT_LE(std::abs(flow.v_x[o]), flow.params.v_max);
      ASSERT_LE(std::abs(flow.v_y[o]), flow.params.v_max);
      ASSERT_GE(flow.p_x[o], flow.params.p_floor);
      ASSERT_GE(flow.p_y[o], flow.params.p_floor);
    }
    EXPECT_LE(PredictOccupancy(curr, flow, 2.5).CountOccupied(),
              curr.CountOccupied());
    prev = curr;
  }
}

TEST(FlowPropertyTest, StaticSceneDecaysMonotonically) {
  EgoGrid g(SmallSpec());
  g.set(4, 4, 1.0);
  g.set(2, 20, 1.0);
  FlowField flow(g.rows(), g.cols(), FlowParams{});
  for (std::size_t o = 0; o < flow.v_x.size(); ++o) {
    flow.v_x[o] = 0.8;
    flow.v_y[o] = -0.6;
  }
  double previous = 1e9;
  for (int t = 0; t < 20; ++t) {
    flow = FlowUpdate(flow, FlowMeasure(g, g, flow));
    const double mean = (std::abs(flow.v_x[flow.Offset(4, 4)]) +
                         std::abs(flow.v_x[flow.Offset(2, 20)])) / 2;
    EXPECT_LE(mean, previous);
    previous = mean;
  }
}

// ---------------------------------------------------------------------------
// Snapshot files.

TEST(GridSnapshotTest, RoundTrip) {
  GridSpec spec = SmallSpec();
  spec.cell_size = 0.1;
  EgoGrid g(spec);
  g.set(0, 0, 1.0);
  g.set(3, 7, 0.123456789);
  std::stringstream buf;
  WriteGridSnapshot(buf, g);
  EXPECT_EQ(ReadGridSnapshot(buf), g);
}

TEST(GridSnapshotTest, CommentsAndErrors) {
  std::istringstream ok("# header next\n2 2 0.5 0 0\n0 1\n# mid\n0.5 0\n");
  const EgoGrid g = ReadGridSnapshot(ok);
  EXPECT_EQ(g.at(0, 1), 1.0);
  EXPECT_EQ(g.at(1, 0), 0.5);

  std::istringstream short_rows("2 2 0.5 0 0\n0 1\n");
  EXPECT_THROW(ReadGridSnapshot(short_rows), ConfigError);
  std::istringstream bad_value("1 2 0.5 0 0\n0 1.5\n");
  try {
    ReadGridSnapshot(bad_value);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 2);
  }
}

}  // namespace
}  // namespace onrap
