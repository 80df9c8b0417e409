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

#include "onrap/baselines.h"

#include <cmath>
#include <limits>
#include <queue>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "test_util.h"

namespace onrap {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

GridSpec SquareSpec(int n) {
  GridSpec spec;
  spec.n_rows = n;
  spec.n_cols = n;
  spec.ego_row = n / 2;
  spec.ego_col = 0;
  return spec;
}

// Oracle: plain Dijkstra over the same move set, with inflation computed
// independently by brute force over occupied centers.
double DijkstraCost(const EgoGrid& grid, CellIndex start, CellIndex goal,
                    double radius) {
  const GridSpec& s = grid.spec();
  std::vector<Point2> occ;
  for (int i = 0; i < s.n_rows; ++i) {
    for (int j = 0; j < s.n_cols; ++j) {
      if (grid.at(i, j) >= 0.5) occ.push_back({s.ColX(j), s.RowY(i)});
    }
  }
  auto blocked = [&](int i, int j) {
    if (i == start.row && j == start.col) return false;
    for (const Point2& o : occ) {
      if (std::hypot(s.ColX(j) - o.x, s.RowY(i) - o.y) <= radius) return true;
    }
    return false;
  };
  auto ok = [&](int i, int j) { return s.Contains(i, j) && !blocked(i, j); };
  std::vector<double> dist(s.n_rows * s.n_cols, kInf);
  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pq;
  dist[start.row * s.n_cols + start.col] = 0;
  pq.push({0, start.row * s.n_cols + start.col});
  while (!pq.empty()) {
    auto [d, c] = pq.top();
    pq.pop();
    if (d > dist[c]) continue;
    const int i = c / s.n_cols, j = c % s.n_cols;
    for (int di = -1; di <= 1; ++di) {
      for (int dj = -1; dj <= 1; ++dj) {
        if ((di == 0 && dj == 0) || !ok(i + di, j + dj)) continue;
        if (di && dj && (!ok(i + di, j) || !ok(i, j + dj))) continue;
        const double nd =
            d + s.cell_size * ((di && dj) ? std::sqrt(2.0) : 1.0);
        const int n = (i + di) * s.n_cols + j + dj;
        if (nd < dist[n]) {
          dist[n] = nd;
          pq.push({nd, n});
        }
      }
    }
  }
  return dist[goal.row * s.n_cols + goal.col];
}

TEST(ValidateGoalTest, EmptyGridKeepsGoal) {
  const EgoGrid grid{GridSpec{}};
  const Point2 g = ValidateGoal(grid, {7.3, 1.1}, 0.75);
  EXPECT_EQ(g.x, 7.3);
  EXPECT_EQ(g.y, 1.1);
}

TEST(ValidateGoalTest, MovesOutOfObstacleMinimally) {
  const GridSpec spec;
  EgoGrid grid(spec);
  for (int i = 20; i <= 28; ++i) {
    for (int j = 44; j <= 46; ++j) grid.set(i, j, 1.0);
  }
  const Point2 goal{spec.ColX(45), spec.RowY(24)};
  const double clearance = 0.75;
  const Point2 g = ValidateGoal(grid, goal, clearance);
  const auto occ = OccupiedCenters(grid);
  EXPECT_GE(ClearanceToOccupied(occ, g), clearance);
  // Exhaustive check: no qualifying cell center is strictly closer.
  const double d = std::hypot(g.x - goal.x, g.y - goal.y);
  for (int i = 0; i < spec.n_rows; ++i) {
    for (int j = 0; j < spec.n_cols; ++j) {
      const Point2 c{spec.ColX(j), spec.RowY(i)};
      if (ClearanceToOccupied(occ, c) >= clearance) {
        EXPECT_GE(std::hypot(c.x - goal.x, c.y - goal.y), d - 1e-12);
      }
    }
  }
}

TEST(ValidateGoalTest, FullyOccupiedThrows) {
  EgoGrid grid(SquareSpec(10));
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) grid.set(i, j, 1.0);
  }
  EXPECT_THROW(ValidateGoal(grid, {1, 0}, 0.5), GoalValidationError);
}

TEST(AStarTest, EmptyGridStraightLine) {
  const GridSpec spec = SquareSpec(21);
  const EgoGrid grid(spec);
  const BaselinePath p = AStarPlan(grid, {0, 0}, {4, 0});
  ASSERT_EQ(p.status, BaselineStatus::kSuccess);
  EXPECT_NEAR(p.cost, 4.0, 1e-12);
  ASSERT_EQ(p.points.size(), 17u);
  for (const Point2& q : p.points) EXPECT_EQ(q.y, 0.0);
}

TEST(AStarTest, WallWithGapMatchesDijkstra) {
  const GridSpec spec = SquareSpec(41);
  EgoGrid grid(spec);
  for (int i = 0; i < 41; ++i) {
    if (i < 30 || i > 35) grid.set(i, 20, 1.0);
  }
  const BaselinePath p = AStarPlan(grid, {0, 0}, {9, 0});
  ASSERT_EQ(p.status, BaselineStatus::kSuccess);
  const double oracle = DijkstraCost(grid, {20, 0}, {20, 36}, 0.5);
  EXPECT_NEAR(p.cost, oracle, 1e-12);
  // The only crossing is through the gap rows.
  bool crossed = false;
  for (const Point2& q : p.points) {
    if (std::abs(q.x - spec.ColX(20)) < 1e-9) {
      crossed = true;
      const auto cell = spec.CellAt(q.x, q.y);
      EXPECT_GE(cell->row, 30);
      EXPECT_LE(cell->row, 35);
    }
  }
  EXPECT_TRUE(crossed);
  EXPECT_TRUE(PathAvoidsInflated(grid, p.points, 0.5));
}

TEST(AStarTest, RandomGridsMatchDijkstra) {
  std::mt19937_64 rng(12);
  const GridSpec spec = SquareSpec(50);
  for (int trial = 0; trial < 30; ++trial) {
    EgoGrid grid = testing_util::RandomGrid(spec, 0.03, rng);
    // Keep the goal cell itself clear of inflation.
    for (int i = 21; i <= 29; ++i) {
      for (int j = 41; j <= 49; ++j) grid.set(i, j, 0.0);
    }
    const BaselinePath p = AStarPlan(grid, {0, 0}, {spec.ColX(45), 0});
    const double oracle = DijkstraCost(grid, {25, 0}, {25, 45}, 0.5);
    if (oracle == kInf) {
      EXPECT_EQ(p.status, BaselineStatus::kNoPath);
      continue;
    }
    ASSERT_EQ(p.status, BaselineStatus::kSuccess);
    EXPECT_NEAR(p.cost, oracle, 1e-9);
    EXPECT_TRUE(PathAvoidsInflated(grid, p.points, 0.5));
  }
}

TEST(AStarTest, EnclosedGoalFails) {
  const GridSpec spec = SquareSpec(41);
  EgoGrid grid(spec);
  for (int i = 10; i <= 30; ++i) {
    grid.set(i, 25, 1.0);
    grid.set(i, 35, 1.0);
  }
  for (int j = 25; j <= 35; ++j) {
    grid.set(10, j, 1.0);
    grid.set(30, j, 1.0);
  }
  const BaselinePath p = AStarPlan(grid, {0, 0}, {spec.ColX(30), 0});
  EXPECT_EQ(p.status, BaselineStatus::kNoPath);
}

TEST(AStarTest, BlockedGoal) {
  EgoGrid grid(SquareSpec(21));
  grid.set(10, 10, 1.0);
  EXPECT_EQ(AStarPlan(grid, {0, 0}, {2.5, 0}).status,
            BaselineStatus::kGoalBlocked);
}

TEST(RrtStarTest, EmptyGridNearStraight) {
  const GridSpec spec;
  const EgoGrid grid(spec);
  RrtStarOptions opts;
  opts.iterations = 5000;
  opts.rewire_radius = 2.0;
  double worst = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    opts.seed = seed;
    const BaselinePath p = RrtStarPlan(grid, {0, 0}, {10, 0}, opts);
    ASSERT_EQ(p.status, BaselineStatus::kSuccess) << seed;
    worst = std::max(worst, p.cost / 10.0 - 1.0);
    EXPECT_EQ(p.points.front().x, 0.0);
    EXPECT_EQ(p.points.back().x, 10.0);
  }
  EXPECT_LT(worst, 0.10);
}

TEST(RrtStarTest, DeterministicPerSeed) {
  std::mt19937_64 rng(4);
  const EgoGrid grid = testing_util::RandomGrid(GridSpec{}, 0.02, rng);
  RrtStarOptions opts;
  opts.seed = 77;
  const Point2 goal = ValidateGoal(grid, {9, 0}, 0.75);
  const BaselinePath a = RrtStarPlan(grid, {0, 0}, goal, opts);
  const BaselinePath b = RrtStarPlan(grid, {0, 0}, goal, opts);
  ASSERT_EQ(a.points.size(), b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    EXPECT_EQ(a.points[i].x, b.points[i].x);
    EXPECT_EQ(a.points[i].y, b.points[i].y);
  }
  EXPECT_EQ(a.expansions, b.expansions);
}

TEST(RrtStarTest, BlockedGoalFails) {
  const GridSpec spec;
  EgoGrid grid(spec);
  grid.set(spec.ego_row, spec.ego_col + 36, 1.0);
  RrtStarOptions opts;
  EXPECT_EQ(RrtStarPlan(grid, {0, 0}, {9, 0}, opts).status,
            BaselineStatus::kGoalBlocked);
  // Enclosed but itself free.
  EgoGrid box(spec);
  for (int i = 12; i <= 36; ++i) {
    box.set(i, 38, 1.0);
    box.set(i, 50, 1.0);
  }
  for (int j = 38; j <= 50; ++j) {
    box.set(12, j, 1.0);
    box.set(36, j, 1.0);
  }
  EXPECT_EQ(RrtStarPlan(box, {0, 0}, {9, 0}, opts).status,
            BaselineStatus::kNoPath);
}

TEST(RrtStarTest, AnytimeCostNonIncreasing) {
  std::mt19937_64 rng(21);
  const EgoGrid grid = testing_util::RandomGrid(GridSpec{}, 0.03, rng);
  const Point2 goal = ValidateGoal(grid, {9, 1}, 0.75);
  RrtStarOptions opts;
  opts.seed = 5;
  double previous = kInf;
  for (int budget : {250, 500, 1000, 2000, 3000}) {
    opts.iterations = budget;
    const BaselinePath p = RrtStarPlan(grid, {0, 0}, goal, opts);
    const double cost = p.status == BaselineStatus::kSuccess ? p.cost : kInf;
    EXPECT_LE(cost, previous + 1e-12) << budget;
    previous = cost;
  }
}

TEST(RrtStarTest, PathsAvoidInflatedCells) {
  std::mt19937_64 rng(3);
  RrtStarOptions opts;
  for (int trial = 0; trial < 10; ++trial) {
    const EgoGrid grid = testing_util::RandomGrid(GridSpec{}, 0.04, rng);
    opts.seed = trial;
    Point2 goal;
    try {
      goal = ValidateGoal(grid, {9, 0}, 0.75);
    } catch (const GoalValidationError&) {
      continue;
    }
    const BaselinePath p = RrtStarPlan(grid, {0, 0}, goal, opts);
    if (p.status != BaselineStatus::kSuccess) continue;
    std::string why;
    EXPECT_TRUE(PathAvoidsInflated(grid, p.points, 0.5, &why)) << why;
  }
}

TEST(ResampleByArcLengthTest, Spacing) {
  const std::vector<Point2> path{{0, 0}, {1, 0}, {1, 1}};
  const auto out = ResampleByArcLength(path, 0.5);
  ASSERT_EQ(out.size(), 4u);
  EXPECT_NEAR(out[0].x, 0.5, 1e-15);
  EXPECT_NEAR(out[1].x, 1.0, 1e-15);
  EXPECT_NEAR(out[2].y, 0.5, 1e-15);
  EXPECT_NEAR(out[3].y, 1.0, 1e-15);
  const auto tail = ResampleByArcLength(path, 0.8);
  EXPECT_NEAR(tail.back().y, 1.0, 1e-15);
  EXPECT_EQ(tail.size(), 3u);
}

TEST(PathAuditTest, DetectsIntersection) {
  const GridSpec spec = SquareSpec(21);
  EgoGrid grid(spec);
  grid.set(10, 8, 1.0);  // (2, 0)
  const std::vector<Point2> through{{0, 0}, {4, 0}};
  const std::vector<Point2> around{{0, 0}, {2, 0.75}, {4, 0}};
  EXPECT_FALSE(PathAvoidsInflated(grid, through, 0.5));
  EXPECT_TRUE(PathAvoidsInflated(grid, around, 0.5));
}

}  // namespace
}  // namespace onrap
