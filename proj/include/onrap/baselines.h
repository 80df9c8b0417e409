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

// Grid-search (A*) and sampling-based (RRT*) comparison planners. Both
// plan a point robot on the ego grid with occupied cells inflated by a
// radius (half the ego width by default) and treated as hard obstacles.
//
// Inflation geometry: the blocked region is the union of closed disks of
// the given radius around occupied cell centers. A point is free iff its
// distance to every occupied center is strictly greater than the radius.

#ifndef ONRAP_BASELINES_H_
#define ONRAP_BASELINES_H_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "onrap/occupancy.h"

namespace onrap {

enum class BaselineStatus { kSuccess, kNoPath, kGoalBlocked };

std::string ToString(BaselineStatus status);

/// Thrown when no point of the grid satisfies the goal clearance.
class GoalValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Centers (ego frame) of all cells with occupancy >= 0.5.
std::vector<Point2> OccupiedCenters(const EgoGrid& grid);

/// Distance from `p` to the nearest occupied cell center; +inf if none.
double ClearanceToOccupied(std::span<const Point2> occupied, const Point2& p);

/// Per-cell mask (row-major, 1 = blocked) of cells whose center lies within
/// `radius` of an occupied center.
std::vector<std::uint8_t> InflatedMask(const EgoGrid& grid, double radius);

/// Returns `goal` if it lies on the grid and its clearance is >=
/// `clearance`; otherwise the grid
/// cell center nearest to `goal` that meets the clearance, found by an
/// outward ring search (ties: ring order, then row-major). Throws
/// GoalValidationError if no cell qualifies.
Point2 ValidateGoal(const EgoGrid& grid, const Point2& goal,
                    double clearance);

struct BaselinePath {
  BaselineStatus status = BaselineStatus::kNoPath;
  std::vector<Point2> points;  // ego frame, start first
  double cost = 0.0;           // polyline length [m]
  int expansions = 0;          // nodes expanded (A*) or tree size (RRT*)
};

struct AStarOptions {
  double inflation_radius = 0.5;
};

/// 8-connected A* over cell centers with unit/sqrt(2) step costs scaled by
/// the cell size and the octile heuristic. Diagonal moves may not cut a
/// blocked corner. The start cell is always expandable, so a start inside
/// the inflated region can still leave it.
BaselinePath AStarPlan(const EgoGrid& grid, const Point2& start,
                       const Point2& goal, const AStarOptions& options = {});

struct RrtStarOptions {
  int iterations = 2000;
  double step_size = 0.5;      // [m]
  // Fixed rewiring radius [m]; <= 0 selects the shrinking ball
  // min(gamma * sqrt(ln n / n), step_size) with gamma^2 = 3 * area / pi.
  double rewire_radius = 0.0;
  double goal_tolerance = 0.5; // [m]
  double inflation_radius = 0.5;
  std::uint64_t seed = 0;
};

/// RRT* with uniform sampling over the grid footprint. Every iteration
/// consumes exactly two uniform draws, so a larger budget extends the same
/// sample sequence. The returned path ends exactly at `goal`.
BaselinePath RrtStarPlan(const EgoGrid& grid, const Point2& start,
                         const Point2& goal, const RrtStarOptions& options);

/// Post-hoc geometric audit: every segment keeps a distance strictly
/// greater than `radius` from every occupied center. The first segment is
/// skipped when the start itself is inside the inflated region.
bool PathAvoidsInflated(const EgoGrid& grid, std::span<const Point2> path,
                        double radius, std::string* why = nullptr);

/// Distance from p to the segment [a, b].
double PointSegmentDistance(const Point2& p, const Point2& a, const Point2& b);

/// Points at arc length spacing, 2 spacing, ... along the polyline (the
/// start itself excluded); the final point is the polyline end.
std::vector<Point2> ResampleByArcLength(std::span<const Point2> path,
                                        double spacing);

}  // namespace onrap

#endif  // ONRAP_BASELINES_H_
