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

// Ego-centric occupancy grids, world-to-grid projection, and the per-cell
// Kalman occupancy-flow estimator.
//
// Grid coordinates follow the image convention: row i grows downward and
// column j grows to the right. In the planning frame x points forward
// (columns) and y points left (rows decrease), so
//   x(j) = (j - ego_col) * cell_size,  y(i) = (ego_row - i) * cell_size.

#ifndef ONRAP_OCCUPANCY_H_
#define ONRAP_OCCUPANCY_H_

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace onrap {

inline constexpr double kOccupiedThreshold = 0.5;

struct CellIndex {
  int row = 0;
  int col = 0;
  friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

struct GridSpec {
  int n_rows = 49;  // lateral cells
  int n_cols = 57;  // longitudinal cells
  double cell_size = 0.25;
  int ego_row = 24;
  int ego_col = 8;

  /// Throws std::invalid_argument on empty dimensions, non-positive cell
  /// size, or an ego cell outside the grid.
  void Validate() const;
  /// Additionally requires the forward extent to cover `horizon` meters.
  void ValidateCovers(double horizon) const;

  double RowY(int row) const { return (ego_row - row) * cell_size; }
  double ColX(int col) const { return (col - ego_col) * cell_size; }
  /// Cell whose square contains (x, y), if inside the footprint.
  std::optional<CellIndex> CellAt(double x, double y) const;
  bool Contains(int row, int col) const {
    return row >= 0 && row < n_rows && col >= 0 && col < n_cols;
  }
  double MinX() const { return ColX(0) - 0.5 * cell_size; }
  double MaxX() const { return ColX(n_cols - 1) + 0.5 * cell_size; }
  double MinY() const { return RowY(n_rows - 1) - 0.5 * cell_size; }
  double MaxY() const { return RowY(0) + 0.5 * cell_size; }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Fixed-size occupancy matrix in [0, 1], row-major.
class EgoGrid {
 public:
  EgoGrid() = default;
  explicit EgoGrid(const GridSpec& spec);

  const GridSpec& spec() const { return spec_; }
  int rows() const { return spec_.n_rows; }
  int cols() const { return spec_.n_cols; }

  double at(int row, int col) const { return cells_[Offset(row, col)]; }
  /// Sets a cell; the value is clamped into [0, 1].
  void set(int row, int col, double value);
  bool Occupied(int row, int col,
                double threshold = kOccupiedThreshold) const {
    return at(row, col) >= threshold;
  }
  std::span<const double> cells() const { return cells_; }
  /// Lateral coordinate of every row; strictly decreasing.
  const std::vector<double>& row_lateral_coords() const { return row_y_; }
  int CountOccupied(double threshold = kOccupiedThreshold) const;

  friend bool operator==(const EgoGrid&, const EgoGrid&) = default;

 private:
  std::size_t Offset(int row, int col) const {
    return static_cast<std::size_t>(row) * spec_.n_cols + col;
  }

  GridSpec spec_;
  std::vector<double> cells_;
  std::vector<double> row_y_;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
};

/// World point expressed in the frame anchored at `pose`.
Point2 WorldToEgo(const Pose2& pose, const Point2& world);
Point2 EgoToWorld(const Pose2& pose, const Point2& ego);

struct AxisAlignedBox {
  double min_x = 0.0, min_y = 0.0, max_x = 0.0, max_y = 0.0;
};

struct DynamicAgent {
  Point2 position;
  Point2 velocity;  // [m/s]
};

/// Ground-truth world geometry fed to the grid generator.
struct WorldScene {
  std::vector<Point2> points;
  std::vector<AxisAlignedBox> boxes;
  std::vector<DynamicAgent> agents;

  /// Constant-velocity motion of every dynamic agent.
  void AdvanceAgents(double dt);
  /// Static points followed by current agent positions.
  std::vector<Point2> PointObstacles() const;
  /// Distance from `p` to the nearest obstacle (points, agents, boxes).
  /// +infinity for an empty scene.
  double Clearance(const Point2& p) const;
  /// Throws std::invalid_argument on non-finite geometry.
  void Validate() const;
};

/// Rasterizes the scene into the ego grid anchored at `ego_pose`. Each
/// obstacle is displaced by an independent draw, uniform over the disk of
/// radius `noise_bound` in the ego frame, before rasterization.
/// Exactly two draws are consumed per obstacle (points, then agents, then
/// boxes) whether or not it lands inside the footprint. With
/// noise_bound == 0 the generator is not touched.
EgoGrid ProjectToEgo(const WorldScene& scene, const Pose2& ego_pose,
                     const GridSpec& spec, double noise_bound,
                     std::mt19937_64& rng);
EgoGrid ProjectToEgo(const WorldScene& scene, const Pose2& ego_pose,
                     const GridSpec& spec);

// ---------------------------------------------------------------------------
// Occupancy flow.

struct FlowParams {
  double q = 0.01;               // process noise variance
  double r = 1.0;                // measurement noise variance
  double v_max = 3.0;            // velocity clip [cells/frame]
  double p_floor = 1e-3;         // variance floor
  double activity_threshold = kOccupiedThreshold;  // beta
  double initial_variance = 1.0;

  void Validate() const;
};

/// Per-cell velocity (cells/frame) and variance for both axes.
struct FlowField {
  FlowField() = default;
  FlowField(int rows, int cols, const FlowParams& params);

  int rows = 0;
  int cols = 0;
  FlowParams params;
  std::vector<double> v_x, v_y;  // v_x moves columns, v_y moves rows
  std::vector<double> p_x, p_y;

  std::size_t Offset(int row, int col) const {
    return static_cast<std::size_t>(row) * cols + col;
  }
};

/// Displacement measurement from the 3x3 local search; `valid` is set only
/// for cells that were active in the previous grid.
struct FlowMeasurement {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> valid;
  std::vector<double> z_x, z_y;
};

FlowMeasurement FlowMeasure(const EgoGrid& prev, const EgoGrid& curr,
                            const FlowField& flow, double dt = 1.0);
FlowField FlowUpdate(const FlowField& flow, const FlowMeasurement& z);
/// Mean velocity over the newest `window` fields of `history` (oldest
/// first); variances come from the newest field.
FlowField FlowSmooth(std::span<const FlowField> history, int window);
/// Constant-velocity relocation of every active cell, clamped to the grid.
/// Inactive cells stay in place; collisions merge by max.
EgoGrid PredictOccupancy(const EgoGrid& grid, const FlowField& flow,
                         double steps_ahead);

/// Ego-motion compensation: resamples `grid`, observed at `from`, into the
/// ego frame at `to` (nearest cell). Cells that were not observed are 0.
EgoGrid WarpToPose(const EgoGrid& grid, const Pose2& from, const Pose2& to);
/// Same resampling for the filter state; velocities are rotated by the
/// heading change and unobserved cells restart from the prior.
FlowField WarpToPose(const FlowField& flow, const GridSpec& spec,
                     const Pose2& from, const Pose2& to);

}  // namespace onrap

#endif  // ONRAP_OCCUPANCY_H_
