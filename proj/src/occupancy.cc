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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace onrap {

void GridSpec::Validate() const {
  if (n_rows < 1 || n_cols < 1) {
    throw std::invalid_argument("grid spec: n_rows and n_cols must be >= 1");
  }
  if (!(cell_size > 0) || !std::isfinite(cell_size)) {
    throw std::invalid_argument("grid spec: cell_size must be positive");
  }
  if (!Contains(ego_row, ego_col)) {
    throw std::invalid_argument("grid spec: ego cell outside the grid");
  }
}

void GridSpec::ValidateCovers(double horizon) const {
  Validate();
  if (MaxX() < horizon) {
    throw std::invalid_argument(
        "grid spec: forward extent does not cover the planning horizon");
  }
}

std::optional<CellIndex> GridSpec::CellAt(double x, double y) const {
  const double col = std::floor(x / cell_size + 0.5) + ego_col;
  const double row = ego_row - std::floor(y / cell_size + 0.5);
  if (!(col >= 0 && col < n_cols && row >= 0 && row < n_rows)) {
    return std::nullopt;
  }
  return CellIndex{static_cast<int>(row), static_cast<int>(col)};
}

EgoGrid::EgoGrid(const GridSpec& spec) : spec_(spec) {
  spec_.Validate();
  cells_.assign(static_cast<std::size_t>(spec_.n_rows) * spec_.n_cols, 0.0);
  row_y_.resize(spec_.n_rows);
  for (int i = 0; i < spec_.n_rows; ++i) row_y_[i] = spec_.RowY(i);
}

void EgoGrid::set(int row, int col, double value) {
  cells_[Offset(row, col)] = std::clamp(value, 0.0, 1.0);
}

int EgoGrid::CountOccupied(double threshold) const {
  return static_cast<int>(std::count_if(
      cells_.begin(), cells_.end(),
      [threshold](double v) { return v >= threshold; }));
}

Point2 WorldToEgo(const Pose2& pose, const Point2& world) {
  const double dx = world.x - pose.x;
  const double dy = world.y - pose.y;
  const double c = std::cos(pose.heading);
  const double s = std::sin(pose.heading);
  return {c * dx + s * dy, -s * dx + c * dy};
}

Point2 EgoToWorld(const Pose2& pose, const Point2& ego) {
  const double c = std::cos(pose.heading);
  const double s = std::sin(pose.heading);
  return {pose.x + c * ego.x - s * ego.y, pose.y + s * ego.x + c * ego.y};
}

void WorldScene::AdvanceAgents(double dt) {
  for (DynamicAgent& a : agents) {
    a.position.x += a.velocity.x * dt;
    a.position.y += a.velocity.y * dt;
  }
}

std::vector<Point2> WorldScene::PointObstacles() const {
  std::vector<Point2> out = points;
  for (const DynamicAgent& a : agents) out.push_back(a.position);
  return out;
}

double WorldScene::Clearance(const Point2& p) const {
  double best = std::numeric_limits<double>::infinity();
  auto consider = [&](double d2) { best = std::min(best, d2); };
  for (const Point2& q : points) {
    consider((q.x - p.x) * (q.x - p.x) + (q.y - p.y) * (q.y - p.y));
  }
  for (const DynamicAgent& a : agents) {
    const Point2& q = a.position;
    consider((q.x - p.x) * (q.x - p.x) + (q.y - p.y) * (q.y - p.y));
  }
  for (const AxisAlignedBox& b : boxes) {
    const double dx = std::max({b.min_x - p.x, 0.0, p.x - b.max_x});
    const double dy = std::max({b.min_y - p.y, 0.0, p.y - b.max_y});
    consider(dx * dx + dy * dy);
  }
  return std::sqrt(best);
}

void WorldScene::Validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  for (const Point2& p : points) {
    if (!finite(p.x) || !finite(p.y)) {
      throw std::invalid_argument("scene: non-finite point obstacle");
    }
  }
  for (const DynamicAgent& a : agents) {
    if (!finite(a.position.x) || !finite(a.position.y) ||
        !finite(a.velocity.x) || !finite(a.velocity.y)) {
      throw std::invalid_argument("scene: non-finite dynamic agent");
    }
  }
  for (const AxisAlignedBox& b : boxes) {
    if (!finite(b.min_x) || !finite(b.min_y) || !finite(b.max_x) ||
        !finite(b.max_y) || b.min_x > b.max_x || b.min_y > b.max_y) {
      throw std::invalid_argument("scene: malformed box obstacle");
    }
  }
}

namespace {

void MarkPoint(EgoGrid& grid, const Point2& ego) {
  if (auto cell = grid.spec().CellAt(ego.x, ego.y)) {
    grid.set(cell->row, cell->col, 1.0);
  }
}

// Marks every cell whose square overlaps the box after it has been rotated
// into the ego frame. The rotated box is sampled at sub-cell resolution.
void MarkBox(EgoGrid& grid, const Pose2& pose, const AxisAlignedBox& box,
             const Point2& offset) {
  const double step = 0.5 * grid.spec().cell_size;
  const int nx = std::max(1, static_cast<int>(
                                 std::ceil((box.max_x - box.min_x) / step)));
  const int ny = std::max(1, static_cast<int>(
                                 std::ceil((box.max_y - box.min_y) / step)));
  for (int a = 0; a <= nx; ++a) {
    for (int b = 0; b <= ny; ++b) {
      const Point2 w{box.min_x + (box.max_x - box.min_x) * a / nx,
                     box.min_y + (box.max_y - box.min_y) * b / ny};
      Point2 e = WorldToEgo(pose, w);
      e.x += offset.x;
      e.y += offset.y;
      MarkPoint(grid, e);
    }
  }
}

}  // namespace

EgoGrid ProjectToEgo(const WorldScene& scene, const Pose2& ego_pose,
                     const GridSpec& spec, double noise_bound,
                     std::mt19937_64& rng) {
  if (noise_bound < 0) {
    throw std::invalid_argument("projection: noise bound must be >= 0");
  }
  EgoGrid grid(spec);
  // Uniform over the disk of radius noise_bound, so no obstacle moves
  // farther than the bound.
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&]() -> Point2 {
    if (noise_bound == 0.0) return {};
    const double radius = noise_bound * std::sqrt(unit(rng));
    const double angle = 2.0 * std::numbers::pi * unit(rng);
    return {radius * std::cos(angle), radius * std::sin(angle)};
  };
  for (const Point2& p : scene.points) {
    Point2 e = WorldToEgo(ego_pose, p);
    const Point2 d = draw();
    MarkPoint(grid, {e.x + d.x, e.y + d.y});
  }
  for (const DynamicAgent& a : scene.agents) {
    Point2 e = WorldToEgo(ego_pose, a.position);
    const Point2 d = draw();
    MarkPoint(grid, {e.x + d.x, e.y + d.y});
  }
  for (const AxisAlignedBox& b : scene.boxes) {
    MarkBox(grid, ego_pose, b, draw());
  }
  return grid;
}

EgoGrid ProjectToEgo(const WorldScene& scene, const Pose2& ego_pose,
                     const GridSpec& spec) {
  std::mt19937_64 unused(0);
  return ProjectToEgo(scene, ego_pose, spec, 0.0, unused);
}

// ---------------------------------------------------------------------------

void FlowParams::Validate() const {
  if (!(q >= 0) || !(r > 0) || !(v_max > 0) || !(p_floor > 0) ||
      !(activity_threshold > 0 && activity_threshold < 1) ||
      !(initial_variance > 0)) {
    throw std::invalid_argument(
        "flow params: need q >= 0, r > 0, v_max > 0, p_floor > 0, "
        "beta in (0,1), initial variance > 0");
  }
}

FlowField::FlowField(int rows_in, int cols_in, const FlowParams& params_in)
    : rows(rows_in), cols(cols_in), params(params_in) {
  params.Validate();
  const std::size_t n = static_cast<std::size_t>(rows) * cols;
  v_x.assign(n, 0.0);
  v_y.assign(n, 0.0);
  p_x.assign(n, std::max(params.initial_variance, params.p_floor));
  p_y.assign(n, std::max(params.initial_variance, params.p_floor));
}

FlowMeasurement FlowMeasure(const EgoGrid& prev, const EgoGrid& curr,
                            const FlowField& flow, double dt) {
  if (!(prev.spec() == curr.spec()) || flow.rows != prev.rows() ||
      flow.cols != prev.cols()) {
    throw std::invalid_argument("flow measure: grid/flow shape mismatch");
  }
  if (!(dt > 0)) throw std::invalid_argument("flow measure: dt must be > 0");
  const int rows = prev.rows();
  const int cols = prev.cols();
  FlowMeasurement z;
  z.rows = rows;
  z.cols = cols;
  const std::size_t n = static_cast<std::size_t>(rows) * cols;
  z.valid.assign(n, 0);
  z.z_x.assign(n, 0.0);
  z.z_y.assign(n, 0.0);

  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      if (!prev.Occupied(i, j, flow.params.activity_threshold)) continue;
      const std::size_t o = flow.Offset(i, j);
      const int li = std::clamp(
          static_cast<int>(std::lround(i + flow.v_y[o] * dt)), 0, rows - 1);
      const int lj = std::clamp(
          static_cast<int>(std::lround(j + flow.v_x[o] * dt)), 0, cols - 1);
      // Highest occupancy wins; ties go to the smallest displacement from
      // (i, j), then row-major order.
      int best_i = -1, best_j = -1;
      double best_occ = -1.0;
      int best_d2 = 0;
      for (int di = -1; di <= 1; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          const int ci = li + di;
          const int cj = lj + dj;
          if (!curr.spec().Contains(ci, cj)) continue;
          const double occ = curr.at(ci, cj);
          const int d2 = (ci - i) * (ci - i) + (cj - j) * (cj - j);
          if (occ > best_occ || (occ == best_occ && d2 < best_d2)) {
            best_occ = occ;
            best_d2 = d2;
            best_i = ci;
            best_j = cj;
          }
        }
      }
      z.valid[o] = 1;
      z.z_y[o] = (best_i - i) / dt;
      z.z_x[o] = (best_j - j) / dt;
    }
  }
  return z;
}

FlowField FlowUpdate(const FlowField& flow, const FlowMeasurement& z) {
  if (z.rows != flow.rows || z.cols != flow.cols) {
    throw std::invalid_argument("flow update: measurement shape mismatch");
  }
  FlowField out = flow;
  const FlowParams& fp = flow.params;
  auto update_axis = [&fp](double& v, double& p, double meas) {
    p += fp.q;
    const double gain = p / (p + fp.r);
    v += gain * (meas - v);
    p = (1.0 - gain) * p;
    v = std::clamp(v, -fp.v_max, fp.v_max);
    p = std::max(p, fp.p_floor);
  };
  for (std::size_t o = 0; o < z.valid.size(); ++o) {
    if (!z.valid[o]) continue;
    update_axis(out.v_x[o], out.p_x[o], z.z_x[o]);
    update_axis(out.v_y[o], out.p_y[o], z.z_y[o]);
  }
  return out;
}

FlowField FlowSmooth(std::span<const FlowField> history, int window) {
  if (history.empty()) throw std::invalid_argument("flow smooth: no history");
  if (window < 1) throw std::invalid_argument("flow smooth: window < 1");
  const FlowField& newest = history.back();
  const std::size_t used =
      std::min<std::size_t>(static_cast<std::size_t>(window), history.size());
  FlowField out = newest;
  std::fill(out.v_x.begin(), out.v_x.end(), 0.0);
  std::fill(out.v_y.begin(), out.v_y.end(), 0.0);
  for (std::size_t h = history.size() - used; h < history.size(); ++h) {
    const FlowField& f = history[h];
    if (f.rows != newest.rows || f.cols != newest.cols) {
      throw std::invalid_argument("flow smooth: shape mismatch in history");
    }
    for (std::size_t o = 0; o < out.v_x.size(); ++o) {
      out.v_x[o] += f.v_x[o];
      out.v_y[o] += f.v_y[o];
    }
  }
  for (std::size_t o = 0; o < out.v_x.size(); ++o) {
    out.v_x[o] /= static_cast<double>(used);
    out.v_y[o] /= static_cast<double>(used);
  }
  return out;
}

EgoGrid PredictOccupancy(const EgoGrid& grid, const FlowField& flow,
                         double steps_ahead) {
  if (flow.rows != grid.rows() || flow.cols != grid.cols()) {
    throw std::invalid_argument("predict: grid/flow shape mismatch");
  }
  EgoGrid out(grid.spec());
  const double beta = flow.params.activity_threshold;
  for (int i = 0; i < grid.rows(); ++i) {
    for (int j = 0; j < grid.cols(); ++j) {
      const double occ = grid.at(i, j);
      if (occ <= 0.0) continue;
      int ti = i, tj = j;
      if (occ >= beta) {
        const std::size_t o = flow.Offset(i, j);
        ti = std::clamp(
            static_cast<int>(std::lround(i + flow.v_y[o] * steps_ahead)), 0,
            grid.rows() - 1);
        tj = std::clamp(
            static_cast<int>(std::lround(j + flow.v_x[o] * steps_ahead)), 0,
            grid.cols() - 1);
      }
      out.set(ti, tj, std::max(out.at(ti, tj), occ));
    }
  }
  return out;
}

namespace {

// Source cell in the `from` frame for every cell of the `to` frame.
template <typename Fn>
void ForEachWarpedCell(const GridSpec& spec, const Pose2& from,
                       const Pose2& to, Fn&& fn) {
  for (int i = 0; i < spec.n_rows; ++i) {
    for (int j = 0; j < spec.n_cols; ++j) {
      const Point2 world = EgoToWorld(to, {spec.ColX(j), spec.RowY(i)});
      const Point2 old = WorldToEgo(from, world);
      fn(i, j, spec.CellAt(old.x, old.y));
    }
  }
}

}  // namespace

EgoGrid WarpToPose(const EgoGrid& grid, const Pose2& from, const Pose2& to) {
  EgoGrid out(grid.spec());
  ForEachWarpedCell(grid.spec(), from, to,
                    [&](int i, int j, std::optional<CellIndex> src) {
                      if (src) out.set(i, j, grid.at(src->row, src->col));
                    });
  return out;
}

FlowField WarpToPose(const FlowField& flow, const GridSpec& spec,
                     const Pose2& from, const Pose2& to) {
  if (flow.rows != spec.n_rows || flow.cols != spec.n_cols) {
    throw std::invalid_argument("warp: flow/grid shape mismatch");
  }
  FlowField out(flow.rows, flow.cols, flow.params);
  // Rotate (v_x, -v_y), i.e. the planar velocity, into the new frame.
  const double dh = to.heading - from.heading;
  const double c = std::cos(dh), s = std::sin(dh);
  ForEachWarpedCell(spec, from, to,
                    [&](int i, int j, std::optional<CellIndex> src) {
                      if (!src) return;
                      const std::size_t o = out.Offset(i, j);
                      const std::size_t q = flow.Offset(src->row, src->col);
                      const double vx = flow.v_x[q];
                      const double vy_up = -flow.v_y[q];
                      out.v_x[o] = c * vx + s * vy_up;
                      out.v_y[o] = -(-s * vx + c * vy_up);
                      out.p_x[o] = flow.p_x[q];
                      out.p_y[o] = flow.p_y[q];
                    });
  return out;
}

}  // namespace onrap
