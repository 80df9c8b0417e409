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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <random>
#include <tuple>

namespace onrap {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double Dist(const Point2& a, const Point2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

Point2 CellCenter(const GridSpec& spec, int row, int col) {
  return {spec.ColX(col), spec.RowY(row)};
}

// Collision queries against occupied cell centers, restricted to the cells
// near the query so the cost does not grow with the obstacle count.
class InflatedRegion {
 public:
  InflatedRegion(const EgoGrid& grid, double radius)
      : grid_(grid), radius_(radius) {}

  bool PointFree(const Point2& p) const {
    return SegmentFree(p, p);
  }

  bool SegmentFree(const Point2& a, const Point2& b) const {
    const GridSpec& s = grid_.spec();
    const double margin = radius_ + s.cell_size;
    const int c0 = std::max(0, static_cast<int>(std::floor(
                                   (std::min(a.x, b.x) - margin) / s.cell_size)) +
                                   s.ego_col);
    const int c1 = std::min(s.n_cols - 1,
                            static_cast<int>(std::ceil(
                                (std::max(a.x, b.x) + margin) / s.cell_size)) +
                                s.ego_col);
    const int r0 = std::max(0, s.ego_row - static_cast<int>(std::ceil(
                                   (std::max(a.y, b.y) + margin) / s.cell_size)));
    const int r1 = std::min(
        s.n_rows - 1, s.ego_row - static_cast<int>(std::floor(
                                      (std::min(a.y, b.y) - margin) /
                                      s.cell_size)));
    for (int i = r0; i <= r1; ++i) {
      for (int j = c0; j <= c1; ++j) {
        if (!grid_.Occupied(i, j)) continue;
        if (PointSegmentDistance(CellCenter(s, i, j), a, b) <= radius_) {
          return false;
        }
      }
    }
    return true;
  }

 private:
  const EgoGrid& grid_;
  double radius_;
};

}  // namespace

std::string ToString(BaselineStatus status) {
  switch (status) {
    case BaselineStatus::kSuccess:
      return "success";
    case BaselineStatus::kNoPath:
      return "no_path";
    case BaselineStatus::kGoalBlocked:
      return "goal_blocked";
  }
  return "unknown";
}

double PointSegmentDistance(const Point2& p, const Point2& a,
                            const Point2& b) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  double t = 0.0;
  if (len2 > 0) {
    t = std::clamp(((p.x - a.x) * vx + (p.y - a.y) * vy) / len2, 0.0, 1.0);
  }
  return std::hypot(p.x - (a.x + t * vx), p.y - (a.y + t * vy));
}

std::vector<Point2> OccupiedCenters(const EgoGrid& grid) {
  std::vector<Point2> out;
  const GridSpec& s = grid.spec();
  for (int i = 0; i < s.n_rows; ++i) {
    for (int j = 0; j < s.n_cols; ++j) {
      if (grid.Occupied(i, j)) out.push_back(CellCenter(s, i, j));
    }
  }
  return out;
}

double ClearanceToOccupied(std::span<const Point2> occupied, const Point2& p) {
  double best = kInf;
  for (const Point2& q : occupied) best = std::min(best, Dist(p, q));
  return best;
}

std::vector<std::uint8_t> InflatedMask(const EgoGrid& grid, double radius) {
  const GridSpec& s = grid.spec();
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(s.n_rows) * s.n_cols,
                                 0);
  const int reach = static_cast<int>(std::floor(radius / s.cell_size));
  for (int i = 0; i < s.n_rows; ++i) {
    for (int j = 0; j < s.n_cols; ++j) {
      if (!grid.Occupied(i, j)) continue;
      for (int di = -reach; di <= reach; ++di) {
        for (int dj = -reach; dj <= reach; ++dj) {
          if (!s.Contains(i + di, j + dj)) continue;
          if (std::hypot(di, dj) * s.cell_size <= radius) {
            mask[static_cast<std::size_t>(i + di) * s.n_cols + j + dj] = 1;
          }
        }
      }
    }
  }
  return mask;
}

Point2 ValidateGoal(const EgoGrid& grid, const Point2& goal,
                    double clearance) {
  const std::vector<Point2> occupied = OccupiedCenters(grid);
  const GridSpec& s = grid.spec();
  if (s.CellAt(goal.x, goal.y) &&
      ClearanceToOccupied(occupied, goal) >= clearance) {
    return goal;
  }
  // Ring search around the cell nearest to the goal (clamped into the grid).
  const int gc = std::clamp(
      static_cast<int>(std::floor(goal.x / s.cell_size + 0.5)) + s.ego_col, 0,
      s.n_cols - 1);
  const int gr = std::clamp(
      s.ego_row - static_cast<int>(std::floor(goal.y / s.cell_size + 0.5)), 0,
      s.n_rows - 1);
  const int max_ring = std::max({gr, s.n_rows - 1 - gr, gc, s.n_cols - 1 - gc});
  double best_d = kInf;
  Point2 best{};
  for (int ring = 0; ring <= max_ring; ++ring) {
    // Every cell of this ring is at least (ring - 1) cells from the goal.
    if (best_d < kInf && (ring - 1) * s.cell_size > best_d) break;
    for (int i = gr - ring; i <= gr + ring; ++i) {
      for (int j = gc - ring; j <= gc + ring; ++j) {
        if (std::max(std::abs(i - gr), std::abs(j - gc)) != ring) continue;
        if (!s.Contains(i, j)) continue;
        const Point2 c = CellCenter(s, i, j);
        const double d = Dist(c, goal);
        if (d >= best_d) continue;
        if (ClearanceToOccupied(occupied, c) >= clearance) {
          best_d = d;
          best = c;
        }
      }
    }
  }
  if (best_d == kInf) {
    throw GoalValidationError("goal validation: no cell meets the clearance");
  }
  return best;
}

BaselinePath AStarPlan(const EgoGrid& grid, const Point2& start,
                       const Point2& goal, const AStarOptions& options) {
  const GridSpec& s = grid.spec();
  BaselinePath result;
  const auto start_cell = s.CellAt(start.x, start.y);
  const auto goal_cell = s.CellAt(goal.x, goal.y);
  const std::vector<std::uint8_t> blocked =
      InflatedMask(grid, options.inflation_radius);
  auto index = [&s](int i, int j) {
    return static_cast<std::size_t>(i) * s.n_cols + j;
  };
  if (!start_cell || !goal_cell || blocked[index(goal_cell->row, goal_cell->col)]) {
    result.status = BaselineStatus::kGoalBlocked;
    return result;
  }
  const std::size_t n = blocked.size();
  const std::size_t start_idx = index(start_cell->row, start_cell->col);
  const std::size_t goal_idx = index(goal_cell->row, goal_cell->col);
  auto free_cell = [&](int i, int j) {
    return s.Contains(i, j) && (!blocked[index(i, j)] || index(i, j) == start_idx);
  };
  auto octile = [&](int i, int j) {
    const int di = std::abs(i - goal_cell->row);
    const int dj = std::abs(j - goal_cell->col);
    return s.cell_size * (std::max(di, dj) +
                          (std::sqrt(2.0) - 1.0) * std::min(di, dj));
  };

  std::vector<double> g(n, kInf);
  std::vector<std::int64_t> parent(n, -1);
  std::vector<std::uint8_t> closed(n, 0);
  // (f, h, insertion order, cell)
  using Entry = std::tuple<double, double, std::int64_t, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  std::int64_t counter = 0;
  g[start_idx] = 0.0;
  open.emplace(octile(start_cell->row, start_cell->col),
               octile(start_cell->row, start_cell->col), counter++, start_idx);
  while (!open.empty()) {
    const auto [f, h, order, cur] = open.top();
    open.pop();
    if (closed[cur]) continue;
    closed[cur] = 1;
    ++result.expansions;
    if (cur == goal_idx) break;
    const int ci = static_cast<int>(cur / s.n_cols);
    const int cj = static_cast<int>(cur % s.n_cols);
    for (int di = -1; di <= 1; ++di) {
      for (int dj = -1; dj <= 1; ++dj) {
        if (di == 0 && dj == 0) continue;
        const int ni = ci + di, nj = cj + dj;
        if (!free_cell(ni, nj)) continue;
        if (di != 0 && dj != 0 &&
            (!free_cell(ci + di, cj) || !free_cell(ci, cj + dj))) {
          continue;
        }
        const std::size_t nb = index(ni, nj);
        if (closed[nb]) continue;
        const double step =
            s.cell_size * ((di != 0 && dj != 0) ? std::sqrt(2.0) : 1.0);
        if (g[cur] + step < g[nb]) {
          g[nb] = g[cur] + step;
          parent[nb] = static_cast<std::int64_t>(cur);
          const double hn = octile(ni, nj);
          open.emplace(g[nb] + hn, hn, counter++, nb);
        }
      }
    }
  }
  if (!closed[goal_idx]) return result;
  for (std::int64_t c = static_cast<std::int64_t>(goal_idx); c >= 0;
       c = parent[c]) {
    result.points.push_back(CellCenter(s, static_cast<int>(c / s.n_cols),
                                       static_cast<int>(c % s.n_cols)));
  }
  std::reverse(result.points.begin(), result.points.end());
  result.cost = g[goal_idx];
  result.status = BaselineStatus::kSuccess;
  return result;
}

BaselinePath RrtStarPlan(const EgoGrid& grid, const Point2& start,
                         const Point2& goal, const RrtStarOptions& options) {
  const GridSpec& s = grid.spec();
  const InflatedRegion region(grid, options.inflation_radius);
  BaselinePath result;
  if (!region.PointFree(goal)) {
    result.status = BaselineStatus::kGoalBlocked;
    return result;
  }
  const bool start_blocked = !region.PointFree(start);
  // Edges leaving the root are exempt when the root is already inside the
  // inflated region; everything else is checked.
  auto edge_free = [&](int from, const Point2& a, const Point2& b) {
    return (from == 0 && start_blocked) || region.SegmentFree(a, b);
  };

  struct Node {
    Point2 p;
    int parent = -1;
    double cost = 0.0;
    std::vector<int> children;
  };
  std::vector<Node> tree;
  tree.push_back({start, -1, 0.0, {}});

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> ux(s.MinX(), s.MaxX());
  std::uniform_real_distribution<double> uy(s.MinY(), s.MaxY());
  // Shrinking ball for d = 2: gamma^2 = 3 * area / pi.
  const double gamma_sq =
      3.0 * (s.MaxX() - s.MinX()) * (s.MaxY() - s.MinY()) / std::numbers::pi;
  std::vector<int> near;
  std::vector<int> stack;

  for (int it = 0; it < options.iterations; ++it) {
    const Point2 sample{ux(rng), uy(rng)};
    int nearest = 0;
    double best = kInf;
    for (int i = 0; i < static_cast<int>(tree.size()); ++i) {
      const double d = std::pow(tree[i].p.x - sample.x, 2) +
                       std::pow(tree[i].p.y - sample.y, 2);
      if (d < best) {
        best = d;
        nearest = i;
      }
    }
    const double d = std::sqrt(best);
    if (d == 0.0) continue;
    const double scale = std::min(1.0, options.step_size / d);
    const Point2& from = tree[nearest].p;
    const Point2 q{from.x + scale * (sample.x - from.x),
                   from.y + scale * (sample.y - from.y)};
    if (!region.PointFree(q) || !edge_free(nearest, from, q)) continue;

    double r2 = options.rewire_radius * options.rewire_radius;
    if (options.rewire_radius <= 0.0) {
      const double n = static_cast<double>(tree.size() + 1);
      r2 = std::min(gamma_sq * std::log(n) / n,
                    options.step_size * options.step_size);
    }
    near.clear();
    for (int i = 0; i < static_cast<int>(tree.size()); ++i) {
      if (std::pow(tree[i].p.x - q.x, 2) + std::pow(tree[i].p.y - q.y, 2) <=
          r2) {
        near.push_back(i);
      }
    }
    int parent = nearest;
    double cost = tree[nearest].cost + Dist(from, q);
    for (int i : near) {
      const double c = tree[i].cost + Dist(tree[i].p, q);
      if (c < cost && edge_free(i, tree[i].p, q)) {
        cost = c;
        parent = i;
      }
    }
    const int id = static_cast<int>(tree.size());
    tree.push_back({q, parent, cost, {}});
    tree[parent].children.push_back(id);

    for (int i : near) {
      if (i == parent || i == 0) continue;
      const double c = cost + Dist(q, tree[i].p);
      if (c < tree[i].cost && region.SegmentFree(q, tree[i].p)) {
        auto& siblings = tree[tree[i].parent].children;
        siblings.erase(std::find(siblings.begin(), siblings.end(), i));
        tree[i].parent = id;
        tree[id].children.push_back(i);
        const double delta = tree[i].cost - c;
        stack.assign(1, i);
        while (!stack.empty()) {
          const int k = stack.back();
          stack.pop_back();
          tree[k].cost -= delta;
          for (int child : tree[k].children) stack.push_back(child);
        }
      }
    }
  }
  result.expansions = static_cast<int>(tree.size());

  int best_node = -1;
  double best_cost = kInf;
  for (int i = 0; i < static_cast<int>(tree.size()); ++i) {
    const double d = Dist(tree[i].p, goal);
    if (d > options.goal_tolerance) continue;
    const double c = tree[i].cost + d;
    if (c < best_cost && edge_free(i, tree[i].p, goal)) {
      best_cost = c;
      best_node = i;
    }
  }
  if (best_node < 0) return result;
  result.points.push_back(goal);
  for (int i = best_node; i >= 0; i = tree[i].parent) {
    result.points.push_back(tree[i].p);
  }
  std::reverse(result.points.begin(), result.points.end());
  // A node sitting exactly on the goal would duplicate it.
  if (result.points.size() >= 2 &&
      Dist(result.points[result.points.size() - 2], goal) == 0.0) {
    result.points.pop_back();
  }
  result.cost = best_cost;
  result.status = BaselineStatus::kSuccess;
  return result;
}

bool PathAvoidsInflated(const EgoGrid& grid, std::span<const Point2> path,
                        double radius, std::string* why) {
  const InflatedRegion region(grid, radius);
  if (path.empty()) return true;
  const bool start_blocked = !region.PointFree(path.front());
  if (path.size() == 1) return start_blocked || region.PointFree(path[0]);
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    if (i == 0 && start_blocked) {
      if (!region.PointFree(path[1])) {
        if (why) *why = "point 1 inside the inflated region";
        return false;
      }
      continue;
    }
    if (!region.SegmentFree(path[i], path[i + 1])) {
      if (why) *why = "segment " + std::to_string(i) + " intersects an obstacle";
      return false;
    }
  }
  return true;
}

std::vector<Point2> ResampleByArcLength(std::span<const Point2> path,
                                        double spacing) {
  if (!(spacing > 0)) {
    throw std::invalid_argument("resample: spacing must be > 0");
  }
  std::vector<Point2> out;
  if (path.size() < 2) return out;
  double next = spacing;
  double walked = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const double seg = Dist(path[i], path[i + 1]);
    while (seg > 0 && walked + seg >= next) {
      const double t = (next - walked) / seg;
      out.push_back({path[i].x + t * (path[i + 1].x - path[i].x),
                     path[i].y + t * (path[i + 1].y - path[i].y)});
      next += spacing;
    }
    walked += seg;
  }
  const Point2& end = path.back();
  if (out.empty() || Dist(out.back(), end) > 1e-9) out.push_back(end);
  return out;
}

}  // namespace onrap
