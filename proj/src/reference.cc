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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "onrap/errors.h"
#include "onrap/grid_io.h"

namespace onrap {
namespace {

double WrapAngle(double a) {
  return std::remainder(a, 2.0 * std::numbers::pi);
}

}  // namespace

std::vector<Point2> QuinticHermite(const PoseBoundary& start,
                                   const PoseBoundary& goal, int n_samples) {
  if (n_samples < 2) throw std::invalid_argument("hermite: n_samples < 2");
  const double separation = goal.x - start.x;
  if (!(separation > 0) || !std::isfinite(separation)) {
    throw std::invalid_argument(
        "hermite: goal must lie strictly ahead of the start");
  }
  if (!std::isfinite(start.heading) || !std::isfinite(goal.heading)) {
    throw std::invalid_argument("hermite: non-finite heading");
  }
  const double s0 = start.tangent_scale > 0 ? start.tangent_scale : separation;
  const double s1 = goal.tangent_scale > 0 ? goal.tangent_scale : separation;
  const Point2 m0{s0 * std::cos(start.heading), s0 * std::sin(start.heading)};
  const Point2 m1{s1 * std::cos(goal.heading), s1 * std::sin(goal.heading)};
  // Second derivative along the left normal with magnitude kappa * |m|^2.
  const Point2 a0{-std::sin(start.heading) * start.curvature_hint * s0 * s0,
                  std::cos(start.heading) * start.curvature_hint * s0 * s0};
  const Point2 a1{-std::sin(goal.heading) * goal.curvature_hint * s1 * s1,
                  std::cos(goal.heading) * goal.curvature_hint * s1 * s1};

  std::vector<Point2> out(n_samples);
  for (int n = 0; n < n_samples; ++n) {
    const double t = static_cast<double>(n) / (n_samples - 1);
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    const double h0 = 1 - 10 * t3 + 15 * t4 - 6 * t5;
    const double h1 = t - 6 * t3 + 8 * t4 - 3 * t5;
    const double h2 = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5;
    const double h3 = 0.5 * t3 - t4 + 0.5 * t5;
    const double h4 = -4 * t3 + 7 * t4 - 3 * t5;
    const double h5 = 10 * t3 - 15 * t4 + 6 * t5;
    out[n] = {h0 * start.x + h1 * m0.x + h2 * a0.x + h3 * a1.x + h4 * m1.x +
                  h5 * goal.x,
              h0 * start.y + h1 * m0.y + h2 * a0.y + h3 * a1.y + h4 * m1.y +
                  h5 * goal.y};
  }
  // Endpoints are exact by construction; pin them against round-off.
  out.front() = {start.x, start.y};
  out.back() = {goal.x, goal.y};
  return out;
}

ReferencePath ResampleToSteps(std::span<const Point2> curve, double ds,
                              int n_steps) {
  if (curve.size() < 2) throw std::invalid_argument("resample: < 2 points");
  if (!(ds > 0) || n_steps < 1) {
    throw std::invalid_argument("resample: need ds > 0 and n_steps >= 1");
  }
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (!(curve[i].x > curve[i - 1].x)) {
      throw std::invalid_argument("resample: curve x is not increasing");
    }
  }
  ReferencePath ref;
  ref.ds = ds;
  ref.y.resize(n_steps + 1);
  std::size_t seg = 0;
  for (int k = 0; k <= n_steps; ++k) {
    const double x = k * ds;
    while (seg + 2 < curve.size() && curve[seg + 1].x < x) ++seg;
    const Point2& a = curve[seg];
    const Point2& b = curve[seg + 1];
    if (x > curve.back().x) ref.extrapolated = true;
    ref.y[k] = a.y + (b.y - a.y) * (x - a.x) / (b.x - a.x);
  }
  return ref;
}

LocalGoal SelectLocalGoal(std::span<const Point2> route, const Pose2& ego,
                          double lookahead, int chord_half_span) {
  if (route.empty()) throw std::invalid_argument("local goal: empty route");
  std::size_t closest = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < route.size(); ++i) {
    const double d = std::hypot(route[i].x - ego.x, route[i].y - ego.y);
    if (d < best) {
      best = d;
      closest = i;
    }
  }
  // Walk forward along the route until the arc length passes lookahead,
  // then keep whichever of the bracketing vertices is nearer.
  LocalGoal goal;
  std::size_t idx = closest;
  double arc = 0.0;
  bool reached = false;
  for (std::size_t i = closest + 1; i < route.size(); ++i) {
    const double seg = std::hypot(route[i].x - route[i - 1].x,
                                  route[i].y - route[i - 1].y);
    if (arc + seg >= lookahead) {
      idx = (lookahead - arc <= arc + seg - lookahead) ? i - 1 : i;
      reached = true;
      break;
    }
    arc += seg;
    idx = i;
  }
  goal.end_of_route = !reached;
  goal.route_index = idx;

  const int span = std::max(1, chord_half_span);
  const std::size_t lo = idx >= static_cast<std::size_t>(span) ? idx - span : 0;
  const std::size_t hi = std::min(route.size() - 1, idx + span);
  double world_heading = ego.heading;
  if (hi > lo) {
    world_heading =
        std::atan2(route[hi].y - route[lo].y, route[hi].x - route[lo].x);
  }
  const Point2 local = WorldToEgo(ego, route[idx]);
  goal.pose.x = local.x;
  goal.pose.y = local.y;
  goal.pose.heading = WrapAngle(world_heading - ego.heading);
  return goal;
}

ReferencePath InjectReferenceNoise(const ReferencePath& path, double bound,
                                   std::mt19937_64& rng) {
  if (!(bound >= 0)) throw std::invalid_argument("noise bound must be >= 0");
  ReferencePath out = path;
  if (bound == 0.0) return out;
  std::uniform_real_distribution<double> noise(-bound, bound);
  for (double& y : out.y) y += noise(rng);
  return out;
}

ReferencePath InjectReferenceNoise(const ReferencePath& path, double bound,
                                   std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return InjectReferenceNoise(path, bound, rng);
}

ReferencePath BuildReference(const PoseBoundary& goal, double ds, int n_steps,
                             int n_samples) {
  const std::vector<Point2> curve =
      QuinticHermite(PoseBoundary{}, goal, n_samples);
  ReferencePath ref = ResampleToSteps(curve, ds, n_steps);
  ref.source_goal = goal;
  return ref;
}

std::vector<Point2> ReadRoute(std::istream& in) {
  std::vector<Point2> route;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    Point2 p;
    std::string extra;
    if (!(fields >> p.x >> p.y) || (fields >> extra) || !std::isfinite(p.x) ||
        !std::isfinite(p.y)) {
      throw ConfigError("route: expected 'x y' pair", {}, line_no);
    }
    route.push_back(p);
  }
  if (route.empty()) throw ConfigError("route: no points", {}, line_no);
  return route;
}

void WriteRoute(std::ostream& out, std::span<const Point2> route) {
  for (const Point2& p : route) {
    out << FormatDouble(p.x) << ' ' << FormatDouble(p.y) << '\n';
  }
}

std::vector<Point2> LoadRoute(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open route file " + path);
  return ReadRoute(in);
}

}  // namespace onrap
