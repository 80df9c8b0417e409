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

// Reference path generation: local goal selection on a (noisy) world route,
// a quintic Hermite segment from the ego to that goal, and resampling onto
// the planner's fixed longitudinal steps.

#ifndef ONRAP_REFERENCE_H_
#define ONRAP_REFERENCE_H_

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "onrap/occupancy.h"

namespace onrap {

struct PoseBoundary {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  // First-derivative magnitude at this end; <= 0 selects the longitudinal
  // separation between the two ends.
  double tangent_scale = 0.0;
  // Curvature imposed through the second derivative; 0 gives the natural
  // (zero second derivative) boundary.
  double curvature_hint = 0.0;
};

/// Samples the quintic Hermite segment uniformly in its parameter.
/// Throws std::invalid_argument when the goal is not strictly ahead of the
/// start (zero or negative longitudinal separation) or n_samples < 2.
std::vector<Point2> QuinticHermite(const PoseBoundary& start,
                                   const PoseBoundary& goal, int n_samples);

struct ReferencePath {
  double ds = 0.5;
  std::vector<double> y;  // y at x = k * ds, k = 0..N
  PoseBoundary source_goal;
  bool extrapolated = false;  // horizon ran past the end of the curve

  int n_steps() const { return static_cast<int>(y.size()) - 1; }
  double x(int k) const { return k * ds; }
};

/// Linear interpolation of the curve at x = 0, ds, ..., n_steps * ds.
/// Requires strictly increasing x. Points past the curve end continue the
/// last segment's slope and set `extrapolated`.
ReferencePath ResampleToSteps(std::span<const Point2> curve, double ds,
                              int n_steps);

struct LocalGoal {
  PoseBoundary pose;  // ego frame
  bool end_of_route = false;
  std::size_t route_index = 0;
};

/// Picks the route vertex whose arc length is nearest to `lookahead` past
/// the vertex closest to the ego. The heading is the chord direction over
/// +/- `chord_half_span` vertices. Result is expressed in the ego frame.
LocalGoal SelectLocalGoal(std::span<const Point2> route, const Pose2& ego,
                          double lookahead, int chord_half_span = 2);

/// Lateral-only bounded uniform perturbation of every waypoint.
ReferencePath InjectReferenceNoise(const ReferencePath& path, double bound,
                                   std::mt19937_64& rng);
ReferencePath InjectReferenceNoise(const ReferencePath& path, double bound,
                                   std::uint64_t seed);

/// Builds the stepped reference from the ego origin to `goal`.
ReferencePath BuildReference(const PoseBoundary& goal, double ds, int n_steps,
                             int n_samples = 200);

// Route files: one "x y" pair per line, '#' comments allowed.
std::vector<Point2> ReadRoute(std::istream& in);
void WriteRoute(std::ostream& out, std::span<const Point2> route);
std::vector<Point2> LoadRoute(const std::string& path);

}  // namespace onrap

#endif  // ONRAP_REFERENCE_H_
