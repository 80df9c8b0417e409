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

// Static SVG plots: trajectory overlays and histograms of clearance and
// solve time.

#ifndef ONRAP_PLOT_H_
#define ONRAP_PLOT_H_

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "onrap/simulator.h"

namespace onrap {

struct HistogramBins {
  double lo = 0.0;     // left edge of bin 0
  double width = 1.0;  // bin width
  std::vector<int> counts;
  int non_finite = 0;  // values left out (inf / nan)

  double left(int i) const { return lo + i * width; }
  /// Index of the first non-empty bin, or -1.
  int first_nonempty() const;
};

/// Bins aligned to multiples of `width` covering every finite value.
HistogramBins MakeHistogram(std::span<const double> values, double width);

struct HistogramSeries {
  std::string label;
  std::vector<double> values;
};

void WriteHistogramSvg(std::ostream& out, const std::string& title,
                       const std::string& x_label,
                       std::span<const HistogramSeries> series,
                       double bin_width);

/// Occupied cells of one ego grid, placed in the world at `pose`.
struct PlacedGrid {
  Pose2 pose;
  EgoGrid grid;
};

struct OverlayInput {
  std::string title;
  std::vector<Point2> route;
  WorldScene scene;
  const EpisodeTrace* trace = nullptr;
  std::vector<PlacedGrid> grids;
};

/// Route, obstacles, occupied cells, references, planned paths and the
/// traversed path in world coordinates.
void WriteOverlaySvg(std::ostream& out, const OverlayInput& input);

}  // namespace onrap

#endif  // ONRAP_PLOT_H_
