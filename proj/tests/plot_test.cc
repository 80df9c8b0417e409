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

#include "onrap/plot.h"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <vector>

#include "gtest/gtest.h"

namespace onrap {
namespace {

// Oracle: bin of v is floor(v / width) relative to the first bin.
std::vector<int> OracleCounts(const std::vector<double>& v, double width) {
  long lo = std::lround(std::floor(v[0] / width)), hi = lo;
  for (double x : v) {
    lo = std::min<long>(lo, std::lround(std::floor(x / width)));
    hi = std::max<long>(hi, std::lround(std::floor(x / width)));
  }
  std::vector<int> counts(hi - lo + 1, 0);
  for (double x : v) ++counts[std::lround(std::floor(x / width)) - lo];
  return counts;
}

TEST(HistogramTest, HandCounts) {
  const std::vector<double> v{0.05, 0.12, 0.19, 0.31, -0.02};
  const HistogramBins b = MakeHistogram(v, 0.1);
  EXPECT_DOUBLE_EQ(b.lo, -0.1);
  EXPECT_EQ(b.counts, (std::vector<int>{1, 1, 2, 0, 1}));
  EXPECT_EQ(b.first_nonempty(), 0);
}

TEST(HistogramTest, NonFiniteSkipped) {
  const double inf = std::numeric_limits<double>::infinity();
  const std::vector<double> v{inf, 1.0, std::nan("")};
  const HistogramBins b = MakeHistogram(v, 0.5);
  EXPECT_EQ(b.non_finite, 2);
  EXPECT_EQ(b.counts, (std::vector<int>{1}));
  EXPECT_DOUBLE_EQ(b.lo, 1.0);
  const std::vector<double> none{inf};
  EXPECT_TRUE(MakeHistogram(none, 0.5).counts.empty());
  EXPECT_EQ(MakeHistogram(none, 0.5).first_nonempty(), -1);
}

TEST(HistogramTest, MatchesOracleAndContainsMinimum) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.3, 7.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(1 + trial * 7);
    for (double& x : v) x = u(rng);
    const double width = 0.05 + 0.01 * trial;
    const HistogramBins b = MakeHistogram(v, width);
    EXPECT_EQ(b.counts, OracleCounts(v, width));
    const double min = *std::min_element(v.begin(), v.end());
    const int first = b.first_nonempty();
    EXPECT_LE(b.left(first), min);
    EXPECT_GT(b.left(first + 1), min);
  }
}

TEST(PlotTest, HistogramSvgIsWellFormed) {
  const std::vector<HistogramSeries> s{{"onrap", {0.9, 1.2, 2.5}},
                                       {"a<b", {0.4}}};
  std::ostringstream out;
  WriteHistogramSvg(out, "Clearance", "m", s, 0.25);
  const std::string svg = out.str();
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_NE(svg.find("a&lt;b"), std::string::npos);
}

TEST(PlotTest, OverlayDrawsTraceAndCells) {
  EpisodeTrace trace;
  trace.traversed = {{0, 0, 0}, {1, 0, 0}, {2, 0.5, 0}};
  CycleRecord c;
  c.planned = {{0, 0}, {1, 0.1}, {2, 0.3}};
  c.reference = {{0, 0}, {2, 0}};
  trace.cycles.push_back(c);
  OverlayInput in;
  in.title = "t";
  in.route = {{0, 0}, {5, 0}};
  in.scene.points = {{3, 1}};
  in.trace = &trace;
  EgoGrid g(GridSpec{5, 5, 0.5, 2, 2});
  g.set(0, 0, 1.0);
  in.grids.push_back({Pose2{}, g});
  std::ostringstream out;
  WriteOverlaySvg(out, in);
  const std::string svg = out.str();
  EXPECT_NE(svg.find("<circle"), std::string::npos);
  EXPECT_NE(svg.find("#e377c2\" fill-opacity"), std::string::npos);
  // route, reference, planned, traversed
  std::size_t lines = 0;
  for (std::size_t p = svg.find("<polyline"); p != std::string::npos;
       p = svg.find("<polyline", p + 1)) {
    ++lines;
  }
  EXPECT_EQ(lines, 4u);
}

}  // namespace
}  // namespace onrap
