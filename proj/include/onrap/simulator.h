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

// Closed-loop episodes: noisy grids and references, receding-horizon
// planning with ONRAP or a baseline, metrics over the traversed path, and
// Monte-Carlo orchestration over shared scenes.

#ifndef ONRAP_SIMULATOR_H_
#define ONRAP_SIMULATOR_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "onrap/baselines.h"
#include "onrap/occupancy.h"
#include "onrap/planner.h"

namespace onrap {

enum class PlannerKind { kOnrap, kAStar, kRrtStar };

std::string ToString(PlannerKind kind);
/// Accepts "onrap", "astar", "rrtstar" (case-insensitive, also "a*" and
/// "rrt*"). Throws ConfigError otherwise.
PlannerKind ParsePlannerKind(const std::string& name);

struct RouteSpec {
  enum class Kind { kSinusoid, kFile };
  Kind kind = Kind::kSinusoid;
  double amplitude = 4.0;    // [m]
  double wavelength = 50.0;  // [m]
  double length = 60.0;      // longitudinal extent [m]
  double spacing = 0.5;      // vertex spacing along the arc [m]
  std::string file;          // for Kind::kFile
};

struct ScenarioConfig {
  RouteSpec route;
  double obstacle_density = 1.0 / 15.0;  // obstacles per m^2
  double corridor_half_width = 5.0;      // obstacle band around the route
  double start_clearance = 3.0;          // no obstacles this close to start
  double occupancy_noise = 0.3;          // [m]
  double reference_noise = 0.3;          // [m]
  double lookahead = 10.0;               // local goal distance [m]
  double goal_heading_limit = 1.0;       // ego-frame clamp [rad]
  double corridor_sigma_multiple = 2.5;  // y bounds: reference +/- k sigma
  double max_route_deviation = 10.0;     // abort threshold [m]
  int dynamic_agents = 0;
  double agent_speed = 1.0;   // [m/s]
  double cycle_period = 0.1;  // [s]

  GridSpec grid;
  PlannerParams planner;  // also holds the ego geometry
  bool flow_enabled = false;
  FlowParams flow;
  int flow_window = 1;

  AStarOptions astar;
  RrtStarOptions rrt;  // seed is replaced per cycle
  // Goal clearance for the baselines' pre-validated goal; <= 0 selects
  // ego_width / 2 + cell_size so the goal cell itself is never inflated.
  double goal_clearance = 0.0;

  /// Throws ConfigError naming the offending field.
  void Validate() const;
  double EffectiveGoalClearance() const;
};

struct EpisodeMetrics {
  double runtime_mean_s = 0.0;
  double runtime_max_s = 0.0;
  bool success = false;
  double min_dist_m = std::numeric_limits<double>::infinity();
  double avg_dist_m = std::numeric_limits<double>::infinity();
  double max_curv_inv_m = 0.0;
  double path_len_m = 0.0;
};

struct CycleRecord {
  int cycle = 0;
  Pose2 pose;             // world pose at the start of the cycle
  double clearance = 0;   // true clearance at `pose`
  double solve_time_s = 0;
  double goal_validation_s = 0;  // baselines only
  std::string status;     // planner status string
  Point2 goal;            // world frame (validated goal for baselines)
  std::vector<Point2> planned;    // world frame
  std::vector<Point2> reference;  // world frame (ONRAP only)
  bool hard_feasible = true;      // plan passed the hard-constraint audit
  std::optional<EgoGrid> grid;    // kept when requested
  std::string diagnostics;        // per-iteration solver CSV, on request
};

struct EpisodeTrace {
  std::vector<Point2> route;
  WorldScene scene;  // initial scene
  std::vector<CycleRecord> cycles;
  std::vector<Pose2> traversed;  // every pose, including the final one
  std::vector<double> clearances;  // true clearance at each traversed pose
  std::string outcome;           // "completed" or the failure cause
};

struct EpisodeOptions {
  bool keep_grids = false;
  bool measure_time = true;  // false: solve times are reported as 0
  bool diagnostics = false;  // ONRAP only: fill CycleRecord::diagnostics
};

struct EpisodeResult {
  EpisodeMetrics metrics;
  EpisodeTrace trace;
};

/// Deterministic 64-bit substream seed for (seed, purpose, index).
std::uint64_t SubstreamSeed(std::uint64_t seed, const std::string& purpose,
                            std::uint64_t index = 0);
/// Per-episode seed derived from the global seed.
std::uint64_t EpisodeSeed(std::uint64_t global_seed, int episode);

/// Route vertices for the scenario (file or sinusoid), evenly spaced.
std::vector<Point2> BuildRoute(const RouteSpec& spec);
/// Randomized static obstacles (and agents) around the route.
WorldScene BuildScene(const ScenarioConfig& config,
                      const std::vector<Point2>& route, std::uint64_t seed);

EpisodeResult RunEpisode(const ScenarioConfig& config, PlannerKind planner,
                         std::uint64_t episode_seed,
                         const EpisodeOptions& options = {});

/// True iff every clearance is strictly greater than ego_width / 2.
bool SuccessOf(std::span<const double> clearances, double ego_width);

/// Menger curvature of consecutive triples; endpoints excluded. Duplicate
/// consecutive points are dropped first.
std::vector<double> DiscreteCurvature(std::span<const Point2> polyline);

EpisodeMetrics ComputeMetrics(const EpisodeTrace& trace, double ego_width,
                              bool planner_failed);

struct EpisodeRow {
  int episode = 0;
  PlannerKind planner = PlannerKind::kOnrap;
  std::uint64_t seed = 0;
  EpisodeMetrics metrics;
  std::string outcome;
};

struct PlannerAggregate {
  PlannerKind planner = PlannerKind::kOnrap;
  int episodes = 0;
  double runtime_mean_s = 0, runtime_max_s = 0;
  double success_rate = 0;
  double min_dist_m = 0, avg_dist_m = 0;  // means over finite values
  double max_curv_inv_m = 0, path_len_m = 0;
};

struct MonteCarloOptions {
  int episodes = 100;
  std::vector<PlannerKind> planners{PlannerKind::kOnrap, PlannerKind::kAStar,
                                    PlannerKind::kRrtStar};
  std::uint64_t seed = 0;
  int threads = 1;
  EpisodeOptions episode;
  // Called once per finished episode (from worker threads, serialized).
  std::function<void(const EpisodeRow&, const EpisodeResult&)> on_episode;
};

/// Rows are ordered by episode, then by the order of `planners`.
std::vector<EpisodeRow> RunMonteCarlo(const ScenarioConfig& config,
                                      const MonteCarloOptions& options);

std::vector<PlannerAggregate> Aggregate(const std::vector<EpisodeRow>& rows);

// ---------------------------------------------------------------------------
// Output formats.

/// metrics.csv: header plus one row per episode and planner.
void WriteMetricsCsv(std::ostream& out, const std::vector<EpisodeRow>& rows,
                     bool include_runtime = true);
/// Per-planner text summary table.
void WriteSummary(std::ostream& out,
                  const std::vector<PlannerAggregate>& aggregates);

/// Trace CSV: one row per cycle, then one "end" row per pose reached after
/// the last cycle (timing and goal fields empty).
/// cycle,x,y,heading,clearance_m,solve_time_s,goal_validation_s,status,
/// goal_x,goal_y
void WriteTraceCsv(std::ostream& out, const EpisodeTrace& trace);
/// Inverse of WriteTraceCsv: fills cycles, traversed and clearances.
/// Throws ConfigError with the 1-based line for malformed rows and for a
/// trace without rows.
EpisodeTrace ReadTraceCsv(std::istream& in);
/// Companion CSV of planned and reference paths: cycle,kind,index,x,y
void WritePathsCsv(std::ostream& out, const EpisodeTrace& trace);
/// Reads a paths CSV into `trace`: replaces `traversed` positions (keeping
/// headings where the counts agree) and fills planned/reference paths of
/// matching cycles. Throws ConfigError with the line on malformed rows.
void ReadPathsCsv(std::istream& in, EpisodeTrace& trace);
/// Scene file: "point x y", "box x0 y0 x1 y1", "agent x y vx vy" lines.
void WriteScene(std::ostream& out, const WorldScene& scene);
WorldScene ReadScene(std::istream& in);

}  // namespace onrap

#endif  // ONRAP_SIMULATOR_H_
