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

#include "onrap/simulator.h"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <istream>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "onrap/errors.h"
#include "onrap/grid_io.h"
#include "onrap/reference.h"

namespace onrap {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t Fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double Distance(const Point2& a, const Point2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

double Uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Uniform over the disk of the given radius; two draws.
Point2 DiskSample(std::mt19937_64& rng, double radius) {
  const double r = radius * std::sqrt(Uniform(rng, 0.0, 1.0));
  const double a = 2.0 * std::numbers::pi * Uniform(rng, 0.0, 1.0);
  return {r * std::cos(a), r * std::sin(a)};
}

// Start point followed by arc-length samples of the polyline.
std::vector<Point2> EvenlySpaced(std::span<const Point2> dense,
                                 double spacing) {
  std::vector<Point2> out{dense.front()};
  const std::vector<Point2> rest = ResampleByArcLength(dense, spacing);
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

double ArcLength(std::span<const Point2> polyline) {
  double len = 0.0;
  for (std::size_t i = 1; i < polyline.size(); ++i) {
    len += Distance(polyline[i - 1], polyline[i]);
  }
  return len;
}

// Point and unit normal (left) at arc length s.
std::pair<Point2, Point2> RouteAt(std::span<const Point2> route, double s) {
  for (std::size_t i = 1; i < route.size(); ++i) {
    const double seg = Distance(route[i - 1], route[i]);
    if (seg <= 0.0) continue;
    if (s <= seg || i + 1 == route.size()) {
      const double t = std::clamp(s / seg, 0.0, 1.0);
      const double tx = (route[i].x - route[i - 1].x) / seg;
      const double ty = (route[i].y - route[i - 1].y) / seg;
      return {{route[i - 1].x + t * (route[i].x - route[i - 1].x),
               route[i - 1].y + t * (route[i].y - route[i - 1].y)},
              {-ty, tx}};
    }
    s -= seg;
  }
  return {route.front(), {0.0, 1.0}};
}

std::size_t ClosestIndex(std::span<const Point2> route, const Point2& p,
                         std::size_t from, std::size_t window) {
  const std::size_t lo = from > window ? from - window : 0;
  const std::size_t hi = std::min(route.size(), from + window + 1);
  std::size_t best = lo;
  double best_d = kInf;
  for (std::size_t i = lo; i < hi; ++i) {
    const double d = Distance(route[i], p);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

// Straight-line fallback when the quintic segment cannot be built.
ReferencePath LinearReference(const PoseBoundary& goal, double ds,
                              int n_steps) {
  ReferencePath ref;
  ref.ds = ds;
  ref.source_goal = goal;
  ref.y.resize(n_steps + 1);
  for (int k = 0; k <= n_steps; ++k) {
    ref.y[k] = goal.y * std::min(1.0, k * ds / std::max(goal.x, ds));
  }
  return ref;
}

std::string Csv(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return FormatDouble(v);
}

class Stopwatch {
 public:
  explicit Stopwatch(bool enabled)
      : enabled_(enabled), start_(std::chrono::steady_clock::now()) {}
  double Seconds() const {
    if (!enabled_) return 0.0;
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  bool enabled_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

std::string ToString(PlannerKind kind) {
  switch (kind) {
    case PlannerKind::kOnrap: return "onrap";
    case PlannerKind::kAStar: return "astar";
    case PlannerKind::kRrtStar: return "rrtstar";
  }
  return "unknown";
}

PlannerKind ParsePlannerKind(const std::string& name) {
  std::string s;
  for (char c : name) {
    if (!std::isspace(static_cast<unsigned char>(c))) {
      s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  if (s == "onrap") return PlannerKind::kOnrap;
  if (s == "astar" || s == "a*") return PlannerKind::kAStar;
  if (s == "rrtstar" || s == "rrt*") return PlannerKind::kRrtStar;
  throw ConfigError("unknown planner '" + name + "'", "planners");
}

void ScenarioConfig::Validate() const {
  auto require = [](bool ok, const char* key, const std::string& what) {
    if (!ok) throw ConfigError(std::string(key) + ": " + what, key);
  };
  require(obstacle_density >= 0, "density", "must be >= 0");
  require(occupancy_noise >= 0, "occupancy_noise", "must be >= 0");
  require(reference_noise >= 0, "reference_noise", "must be >= 0");
  require(corridor_half_width >= 0, "corridor_half_width", "must be >= 0");
  require(lookahead > 0, "lookahead", "must be > 0");
  require(goal_heading_limit > 0, "goal_heading_limit", "must be > 0");
  require(corridor_sigma_multiple > 0, "corridor_sigma", "must be > 0");
  require(max_route_deviation > 0, "max_route_deviation", "must be > 0");
  require(dynamic_agents >= 0, "dynamic_agents", "must be >= 0");
  require(cycle_period > 0, "cycle_period", "must be > 0");
  require(flow_window >= 1, "window", "must be >= 1");
  require(route.spacing > 0, "spacing", "must be > 0");
  if (route.kind == RouteSpec::Kind::kSinusoid) {
    require(route.length > 0, "length", "must be > 0");
    require(route.wavelength > 0, "wavelength", "must be > 0");
  } else {
    require(!route.file.empty(), "route_file", "must name a file");
  }
  require(rrt.iterations >= 1, "rrt_iterations", "must be >= 1");
  require(rrt.step_size > 0, "rrt_step", "must be > 0");
  require(astar.inflation_radius >= 0, "astar_inflation", "must be >= 0");
  try {
    grid.Validate();
    grid.ValidateCovers(planner.horizon_length);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what(), "grid");
  }
  try {
    planner.Validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what(), "planner");
  }
  try {
    flow.Validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what(), "flow");
  }
}

double ScenarioConfig::EffectiveGoalClearance() const {
  if (goal_clearance > 0) return goal_clearance;
  return 0.5 * planner.geometry.width + grid.cell_size;
}

std::uint64_t SubstreamSeed(std::uint64_t seed, const std::string& purpose,
                            std::uint64_t index) {
  std::uint64_t h = SplitMix64(seed);
  h = SplitMix64(h ^ Fnv1a(purpose));
  return SplitMix64(h ^ index);
}

std::uint64_t EpisodeSeed(std::uint64_t global_seed, int episode) {
  return SubstreamSeed(global_seed, "episode",
                       static_cast<std::uint64_t>(episode));
}

std::vector<Point2> BuildRoute(const RouteSpec& spec) {
  std::vector<Point2> dense;
  if (spec.kind == RouteSpec::Kind::kFile) {
    dense = LoadRoute(spec.file);
    if (dense.size() < 2) {
      throw ConfigError("route file needs at least two points", "route_file");
    }
  } else {
    const int n = std::max(2, static_cast<int>(std::ceil(spec.length / 0.01)));
    dense.reserve(n + 1);
    for (int i = 0; i <= n; ++i) {
      const double x = spec.length * i / n;
      dense.push_back(
          {x, spec.amplitude *
                  std::sin(2.0 * std::numbers::pi * x / spec.wavelength)});
    }
  }
  return EvenlySpaced(dense, spec.spacing);
}

WorldScene BuildScene(const ScenarioConfig& config,
                      const std::vector<Point2>& route, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  WorldScene scene;
  const double length = ArcLength(route);
  const double w = config.corridor_half_width;
  const int count = static_cast<int>(
      std::lround(config.obstacle_density * length * 2.0 * w));
  const Point2 start = route.front();
  auto draw = [&](double s_lo) {
    Point2 p;
    for (int attempt = 0; attempt < 1000; ++attempt) {
      const double s = Uniform(rng, s_lo, length);
      const double offset = Uniform(rng, -w, w);
      const auto [c, n] = RouteAt(route, s);
      p = {c.x + offset * n.x, c.y + offset * n.y};
      if (Distance(p, start) >= config.start_clearance) break;
    }
    return p;
  };
  for (int i = 0; i < count; ++i) scene.points.push_back(draw(0.0));
  for (int i = 0; i < config.dynamic_agents; ++i) {
    DynamicAgent agent;
    agent.position = draw(length / 3.0);
    const double a = Uniform(rng, 0.0, 2.0 * std::numbers::pi);
    agent.velocity = {config.agent_speed * std::cos(a),
                      config.agent_speed * std::sin(a)};
    scene.agents.push_back(agent);
  }
  return scene;
}

bool SuccessOf(std::span<const double> clearances, double ego_width) {
  if (clearances.empty()) return false;
  return std::all_of(clearances.begin(), clearances.end(),
                     [&](double c) { return c > 0.5 * ego_width; });
}

std::vector<double> DiscreteCurvature(std::span<const Point2> polyline) {
  std::vector<Point2> pts;
  for (const Point2& p : polyline) {
    if (!pts.empty() && Distance(pts.back(), p) <= 1e-12) continue;
    pts.push_back(p);
  }
  std::vector<double> out;
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    const Point2& a = pts[i - 1];
    const Point2& b = pts[i];
    const Point2& c = pts[i + 1];
    const double cross =
        (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    const double denom = Distance(a, b) * Distance(b, c) * Distance(a, c);
    out.push_back(denom > 0 ? 2.0 * std::abs(cross) / denom : 0.0);
  }
  return out;
}

EpisodeMetrics ComputeMetrics(const EpisodeTrace& trace, double ego_width,
                              bool planner_failed) {
  EpisodeMetrics m;
  int solved = 0;
  double total = 0.0;
  for (const CycleRecord& c : trace.cycles) {
    if (c.status.empty()) continue;
    ++solved;
    total += c.solve_time_s;
    m.runtime_max_s = std::max(m.runtime_max_s, c.solve_time_s);
  }
  m.runtime_mean_s = solved > 0 ? total / solved : 0.0;
  m.success = !planner_failed && trace.outcome == "completed" &&
              SuccessOf(trace.clearances, ego_width);
  if (!trace.clearances.empty()) {
    m.min_dist_m = *std::min_element(trace.clearances.begin(),
                                     trace.clearances.end());
    double sum = 0.0;
    for (double c : trace.clearances) sum += c;
    m.avg_dist_m = sum / trace.clearances.size();
  }
  std::vector<Point2> pts;
  pts.reserve(trace.traversed.size());
  for (const Pose2& p : trace.traversed) pts.push_back({p.x, p.y});
  const std::vector<double> curv = DiscreteCurvature(pts);
  for (double k : curv) m.max_curv_inv_m = std::max(m.max_curv_inv_m, k);
  m.path_len_m = ArcLength(pts);
  return m;
}

EpisodeResult RunEpisode(const ScenarioConfig& config, PlannerKind planner,
                         std::uint64_t episode_seed,
                         const EpisodeOptions& options) {
  config.Validate();
  const PlannerParams& base = config.planner;
  const double ds = base.ds;
  const int n_steps = base.n_steps();
  const GridSpec& spec = config.grid;

  EpisodeResult result;
  EpisodeTrace& trace = result.trace;
  trace.route = BuildRoute(config.route);
  trace.scene =
      BuildScene(config, trace.route, SubstreamSeed(episode_seed, "scene"));
  WorldScene scene = trace.scene;
  const std::vector<Point2>& route = trace.route;

  // The goal search runs on the route extended past its end so the local
  // goal stays a full lookahead away on the final approach.
  std::vector<Point2> extended = route;
  {
    const Point2& a = route[route.size() - 2];
    const Point2& b = route.back();
    const double seg = std::max(Distance(a, b), 1e-9);
    const double ux = (b.x - a.x) / seg, uy = (b.y - a.y) / seg;
    const double spacing = config.route.spacing;
    const int extra =
        static_cast<int>(std::ceil((config.lookahead + 2 * spacing) / spacing));
    for (int i = 1; i <= extra; ++i) {
      extended.push_back({b.x + i * spacing * ux, b.y + i * spacing * uy});
    }
  }

  std::mt19937_64 occupancy_rng(SubstreamSeed(episode_seed, "occupancy"));
  std::mt19937_64 goal_rng(SubstreamSeed(episode_seed, "route_noise"));
  std::mt19937_64 reference_rng(SubstreamSeed(episode_seed, "reference"));

  Pose2 pose{route[0].x, route[0].y,
             std::atan2(route[1].y - route[0].y, route[1].x - route[0].x)};
  const std::size_t last = route.size() - 1;
  const std::size_t search_window = static_cast<std::size_t>(
      std::ceil(2.0 * config.lookahead / config.route.spacing)) + 4;
  // Baselines may advance a single cell per cycle.
  const int max_cycles = static_cast<int>(std::ceil(
      2.0 * ArcLength(route) / std::min(ds, spec.cell_size))) + 20;

  std::optional<ControlSequence> warm;
  // Flow state, kept in the frame of the previous pose.
  std::optional<EgoGrid> prev_grid;
  Pose2 prev_pose;
  FlowField flow(spec.n_rows, spec.n_cols, config.flow);
  std::vector<FlowField> flow_history;
  const bool use_flow =
      config.flow_enabled && planner == PlannerKind::kOnrap;

  bool planner_failed = false;
  std::size_t progress = 0;
  for (int cycle = 0;; ++cycle) {
    const Point2 here{pose.x, pose.y};
    trace.traversed.push_back(pose);
    trace.clearances.push_back(scene.Clearance(here));

    progress = ClosestIndex(route, here, progress, search_window);
    if (progress == last || Distance(here, route.back()) < ds) {
      trace.outcome = "completed";
      break;
    }
    if (Distance(here, route[progress]) > config.max_route_deviation) {
      trace.outcome = "off_route";
      break;
    }
    if (cycle >= max_cycles) {
      trace.outcome = "timeout";
      break;
    }

    CycleRecord rec;
    rec.cycle = cycle;
    rec.pose = pose;
    rec.clearance = trace.clearances.back();

    EgoGrid grid = ProjectToEgo(scene, pose, spec, config.occupancy_noise,
                                occupancy_rng);

    // Local goal: a point of the noisy route, clamped to a drivable heading
    // and kept ahead of the ego.
    const LocalGoal local = SelectLocalGoal(
        std::span<const Point2>(extended).subspan(
            progress, std::min(extended.size() - progress,
                               search_window + 1)),
        pose, config.lookahead);
    PoseBoundary goal = local.pose;
    if (config.reference_noise > 0) {
      const Point2 d = DiskSample(goal_rng, config.reference_noise);
      goal.x += d.x;
      goal.y += d.y;
    }
    goal.heading = std::clamp(goal.heading, -config.goal_heading_limit,
                              config.goal_heading_limit);
    goal.x = std::max(goal.x, 2.0 * ds);

    Pose2 next = pose;
    if (planner == PlannerKind::kOnrap) {
      ReferencePath ref;
      try {
        ref = BuildReference(goal, ds, n_steps);
      } catch (const std::invalid_argument&) {
        ref = LinearReference(goal, ds, n_steps);
      }
      if (config.reference_noise > 0) {
        ref = InjectReferenceNoise(ref, config.reference_noise,
                                   reference_rng);
      }
      PlannerParams params = base;
      const double band = config.corridor_sigma_multiple * base.risk.sigma;
      params.y_lb_steps.resize(n_steps + 1);
      params.y_ub_steps.resize(n_steps + 1);
      for (int k = 0; k <= n_steps; ++k) {
        params.y_lb_steps[k] = ref.y[k] - band;
        params.y_ub_steps[k] = ref.y[k] + band;
      }

      std::vector<EgoGrid> predicted;
      if (use_flow) {
        if (prev_grid) {
          const EgoGrid warped = WarpToPose(*prev_grid, prev_pose, pose);
          flow = WarpToPose(flow, spec, prev_pose, pose);
          for (FlowField& f : flow_history) {
            f = WarpToPose(f, spec, prev_pose, pose);
          }
          flow = FlowUpdate(flow, FlowMeasure(warped, grid, flow));
          flow_history.push_back(flow);
          if (static_cast<int>(flow_history.size()) > config.flow_window) {
            flow_history.erase(flow_history.begin());
          }
        }
        prev_grid = grid;
        prev_pose = pose;
        if (!flow_history.empty()) {
          const FlowField smooth =
              FlowSmooth(flow_history, config.flow_window);
          predicted.reserve(n_steps + 1);
          for (int k = 0; k <= n_steps; ++k) {
            predicted.push_back(PredictOccupancy(grid, smooth, k));
          }
        }
      }

      if (options.diagnostics) params.solver.record_history = true;
      PlanResult plan;
      const Stopwatch timer(options.measure_time);
      try {
        plan = predicted.empty()
                   ? Plan(PlanarState{}, grid, ref, params, warm)
                   : Plan(PlanarState{}, std::span<const EgoGrid>(predicted),
                          ref, params, warm);
      } catch (const std::exception& e) {
        rec.status = "error";
        trace.cycles.push_back(std::move(rec));
        trace.outcome = std::string("planner_error: ") + e.what();
        planner_failed = true;
        break;
      }
      rec.solve_time_s = timer.Seconds();
      rec.status = ToString(plan.status);
      rec.hard_feasible = IsHardFeasible(plan, params);
      if (options.diagnostics) {
        const RiskField field =
            predicted.empty()
                ? RiskField::FromGrid(grid, ds, n_steps)
                : RiskField::FromGrids(predicted, ds, n_steps);
        std::ostringstream csv;
        WriteDiagnosticsCsv(csv, plan, PlanarState{}, field, ref, params);
        rec.diagnostics = csv.str();
      }
      for (const PlanarState& s : plan.states) {
        rec.planned.push_back(EgoToWorld(pose, {s.x, s.y}));
      }
      for (int k = 0; k <= n_steps; ++k) {
        rec.reference.push_back(EgoToWorld(pose, {ref.x(k), ref.y[k]}));
      }
      rec.goal = EgoToWorld(pose, {goal.x, goal.y});
      warm = WarmStartShift(plan);
      const Point2 p = rec.planned[1];
      next = {p.x, p.y, pose.heading + plan.states[1].heading};
    } else {
      const double radius = planner == PlannerKind::kAStar
                                ? config.astar.inflation_radius
                                : config.rrt.inflation_radius;
      Point2 target;
      const Stopwatch validation(options.measure_time);
      try {
        target = ValidateGoal(grid, {goal.x, goal.y},
                              config.EffectiveGoalClearance());
      } catch (const GoalValidationError& e) {
        rec.goal_validation_s = validation.Seconds();
        rec.status = "goal_invalid";
        trace.cycles.push_back(std::move(rec));
        trace.outcome = "goal_invalid";
        planner_failed = true;
        break;
      }
      rec.goal_validation_s = validation.Seconds();
      rec.goal = EgoToWorld(pose, target);

      BaselinePath path;
      const Stopwatch timer(options.measure_time);
      if (planner == PlannerKind::kAStar) {
        path = AStarPlan(grid, {0, 0}, target, config.astar);
      } else {
        RrtStarOptions rrt = config.rrt;
        rrt.seed = SubstreamSeed(episode_seed, "rrt", cycle);
        path = RrtStarPlan(grid, {0, 0}, target, rrt);
      }
      rec.solve_time_s = timer.Seconds();
      rec.status = ToString(path.status);
      if (path.status != BaselineStatus::kSuccess) {
        trace.outcome = rec.status;
        trace.cycles.push_back(std::move(rec));
        planner_failed = true;
        break;
      }
      rec.hard_feasible = PathAvoidsInflated(grid, path.points, radius);
      for (const Point2& q : path.points) {
        rec.planned.push_back(EgoToWorld(pose, q));
      }
      // Like ONRAP, the ego moves to the first planned point after the
      // start, whatever its distance. A point robot has no heading of its
      // own; its grid frame follows the route tangent.
      const Point2 step =
          path.points.size() > 1 ? path.points[1] : path.points.back();
      const Point2 p = EgoToWorld(pose, step);
      const std::size_t at = ClosestIndex(route, p, progress, search_window);
      const std::size_t a = std::min(at, last - 1);
      const double heading = std::atan2(route[a + 1].y - route[a].y,
                                        route[a + 1].x - route[a].x);
      next = {p.x, p.y, heading};
    }

    if (options.keep_grids) rec.grid = std::move(grid);
    trace.cycles.push_back(std::move(rec));
    pose = next;
    scene.AdvanceAgents(config.cycle_period);
  }

  result.metrics =
      ComputeMetrics(trace, base.geometry.width, planner_failed);
  return result;
}

std::vector<EpisodeRow> RunMonteCarlo(const ScenarioConfig& config,
                                      const MonteCarloOptions& options) {
  if (options.episodes < 1) {
    throw ConfigError("episodes must be >= 1", "episodes");
  }
  if (options.planners.empty()) {
    throw ConfigError("no planners selected", "planners");
  }
  config.Validate();
  const std::size_t n_planners = options.planners.size();
  const std::size_t n_jobs =
      static_cast<std::size_t>(options.episodes) * n_planners;
  std::vector<EpisodeRow> rows(n_jobs);
  std::atomic<std::size_t> next{0};
  std::mutex callback_mutex;

  auto worker = [&]() {
    for (std::size_t job = next++; job < n_jobs; job = next++) {
      EpisodeRow& row = rows[job];
      row.episode = static_cast<int>(job / n_planners);
      row.planner = options.planners[job % n_planners];
      row.seed = EpisodeSeed(options.seed, row.episode);
      EpisodeResult result;
      try {
        result = RunEpisode(config, row.planner, row.seed, options.episode);
        row.metrics = result.metrics;
        row.outcome = result.trace.outcome;
      } catch (const std::exception& e) {
        row.metrics = EpisodeMetrics{};
        row.outcome = std::string("error: ") + e.what();
      }
      if (options.on_episode) {
        std::lock_guard<std::mutex> lock(callback_mutex);
        options.on_episode(row, result);
      }
    }
  };

  const int threads = std::clamp(options.threads, 1,
                                 static_cast<int>(std::min<std::size_t>(
                                     n_jobs, 256)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  return rows;
}

std::vector<PlannerAggregate> Aggregate(const std::vector<EpisodeRow>& rows) {
  // Sum in (planner, episode) order so the result does not depend on the
  // order of `rows`.
  std::vector<const EpisodeRow*> sorted;
  for (const EpisodeRow& r : rows) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const EpisodeRow* a, const EpisodeRow* b) {
                     if (a->planner != b->planner) {
                       return a->planner < b->planner;
                     }
                     return a->episode < b->episode;
                   });
  std::vector<PlannerAggregate> out;
  std::size_t i = 0;
  while (i < sorted.size()) {
    PlannerAggregate agg;
    agg.planner = sorted[i]->planner;
    int successes = 0, n_min = 0, n_avg = 0;
    for (; i < sorted.size() && sorted[i]->planner == agg.planner; ++i) {
      const EpisodeMetrics& m = sorted[i]->metrics;
      ++agg.episodes;
      agg.runtime_mean_s += m.runtime_mean_s;
      agg.runtime_max_s += m.runtime_max_s;
      successes += m.success ? 1 : 0;
      if (std::isfinite(m.min_dist_m)) {
        agg.min_dist_m += m.min_dist_m;
        ++n_min;
      }
      if (std::isfinite(m.avg_dist_m)) {
        agg.avg_dist_m += m.avg_dist_m;
        ++n_avg;
      }
      agg.max_curv_inv_m += m.max_curv_inv_m;
      agg.path_len_m += m.path_len_m;
    }
    const double n = agg.episodes;
    agg.runtime_mean_s /= n;
    agg.runtime_max_s /= n;
    agg.success_rate = successes / n;
    agg.min_dist_m = n_min > 0 ? agg.min_dist_m / n_min : kInf;
    agg.avg_dist_m = n_avg > 0 ? agg.avg_dist_m / n_avg : kInf;
    agg.max_curv_inv_m /= n;
    agg.path_len_m /= n;
    out.push_back(agg);
  }
  return out;
}

void WriteMetricsCsv(std::ostream& out, const std::vector<EpisodeRow>& rows,
                     bool include_runtime) {
  out << "episode,planner,seed,runtime_mean_s,runtime_max_s,success,"
         "min_dist_m,avg_dist_m,max_curv_inv_m,path_len_m\n";
  for (const EpisodeRow& r : rows) {
    const EpisodeMetrics& m = r.metrics;
    out << r.episode << ',' << ToString(r.planner) << ',' << r.seed << ','
        << (include_runtime ? Csv(m.runtime_mean_s) : "NA") << ','
        << (include_runtime ? Csv(m.runtime_max_s) : "NA") << ','
        << (m.success ? 1 : 0) << ',' << Csv(m.min_dist_m) << ','
        << Csv(m.avg_dist_m) << ',' << Csv(m.max_curv_inv_m) << ','
        << Csv(m.path_len_m) << '\n';
  }
}

void WriteSummary(std::ostream& out,
                  const std::vector<PlannerAggregate>& aggregates) {
  auto num = [](double v, int precision) {
    if (std::isinf(v)) return std::string("inf");
    std::ostringstream s;
    s << std::fixed << std::setprecision(precision) << v;
    return s.str();
  };
  out << std::left << std::setw(16) << "Metric";
  for (const PlannerAggregate& a : aggregates) {
    out << std::right << std::setw(12) << ToString(a.planner);
  }
  out << '\n';
  auto line = [&](const char* name, auto get, int precision) {
    out << std::left << std::setw(16) << name;
    for (const PlannerAggregate& a : aggregates) {
      out << std::right << std::setw(12) << num(get(a), precision);
    }
    out << '\n';
  };
  line("Runtime (s)", [](const PlannerAggregate& a) { return a.runtime_mean_s; }, 4);
  line("Success (%)", [](const PlannerAggregate& a) { return 100 * a.success_rate; }, 1);
  line("Min Dist (m)", [](const PlannerAggregate& a) { return a.min_dist_m; }, 3);
  line("Avg Dist (m)", [](const PlannerAggregate& a) { return a.avg_dist_m; }, 3);
  line("Max Curv (1/m)", [](const PlannerAggregate& a) { return a.max_curv_inv_m; }, 3);
  line("Path Len (m)", [](const PlannerAggregate& a) { return a.path_len_m; }, 3);

  for (const PlannerAggregate& a : aggregates) {
    out << "\n[" << ToString(a.planner) << "]\n"
        << "episodes = " << a.episodes << '\n'
        << "runtime_mean_s = " << Csv(a.runtime_mean_s) << '\n'
        << "runtime_max_s = " << Csv(a.runtime_max_s) << '\n'
        << "success_rate = " << Csv(a.success_rate) << '\n'
        << "min_dist_m = " << Csv(a.min_dist_m) << '\n'
        << "avg_dist_m = " << Csv(a.avg_dist_m) << '\n'
        << "max_curv_inv_m = " << Csv(a.max_curv_inv_m) << '\n'
        << "path_len_m = " << Csv(a.path_len_m) << '\n';
  }
}

void WriteTraceCsv(std::ostream& out, const EpisodeTrace& trace) {
  out << "cycle,x,y,heading,clearance_m,solve_time_s,goal_validation_s,"
         "status,goal_x,goal_y\n";
  for (const CycleRecord& c : trace.cycles) {
    out << c.cycle << ',' << Csv(c.pose.x) << ',' << Csv(c.pose.y) << ','
        << Csv(c.pose.heading) << ',' << Csv(c.clearance) << ','
        << Csv(c.solve_time_s) << ',' << Csv(c.goal_validation_s) << ','
        << c.status << ',' << Csv(c.goal.x) << ',' << Csv(c.goal.y) << '\n';
  }
  const std::size_t n =
      std::min(trace.traversed.size(), trace.clearances.size());
  for (std::size_t i = trace.cycles.size(); i < n; ++i) {
    const Pose2& p = trace.traversed[i];
    out << i << ',' << Csv(p.x) << ',' << Csv(p.y) << ',' << Csv(p.heading)
        << ',' << Csv(trace.clearances[i]) << ",,,end,,\n";
  }
}

namespace {

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream s(line);
  while (std::getline(s, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double CsvDouble(const std::string& field, const std::string& column,
                 int line_no) {
  // strtod accepts "inf" and "nan" as written by Csv().
  const char* begin = field.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (field.empty() || end != begin + field.size()) {
    throw ConfigError("line " + std::to_string(line_no) + ": bad " + column +
                          " value '" + field + "'",
                      column, line_no);
  }
  return v;
}

int CsvInt(const std::string& field, const std::string& column,
           int line_no) {
  const double v = CsvDouble(field, column, line_no);
  if (v != std::floor(v)) {
    throw ConfigError("line " + std::to_string(line_no) + ": bad " + column +
                          " value '" + field + "'",
                      column, line_no);
  }
  return static_cast<int>(v);
}

std::string StripCr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

EpisodeTrace ReadTraceCsv(std::istream& in) {
  static const char* kHeader =
      "cycle,x,y,heading,clearance_m,solve_time_s,goal_validation_s,status,"
      "goal_x,goal_y";
  std::string line;
  int line_no = 1;
  if (!std::getline(in, line) || StripCr(line) != kHeader) {
    throw ConfigError("line 1: expected trace header '" +
                          std::string(kHeader) + "'",
                      "", 1);
  }
  EpisodeTrace trace;
  while (std::getline(in, line)) {
    ++line_no;
    line = StripCr(line);
    if (line.empty()) continue;
    const std::vector<std::string> f = SplitCsv(line);
    if (f.size() != 10) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 10 "
                            "fields, got " + std::to_string(f.size()),
                        "", line_no);
    }
    const Pose2 pose{CsvDouble(f[1], "x", line_no),
                     CsvDouble(f[2], "y", line_no),
                     CsvDouble(f[3], "heading", line_no)};
    const double clearance = CsvDouble(f[4], "clearance_m", line_no);
    const int cycle = CsvInt(f[0], "cycle", line_no);
    trace.traversed.push_back(pose);
    trace.clearances.push_back(clearance);
    if (f[7] == "end") continue;
    if (trace.cycles.size() < trace.traversed.size() - 1) {
      throw ConfigError("line " + std::to_string(line_no) +
                            ": cycle row after an end row",
                        "", line_no);
    }
    CycleRecord rec;
    rec.cycle = cycle;
    rec.pose = pose;
    rec.clearance = clearance;
    rec.solve_time_s = CsvDouble(f[5], "solve_time_s", line_no);
    rec.goal_validation_s = CsvDouble(f[6], "goal_validation_s", line_no);
    rec.status = f[7];
    rec.goal = {CsvDouble(f[8], "goal_x", line_no),
                CsvDouble(f[9], "goal_y", line_no)};
    trace.cycles.push_back(std::move(rec));
  }
  if (trace.traversed.empty()) {
    throw ConfigError("line " + std::to_string(line_no) +
                          ": trace has no rows",
                      "", line_no);
  }
  return trace;
}

void WritePathsCsv(std::ostream& out, const EpisodeTrace& trace) {
  out << "cycle,kind,index,x,y\n";
  for (std::size_t i = 0; i < trace.traversed.size(); ++i) {
    out << "-1,traversed," << i << ',' << Csv(trace.traversed[i].x) << ','
        << Csv(trace.traversed[i].y) << '\n';
  }
  for (const CycleRecord& c : trace.cycles) {
    for (std::size_t i = 0; i < c.planned.size(); ++i) {
      out << c.cycle << ",planned," << i << ',' << Csv(c.planned[i].x) << ','
          << Csv(c.planned[i].y) << '\n';
    }
    for (std::size_t i = 0; i < c.reference.size(); ++i) {
      out << c.cycle << ",reference," << i << ',' << Csv(c.reference[i].x)
          << ',' << Csv(c.reference[i].y) << '\n';
    }
  }
}

void ReadPathsCsv(std::istream& in, EpisodeTrace& trace) {
  std::string line;
  int line_no = 1;
  if (!std::getline(in, line) || StripCr(line) != "cycle,kind,index,x,y") {
    throw ConfigError("line 1: expected paths header 'cycle,kind,index,x,y'",
                      "", 1);
  }
  std::vector<Point2> traversed;
  while (std::getline(in, line)) {
    ++line_no;
    line = StripCr(line);
    if (line.empty()) continue;
    const std::vector<std::string> f = SplitCsv(line);
    if (f.size() != 5) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 5 "
                            "fields, got " + std::to_string(f.size()),
                        "", line_no);
    }
    const int cycle = CsvInt(f[0], "cycle", line_no);
    const int index = CsvInt(f[2], "index", line_no);
    const Point2 p{CsvDouble(f[3], "x", line_no),
                   CsvDouble(f[4], "y", line_no)};
    std::vector<Point2>* target = nullptr;
    if (f[1] == "traversed") {
      target = &traversed;
    } else if (f[1] == "planned" || f[1] == "reference") {
      for (CycleRecord& c : trace.cycles) {
        if (c.cycle == cycle) {
          target = f[1] == "planned" ? &c.planned : &c.reference;
          break;
        }
      }
      if (target == nullptr) continue;  // cycle not in the trace
    } else {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown kind '" +
                            f[1] + "'",
                        "kind", line_no);
    }
    if (index != static_cast<int>(target->size())) {
      throw ConfigError("line " + std::to_string(line_no) +
                            ": index out of sequence",
                        "index", line_no);
    }
    target->push_back(p);
  }
  if (traversed.empty()) return;
  if (traversed.size() == trace.traversed.size()) {
    for (std::size_t i = 0; i < traversed.size(); ++i) {
      trace.traversed[i].x = traversed[i].x;
      trace.traversed[i].y = traversed[i].y;
    }
  } else {
    trace.traversed.clear();
    for (const Point2& p : traversed) trace.traversed.push_back({p.x, p.y, 0});
  }
}

void WriteScene(std::ostream& out, const WorldScene& scene) {
  for (const Point2& p : scene.points) {
    out << "point " << Csv(p.x) << ' ' << Csv(p.y) << '\n';
  }
  for (const AxisAlignedBox& b : scene.boxes) {
    out << "box " << Csv(b.min_x) << ' ' << Csv(b.min_y) << ' '
        << Csv(b.max_x) << ' ' << Csv(b.max_y) << '\n';
  }
  for (const DynamicAgent& a : scene.agents) {
    out << "agent " << Csv(a.position.x) << ' ' << Csv(a.position.y) << ' '
        << Csv(a.velocity.x) << ' ' << Csv(a.velocity.y) << '\n';
  }
}

WorldScene ReadScene(std::istream& in) {
  WorldScene scene;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream s(line);
    std::string kind;
    if (!(s >> kind)) continue;
    bool ok = false;
    if (kind == "point") {
      Point2 p;
      ok = static_cast<bool>(s >> p.x >> p.y);
      if (ok) scene.points.push_back(p);
    } else if (kind == "box") {
      AxisAlignedBox b;
      ok = static_cast<bool>(s >> b.min_x >> b.min_y >> b.max_x >> b.max_y);
      if (ok) scene.boxes.push_back(b);
    } else if (kind == "agent") {
      DynamicAgent a;
      ok = static_cast<bool>(s >> a.position.x >> a.position.y >>
                             a.velocity.x >> a.velocity.y);
      if (ok) scene.agents.push_back(a);
    }
    std::string rest;
    if (!ok || (s >> rest)) {
      throw ConfigError("scene line " + std::to_string(line_no) +
                            ": malformed entry",
                        "", line_no);
    }
  }
  try {
    scene.Validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("scene: ") + e.what());
  }
  return scene;
}

}  // namespace onrap
