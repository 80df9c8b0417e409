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

#include "commands.h"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <regex>
#include <sstream>
#include <thread>
#include <vector>

#include "onrap/config.h"
#include "onrap/errors.h"
#include "onrap/grid_io.h"
#include "onrap/plot.h"
#include "onrap/reference.h"
#include "onrap/simulator.h"

namespace onrap::cli {
namespace fs = std::filesystem;
namespace {

constexpr double kClearanceBin = 0.1;  // m
constexpr double kSolveTimeBin = 1.0;  // ms

// Thrown for unwritable outputs; reported with kExitError.
struct OutputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::ofstream OpenOut(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw OutputError("cannot write '" + path.string() + "'");
  return out;
}

void Close(std::ofstream& out, const fs::path& path) {
  out.close();
  if (!out) throw OutputError("error writing '" + path.string() + "'");
}

template <typename F>
void WriteFile(const fs::path& path, F&& write) {
  std::ofstream out = OpenOut(path);
  write(out);
  Close(out, path);
}

void ReportConfigError(const ConfigError& e, std::ostream& err) {
  err << "onrap: config error";
  if (!e.key().empty()) err << " in '" << e.key() << "'";
  const std::string what = e.what();
  if (e.line() > 0 && what.find("line ") == std::string::npos) {
    err << " (line " << e.line() << ")";
  }
  err << ": " << what << '\n';
}

int ThreadsFromEnv() {
  const char* env = std::getenv("ONRAP_THREADS");
  const int hw = std::max(1u, std::thread::hardware_concurrency());
  if (env == nullptr || *env == '\0') return hw;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1) {
    throw ConfigError("ONRAP_THREADS must be a positive integer, got '" +
                          std::string(env) + "'",
                      "ONRAP_THREADS");
  }
  return static_cast<int>(std::min<long>(n, 1024));
}

std::string EpisodePrefix(int episode, PlannerKind planner) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "ep%04d_", episode);
  return buf + ToString(planner);
}

std::string CycleSuffix(int cycle) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d", cycle);
  return buf;
}

std::vector<double> SolveTimesMs(const EpisodeTrace& trace) {
  std::vector<double> ms;
  for (const CycleRecord& c : trace.cycles) {
    if (!c.status.empty()) ms.push_back(1e3 * c.solve_time_s);
  }
  return ms;
}

// Trace, paths, route and scene files, plus grid and diagnostic files
// when the episode kept them.
void WriteTraceFiles(const fs::path& dir, const std::string& prefix,
                     const EpisodeTrace& trace) {
  WriteFile(dir / (prefix + ".trace.csv"),
            [&](std::ostream& o) { WriteTraceCsv(o, trace); });
  WriteFile(dir / (prefix + ".paths.csv"),
            [&](std::ostream& o) { WritePathsCsv(o, trace); });
  WriteFile(dir / (prefix + ".route.txt"),
            [&](std::ostream& o) { WriteRoute(o, trace.route); });
  WriteFile(dir / (prefix + ".scene.txt"),
            [&](std::ostream& o) { WriteScene(o, trace.scene); });
  for (const CycleRecord& c : trace.cycles) {
    if (c.grid) {
      SaveGridSnapshot(
          (dir / (prefix + ".grid." + CycleSuffix(c.cycle) + ".txt")).string(),
          *c.grid);
    }
    if (!c.diagnostics.empty()) {
      WriteFile(dir / (prefix + ".diag." + CycleSuffix(c.cycle) + ".csv"),
                [&](std::ostream& o) { o << c.diagnostics; });
    }
  }
}

// Grid snapshots stored next to a trace, keyed by cycle.
std::vector<PlacedGrid> LoadTraceGrids(const fs::path& dir,
                                       const std::string& prefix,
                                       const EpisodeTrace& trace) {
  std::vector<PlacedGrid> grids;
  if (!fs::is_directory(dir)) return grids;
  const std::regex pattern(R"(\.grid\.(\d+)\.txt)");
  std::map<int, fs::path> files;
  for (const fs::directory_entry& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (name.rfind(prefix, 0) != 0) continue;
    std::smatch m;
    const std::string rest = name.substr(prefix.size());
    if (std::regex_match(rest, m, pattern)) files[std::stoi(m[1])] = e.path();
  }
  for (const auto& [cycle, path] : files) {
    for (const CycleRecord& c : trace.cycles) {
      if (c.cycle == cycle) {
        grids.push_back({c.pose, LoadGridSnapshot(path.string())});
        break;
      }
    }
  }
  return grids;
}

void WriteOverlay(const fs::path& path, const std::string& title,
                  const EpisodeTrace& trace, std::vector<PlacedGrid> grids) {
  OverlayInput in;
  in.title = title;
  in.route = trace.route;
  in.scene = trace.scene;
  in.trace = &trace;
  in.grids = std::move(grids);
  WriteFile(path, [&](std::ostream& o) { WriteOverlaySvg(o, in); });
}

struct PlannerSamples {
  std::vector<double> clearances;
  std::vector<double> solve_ms;
};

struct TracedEpisode {
  int episode;
  PlannerKind planner;
  EpisodeTrace trace;
};

int RunImpl(const RunArgs& args, std::ostream& out, std::ostream& err) {
  Config config =
      args.config_path.empty() ? Config{} : LoadConfig(args.config_path);
  RunSettings& run = config.run;
  if (args.episodes) {
    if (*args.episodes < 1) {
      throw ConfigError("--episodes must be >= 1", "episodes");
    }
    run.episodes = *args.episodes;
  }
  if (args.planners) run.planners = ParsePlannerList(*args.planners);
  if (args.seed) run.seed = *args.seed;
  if (args.flow) config.scenario.flow_enabled = ParseToggle(*args.flow, "flow");
  if (args.plots) run.plots = ParseToggle(*args.plots, "plots");
  if (args.timing) run.timing = ParseToggle(*args.timing, "timing");
  if (args.traces) {
    if (*args.traces < 0) throw ConfigError("--traces must be >= 0", "traces");
    run.traces = *args.traces;
  }
  config.scenario.Validate();
  const int threads = ThreadsFromEnv();

  const fs::path dir(args.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw OutputError("cannot create output directory '" + dir.string() +
                      "'");
  }
  // Fail before the sweep if the directory is not writable.
  WriteFile(dir / "config.ini",
            [&](std::ostream& o) { WriteConfig(o, config); });

  std::map<PlannerKind, PlannerSamples> samples;
  std::vector<TracedEpisode> traced;
  const int total = run.episodes * static_cast<int>(run.planners.size());
  int done = 0;

  MonteCarloOptions mc;
  mc.episodes = run.episodes;
  mc.planners = run.planners;
  mc.seed = run.seed;
  mc.threads = threads;
  mc.episode.measure_time = run.timing;
  // Grids and diagnostics are kept for every episode but copied out only
  // for the traced ones.
  mc.episode.keep_grids = args.grids && run.traces > 0;
  mc.episode.diagnostics = args.diagnostics && run.traces > 0;
  mc.on_episode = [&](const EpisodeRow& row, const EpisodeResult& result) {
    PlannerSamples& s = samples[row.planner];
    const std::vector<double>& c = result.trace.clearances;
    s.clearances.insert(s.clearances.end(), c.begin(), c.end());
    const std::vector<double> ms = SolveTimesMs(result.trace);
    s.solve_ms.insert(s.solve_ms.end(), ms.begin(), ms.end());
    if (row.episode < run.traces) {
      traced.push_back({row.episode, row.planner, result.trace});
    }
    ++done;
    if (!args.quiet) {
      err << '[' << done << '/' << total << "] episode " << row.episode << ' '
          << ToString(row.planner) << ": "
          << (row.metrics.success ? "success" : "fail") << " ("
          << row.outcome
          << (!row.metrics.success && row.outcome == "completed"
                  ? ", clearance at or below half the ego width"
                  : "")
          << ")\n";
    }
  };
  const std::vector<EpisodeRow> rows = RunMonteCarlo(config.scenario, mc);
  const std::vector<PlannerAggregate> aggregates = Aggregate(rows);

  // All files are written here, from this thread.
  WriteFile(dir / "metrics.csv",
            [&](std::ostream& o) { WriteMetricsCsv(o, rows, run.timing); });
  WriteFile(dir / "outcomes.csv", [&](std::ostream& o) {
    o << "episode,planner,outcome\n";
    for (const EpisodeRow& r : rows) {
      o << r.episode << ',' << ToString(r.planner) << ',' << r.outcome
        << '\n';
    }
  });
  WriteFile(dir / "summary.txt",
            [&](std::ostream& o) { WriteSummary(o, aggregates); });

  std::sort(traced.begin(), traced.end(),
            [&](const TracedEpisode& a, const TracedEpisode& b) {
              return a.episode != b.episode ? a.episode < b.episode
                                            : a.planner < b.planner;
            });
  if (!traced.empty()) fs::create_directories(dir / "traces");
  for (const TracedEpisode& t : traced) {
    WriteTraceFiles(dir / "traces", EpisodePrefix(t.episode, t.planner),
                    t.trace);
  }

  if (run.plots) {
    fs::create_directories(dir / "plots");
    for (const TracedEpisode& t : traced) {
      const std::string prefix = EpisodePrefix(t.episode, t.planner);
      WriteOverlay(dir / "plots" / (prefix + ".overlay.svg"),
                   prefix + " (" + t.trace.outcome + ")", t.trace,
                   LoadTraceGrids(dir / "traces", prefix, t.trace));
    }
    std::vector<HistogramSeries> clearance, solve;
    for (PlannerKind p : run.planners) {
      clearance.push_back({ToString(p), samples[p].clearances});
      solve.push_back({ToString(p), samples[p].solve_ms});
    }
    WriteFile(dir / "plots" / "clearance_hist.svg", [&](std::ostream& o) {
      WriteHistogramSvg(o, "Clearance to nearest obstacle", "clearance [m]",
                        clearance, kClearanceBin);
    });
    if (run.timing) {
      WriteFile(dir / "plots" / "solve_time_hist.svg", [&](std::ostream& o) {
        WriteHistogramSvg(o, "Solve time per cycle", "solve time [ms]", solve,
                          kSolveTimeBin);
      });
    }
  }

  WriteSummary(out, aggregates);
  out << "\nwrote " << rows.size() << " rows to "
      << (dir / "metrics.csv").string() << '\n';
  return kExitOk;
}

int ReplayImpl(const ReplayArgs& args, std::ostream& out) {
  const fs::path trace_path(args.trace_path);
  std::ifstream in(trace_path);
  if (!in) {
    throw ConfigError("cannot open trace '" + trace_path.string() + "'");
  }
  EpisodeTrace trace = ReadTraceCsv(in);

  std::string name = trace_path.filename().string();
  const std::string suffix = ".trace.csv";
  std::string prefix = name.size() > suffix.size() &&
                               name.ends_with(suffix)
                           ? name.substr(0, name.size() - suffix.size())
                           : trace_path.stem().string();
  const fs::path trace_dir = trace_path.parent_path();
  auto companion = [&](const std::string& ext) {
    return trace_dir / (prefix + ext);
  };
  if (std::ifstream paths(companion(".paths.csv")); paths) {
    ReadPathsCsv(paths, trace);
  }
  if (fs::exists(companion(".route.txt"))) {
    trace.route = LoadRoute(companion(".route.txt").string());
  }
  if (std::ifstream scene(companion(".scene.txt")); scene) {
    trace.scene = ReadScene(scene);
  }

  const HistogramBins bins = MakeHistogram(trace.clearances, kClearanceBin);
  const double min_clearance =
      *std::min_element(trace.clearances.begin(), trace.clearances.end());
  out << "cycles: " << trace.cycles.size() << '\n'
      << "poses: " << trace.traversed.size() << '\n'
      << "min_clearance_m: " << FormatDouble(min_clearance) << '\n';
  if (bins.first_nonempty() >= 0) {
    const double lo = bins.left(bins.first_nonempty());
    char edges[64];
    std::snprintf(edges, sizeof(edges), "[%.3f, %.3f)", lo, lo + bins.width);
    out << "min_clearance_bin_m: " << edges << '\n';
  }

  if (!ParseToggle(args.plots, "plots")) return kExitOk;
  const fs::path dir = args.out_dir.empty() ? trace_dir : fs::path(args.out_dir);
  if (!dir.empty()) fs::create_directories(dir);
  WriteOverlay(dir / (prefix + ".overlay.svg"), prefix, trace,
               LoadTraceGrids(trace_dir.empty() ? "." : trace_dir, prefix,
                              trace));
  const std::vector<HistogramSeries> clearance{{prefix, trace.clearances}};
  const fs::path clearance_path = dir / (prefix + ".clearance_hist.svg");
  WriteFile(clearance_path, [&](std::ostream& o) {
    WriteHistogramSvg(o, "Clearance to nearest obstacle", "clearance [m]",
                      clearance, kClearanceBin);
  });
  const std::vector<HistogramSeries> solve{{prefix, SolveTimesMs(trace)}};
  const fs::path solve_path = dir / (prefix + ".solve_time_hist.svg");
  WriteFile(solve_path, [&](std::ostream& o) {
    WriteHistogramSvg(o, "Solve time per cycle", "solve time [ms]", solve,
                      kSolveTimeBin);
  });
  out << "wrote " << (dir / (prefix + ".overlay.svg")).string() << '\n'
      << "wrote " << clearance_path.string() << '\n'
      << "wrote " << solve_path.string() << '\n';
  return kExitOk;
}

template <typename F>
int Guard(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    ReportConfigError(e, err);
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "onrap: error: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace

int Run(const RunArgs& args, std::ostream& out, std::ostream& err) {
  return Guard(err, [&] { return RunImpl(args, out, err); });
}

int Replay(const ReplayArgs& args, std::ostream& out, std::ostream& err) {
  return Guard(err, [&] { return ReplayImpl(args, out); });
}

int ValidateParams(const ValidateArgs& args, std::ostream& out,
                   std::ostream& err) {
  return Guard(err, [&] {
    const Config config =
        args.config_path.empty() ? Config{} : LoadConfig(args.config_path);
    int warnings = 0;
    for (const ParamCheck& c : CheckParameters(config.scenario)) {
      out << (c.passed ? "ok       " : "WARNING  ") << c.name << ": "
          << c.detail << '\n';
      warnings += c.passed ? 0 : 1;
    }
    out << warnings << " warning(s)\n";
    return kExitOk;
  });
}

}  // namespace onrap::cli
