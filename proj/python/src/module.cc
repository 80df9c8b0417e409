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

// Python bindings: kernel and calibration helpers, rollout, a single
// planning call on a numpy occupancy grid, episodes and Monte-Carlo runs.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <optional>
#include <sstream>
#include <tuple>
#include <string>
#include <vector>

#include "onrap/config.h"
#include "onrap/cost.h"
#include "onrap/errors.h"
#include "onrap/kinematics.h"
#include "onrap/planner.h"
#include "onrap/simulator.h"

namespace py = pybind11;

namespace onrap {
namespace {

Config LoadOrDefault(const std::optional<std::string>& path) {
  return path ? LoadConfig(*path) : Config{};
}

py::dict MetricsDict(const EpisodeMetrics& m) {
  py::dict d;
  d["runtime_mean_s"] = m.runtime_mean_s;
  d["runtime_max_s"] = m.runtime_max_s;
  d["success"] = m.success;
  d["min_dist_m"] = m.min_dist_m;
  d["avg_dist_m"] = m.avg_dist_m;
  d["max_curv_inv_m"] = m.max_curv_inv_m;
  d["path_len_m"] = m.path_len_m;
  return d;
}

py::array_t<double> StatesArray(const std::vector<PlanarState>& states) {
  py::array_t<double> out({static_cast<py::ssize_t>(states.size()),
                           py::ssize_t{3}});
  auto a = out.mutable_unchecked<2>();
  for (std::size_t k = 0; k < states.size(); ++k) {
    a(k, 0) = states[k].x;
    a(k, 1) = states[k].y;
    a(k, 2) = states[k].heading;
  }
  return out;
}

py::array_t<double> Rollout_(const std::vector<double>& controls, double ds,
                             double l_f, double l_r) {
  VehicleGeometry g;
  g.l_f = l_f;
  g.l_r = l_r;
  return StatesArray(Rollout(PlanarState{}, controls, ds, g));
}

py::dict Plan_(py::array_t<double, py::array::c_style | py::array::forcecast>
                   occupancy,
               const std::vector<double>& reference_y, double cell_size,
               int ego_row, int ego_col,
               const std::optional<std::string>& config_path) {
  if (occupancy.ndim() != 2) {
    throw std::invalid_argument("occupancy must be a 2-D array");
  }
  GridSpec spec;
  spec.n_rows = static_cast<int>(occupancy.shape(0));
  spec.n_cols = static_cast<int>(occupancy.shape(1));
  spec.cell_size = cell_size;
  spec.ego_row = ego_row;
  spec.ego_col = ego_col;
  spec.Validate();
  EgoGrid grid(spec);
  auto a = occupancy.unchecked<2>();
  for (int i = 0; i < spec.n_rows; ++i) {
    for (int j = 0; j < spec.n_cols; ++j) grid.set(i, j, a(i, j));
  }
  const PlannerParams params = LoadOrDefault(config_path).scenario.planner;
  ReferencePath ref;
  ref.ds = params.ds;
  ref.y = reference_y;
  const PlanResult r = Plan(PlanarState{}, grid, ref, params);
  py::dict d;
  d["status"] = ToString(r.status);
  d["states"] = StatesArray(r.states);
  d["controls"] = r.controls;
  d["cost"] = r.cost.total();
  d["iterations"] = r.iterations;
  d["hard_feasible"] = IsHardFeasible(r, params);
  return d;
}

py::dict RunEpisode_(const std::string& planner, std::uint64_t seed,
                     const std::optional<std::string>& config_path,
                     bool flow) {
  Config config = LoadOrDefault(config_path);
  config.scenario.flow_enabled = config.scenario.flow_enabled || flow;
  const EpisodeResult r =
      RunEpisode(config.scenario, ParsePlannerKind(planner), seed);
  py::dict d = MetricsDict(r.metrics);
  d["outcome"] = r.trace.outcome;
  std::vector<std::array<double, 3>> path;
  for (const Pose2& p : r.trace.traversed) path.push_back({p.x, p.y, p.heading});
  d["traversed"] = path;
  d["clearances"] = r.trace.clearances;
  return d;
}

py::dict RunMonteCarlo_(int episodes, const std::string& planners,
                        std::uint64_t seed,
                        const std::optional<std::string>& config_path,
                        int threads, bool timing) {
  const Config config = LoadOrDefault(config_path);
  MonteCarloOptions mc;
  mc.episodes = episodes;
  mc.planners = ParsePlannerList(planners);
  mc.seed = seed;
  mc.threads = threads;
  mc.episode.measure_time = timing;
  std::vector<EpisodeRow> rows;
  {
    py::gil_scoped_release release;
    rows = RunMonteCarlo(config.scenario, mc);
  }
  std::ostringstream csv, summary;
  WriteMetricsCsv(csv, rows, timing);
  WriteSummary(summary, Aggregate(rows));
  py::dict d;
  d["metrics_csv"] = csv.str();
  d["summary"] = summary.str();
  return d;
}

}  // namespace
}  // namespace onrap

PYBIND11_MODULE(_onrap, m) {
  using namespace onrap;
  m.doc() = "Occupancy-grid local path planning with a risk-aware NLP.";
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

  m.def("risk_kernel", &RiskKernel, py::arg("y"), py::arg("y_cell"),
        py::arg("sigma"), py::arg("tau"));
  m.def("lambda_grid_lower_bound", &LambdaGridLowerBound, py::arg("sigma"),
        py::arg("tau"));
  m.def("implied_max_deviation", &ImpliedMaxDeviation,
        py::arg("lambda_grid"), py::arg("q_d") = 1.0);
  m.def("max_lateral_deviation", &MaxLateralDeviation, py::arg("s"),
        py::arg("delta_max"), py::arg("wheelbase"));
  m.def("rollout", &Rollout_, py::arg("controls"), py::arg("ds") = 0.5,
        py::arg("l_f") = 1.0, py::arg("l_r") = 1.0,
        "States (N+1, 3) as x, y, heading from the origin.");
  m.def("plan", &Plan_, py::arg("occupancy"), py::arg("reference_y"),
        py::arg("cell_size") = 0.25, py::arg("ego_row") = 24,
        py::arg("ego_col") = 8, py::arg("config") = py::none(),
        "Plans from the grid's ego cell along `reference_y` (N+1 values).");
  m.def(
      "check_parameters",
      [](const std::optional<std::string>& config_path) {
        std::vector<std::tuple<std::string, bool, std::string>> out;
        for (const ParamCheck& c :
             CheckParameters(LoadOrDefault(config_path).scenario)) {
          out.emplace_back(c.name, c.passed, c.detail);
        }
        return out;
      },
      py::arg("config") = py::none());
  m.def("run_episode", &RunEpisode_, py::arg("planner") = "onrap",
        py::arg("seed") = 0, py::arg("config") = py::none(),
        py::arg("flow") = false);
  m.def("run_monte_carlo", &RunMonteCarlo_, py::arg("episodes"),
        py::arg("planners") = "onrap,astar,rrtstar", py::arg("seed") = 0,
        py::arg("config") = py::none(), py::arg("threads") = 1,
        py::arg("timing") = false);
}
