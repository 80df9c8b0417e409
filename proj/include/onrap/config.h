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

// Scenario and run configuration files: INI-style "key = value" text with
// [sections]. Planner keys use the conventional parameter names
// (planning_horizon, d_s, Q_d, Q_u, u_min, u_max, l_f, l_r, lambda_curve,
// lambda_grid, alpha_decay, sigma, tau). Unknown sections or keys are
// errors. Missing keys keep their defaults.

#ifndef ONRAP_CONFIG_H_
#define ONRAP_CONFIG_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "onrap/simulator.h"

namespace onrap {

struct RunSettings {
  int episodes = 100;
  std::vector<PlannerKind> planners{PlannerKind::kOnrap, PlannerKind::kAStar,
                                    PlannerKind::kRrtStar};
  std::uint64_t seed = 0;
  bool plots = true;
  bool timing = true;  // off: runtime columns are written as NA
  int traces = 1;      // trace files for the first `traces` episodes
};

struct Config {
  ScenarioConfig scenario;
  RunSettings run;
};

/// Parses a configuration. Throws ConfigError naming the offending key (and
/// its line when known) for syntax errors, unknown keys, unparsable values,
/// and values rejected by ScenarioConfig::Validate.
Config ReadConfig(std::istream& in);
/// As ReadConfig; a relative route_file is resolved against the directory
/// of `path`.
Config LoadConfig(const std::string& path);

/// Writes every key with its current value; ReadConfig reads it back.
void WriteConfig(std::ostream& out, const Config& config);

/// Comma-separated planner list, e.g. "onrap,astar".
std::vector<PlannerKind> ParsePlannerList(const std::string& list);
/// "on"/"off", "true"/"false", "yes"/"no", "1"/"0".
bool ParseToggle(const std::string& value, const std::string& key);

struct ParamCheck {
  std::string name;
  bool passed = true;
  std::string detail;
};

/// Calibration and consistency checks reported by validate-params: the
/// lambda_grid lower bound, the implied deviation sqrt(lambda_grid / Q_d),
/// the 5 sigma corridor guidance and the heading box domain condition.
std::vector<ParamCheck> CheckParameters(const ScenarioConfig& config);

}  // namespace onrap

#endif  // ONRAP_CONFIG_H_
