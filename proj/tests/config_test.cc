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

#include "onrap/config.h"

#include <cmath>
#include <sstream>
#include <string>

#include "gtest/gtest.h"
#include "onrap/cost.h"
#include "onrap/errors.h"

namespace onrap {
namespace {

Config Parse(const std::string& text) {
  std::istringstream in(text);
  return ReadConfig(in);
}

ConfigError ParseError(const std::string& text) {
  try {
    Parse(text);
  } catch (const ConfigError& e) {
    return e;
  }
  ADD_FAILURE() << "no error for:\n" << text;
  return ConfigError("none");
}

TEST(ConfigTest, EmptyFileGivesDefaults) {
  const Config c = Parse("");
  EXPECT_EQ(c.scenario.planner.risk.lambda_grid, 100.0);
  EXPECT_EQ(c.run.episodes, 100);
  EXPECT_EQ(c.run.planners.size(), 3u);
  EXPECT_TRUE(c.run.timing);
}

TEST(ConfigTest, PlannerNamesAreKeys) {
  const Config c = Parse(
      "[planner]\nplanning_horizon = 8\nd_s = 0.25\nQ_d = 2\nQ_u = 3\n"
      "u_min = -0.8\nu_max = 0.8\nl_f = 1.2\nl_r = 1.4\nlambda_curve = 5\n"
      "lambda_grid = 50\nalpha_decay = 0.9\nsigma = 1.2\ntau = 2/3\n");
  const PlannerParams& p = c.scenario.planner;
  EXPECT_EQ(p.horizon_length, 8.0);
  EXPECT_EQ(p.ds, 0.25);
  EXPECT_EQ(p.n_steps(), 32);
  EXPECT_EQ(p.weights.q_d, 2.0);
  EXPECT_EQ(p.weights.q_u, 3.0);
  EXPECT_EQ(p.u_min, -0.8);
  EXPECT_EQ(p.u_max, 0.8);
  EXPECT_EQ(p.geometry.l_f, 1.2);
  EXPECT_EQ(p.geometry.l_r, 1.4);
  EXPECT_EQ(p.weights.lambda_curve, 5.0);
  EXPECT_EQ(p.risk.lambda_grid, 50.0);
  EXPECT_EQ(p.risk.alpha_decay, 0.9);
  EXPECT_EQ(p.risk.sigma, 1.2);
  EXPECT_DOUBLE_EQ(p.risk.tau, 2.0 / 3.0);
  // Heading box follows u_max when not given.
  EXPECT_NEAR(p.psi_max, std::acos(-1.0) / 2 - 0.8 - 0.05 - 0.01, 1e-15);
  EXPECT_NEAR(p.psi_min, -p.psi_max, 1e-15);
}

TEST(ConfigTest, UnknownKeyIsNamedWithLine) {
  const ConfigError e = ParseError("[planner]\nsigma = 1\nsigmaa = 2\n");
  EXPECT_EQ(e.key(), "sigmaa");
  EXPECT_EQ(e.line(), 3);
}

TEST(ConfigTest, UnknownSectionIsNamed) {
  const ConfigError e = ParseError("[run]\nseed = 1\n\n[plannr]\nx = 1\n");
  EXPECT_EQ(e.key(), "plannr");
  EXPECT_EQ(e.line(), 4);
}

TEST(ConfigTest, BadValueIsNamed) {
  ConfigError e = ParseError("[scenario]\ndensity = lots\n");
  EXPECT_EQ(e.key(), "density");
  EXPECT_EQ(e.line(), 2);
  e = ParseError("[run]\nplots = maybe\n");
  EXPECT_EQ(e.key(), "plots");
  e = ParseError("[run]\nepisodes = 2.5\n");
  EXPECT_EQ(e.key(), "episodes");
  e = ParseError("[run]\nplanners = onrap,bfs\n");
  EXPECT_EQ(e.key(), "planners");
}

TEST(ConfigTest, InvalidRangeIsNamed) {
  ConfigError e = ParseError("[scenario]\n\noccupancy_noise = -0.1\n");
  EXPECT_EQ(e.key(), "occupancy_noise");
  EXPECT_EQ(e.line(), 3);
  e = ParseError("[run]\nepisodes = 0\n");
  EXPECT_EQ(e.key(), "episodes");
}

TEST(ConfigTest, SyntaxErrorHasLine) {
  const ConfigError e = ParseError("[run]\nseed = 1\nthis line has no equals\n");
  EXPECT_EQ(e.line(), 3);
}

TEST(ConfigTest, DuplicateKeyRejected) {
  const ConfigError e = ParseError("[run]\nseed = 1\nseed = 2\n");
  EXPECT_GT(e.line(), 0);
}

TEST(ConfigTest, InflationFollowsWidth) {
  Config c = Parse("[vehicle]\nwidth = 0.6\n");
  EXPECT_DOUBLE_EQ(c.scenario.astar.inflation_radius, 0.3);
  EXPECT_DOUBLE_EQ(c.scenario.rrt.inflation_radius, 0.3);
  c = Parse("[vehicle]\nwidth = 0.6\n[baselines]\nastar_inflation = 0.4\n");
  EXPECT_DOUBLE_EQ(c.scenario.astar.inflation_radius, 0.4);
}

TEST(ConfigTest, WriteReadRoundTrip) {
  Config c;
  c.scenario.route.length = 33.5;
  c.scenario.flow_enabled = true;
  c.scenario.planner.heading_mode = HeadingConstraintMode::kStepwise;
  c.run.planners = {PlannerKind::kRrtStar, PlannerKind::kOnrap};
  c.run.seed = 123456789012345ULL;
  c.run.timing = false;
  std::ostringstream out;
  WriteConfig(out, c);
  const Config r = Parse(out.str());
  std::ostringstream again;
  WriteConfig(again, r);
  EXPECT_EQ(out.str(), again.str());
  EXPECT_EQ(r.run.seed, 123456789012345ULL);
  EXPECT_EQ(r.run.planners, c.run.planners);
  EXPECT_EQ(r.scenario.planner.risk.tau, c.scenario.planner.risk.tau);
}

TEST(ConfigTest, ShippedDefaultMatchesBuiltIns) {
  const Config shipped = LoadConfig(ONRAP_SOURCE_DIR "/configs/default.ini");
  std::ostringstream a, b;
  WriteConfig(a, shipped);
  WriteConfig(b, Config{});
  EXPECT_EQ(a.str(), b.str());
}

TEST(CheckParametersTest, DefaultValuesPass) {
  const std::vector<ParamCheck> checks = CheckParameters(ScenarioConfig{});
  ASSERT_EQ(checks.size(), 4u);
  for (const ParamCheck& c : checks) EXPECT_TRUE(c.passed) << c.name;
  EXPECT_NE(checks[0].detail.find("6.93"), std::string::npos)
      << checks[0].detail;
  EXPECT_NE(checks[1].detail.find("10 m"), std::string::npos);
}

TEST(CheckParametersTest, SmallLambdaWarns) {
  ScenarioConfig c;
  c.planner.risk.lambda_grid = 1;
  EXPECT_FALSE(CheckParameters(c)[0].passed);
}

TEST(CheckParametersTest, WideCorridorWarns) {
  ScenarioConfig c;
  c.corridor_sigma_multiple = 5;  // 10 sigma wide
  EXPECT_FALSE(CheckParameters(c)[2].passed);
}

TEST(CheckParametersTest, HeadingBoxOutsideDomainWarns) {
  ScenarioConfig c;
  c.planner.psi_max = 0.6;
  EXPECT_FALSE(CheckParameters(c)[3].passed);
}

TEST(ParseToggleTest, Values) {
  EXPECT_TRUE(ParseToggle("ON", "k"));
  EXPECT_TRUE(ParseToggle("true", "k"));
  EXPECT_FALSE(ParseToggle("off", "k"));
  EXPECT_FALSE(ParseToggle("0", "k"));
  EXPECT_THROW(ParseToggle("2", "k"), ConfigError);
}

}  // namespace
}  // namespace onrap
