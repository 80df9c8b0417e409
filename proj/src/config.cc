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

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "onrap/cost.h"
#include "onrap/errors.h"
#include "onrap/grid_io.h"

namespace onrap {
namespace {

namespace pt = boost::property_tree;

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string Lower(std::string s) {
  for (char& c : s) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return s;
}

// Full-string parse of a finite double.
bool ParseReal(const std::string& text, double* out) {
  const std::string t = Trim(text);
  if (t.empty()) return false;
  try {
    std::size_t used = 0;
    *out = std::stod(t, &used);
    return used == t.size() && std::isfinite(*out);
  } catch (const std::exception&) {
    return false;
  }
}

double ToDouble(const std::string& value, const std::string& key) {
  // Fractions such as "2/3" are accepted for convenience.
  const auto slash = value.find('/');
  double num = 0, den = 0;
  if (slash == std::string::npos) {
    if (ParseReal(value, &num)) return num;
  } else if (ParseReal(value.substr(0, slash), &num) &&
             ParseReal(value.substr(slash + 1), &den) && den != 0) {
    return num / den;
  }
  throw ConfigError(key + ": expected a number, got '" + value + "'", key);
}

long long ToInteger(const std::string& value, const std::string& key) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (Trim(value.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected an integer, got '" + value + "'", key);
}

std::string Num(double v) { return FormatDouble(v); }
std::string Toggle(bool v) { return v ? "on" : "off"; }

struct Field {
  std::string section;
  std::string key;
  std::function<void(Config&, const std::string&)> set;
  std::function<std::string(const Config&)> get;
};

Field DoubleField(std::string section, std::string key,
                  std::function<double&(Config&)> ref) {
  Field f{std::move(section), std::move(key), nullptr, nullptr};
  const std::string name = f.key;
  f.set = [ref, name](Config& c, const std::string& v) {
    ref(c) = ToDouble(v, name);
  };
  f.get = [ref](const Config& c) {
    return Num(ref(const_cast<Config&>(c)));
  };
  return f;
}

Field IntField(std::string section, std::string key,
               std::function<int&(Config&)> ref) {
  Field f{std::move(section), std::move(key), nullptr, nullptr};
  const std::string name = f.key;
  f.set = [ref, name](Config& c, const std::string& v) {
    const long long x = ToInteger(v, name);
    if (x < -2147483647LL || x > 2147483647LL) {
      throw ConfigError(name + ": out of range", name);
    }
    ref(c) = static_cast<int>(x);
  };
  f.get = [ref](const Config& c) {
    return std::to_string(ref(const_cast<Config&>(c)));
  };
  return f;
}

Field BoolField(std::string section, std::string key,
                std::function<bool&(Config&)> ref) {
  Field f{std::move(section), std::move(key), nullptr, nullptr};
  const std::string name = f.key;
  f.set = [ref, name](Config& c, const std::string& v) {
    ref(c) = ParseToggle(v, name);
  };
  f.get = [ref](const Config& c) {
    return Toggle(ref(const_cast<Config&>(c)));
  };
  return f;
}

const std::vector<Field>& Fields() {
  static const std::vector<Field> fields = [] {
    std::vector<Field> f;
    auto pl = [](Config& c) -> PlannerParams& { return c.scenario.planner; };
    // [planner]
    f.push_back(DoubleField("planner", "planning_horizon", [=](Config& c) -> double& { return pl(c).horizon_length; }));
    f.push_back(DoubleField("planner", "d_s", [=](Config& c) -> double& { return pl(c).ds; }));
    f.push_back(DoubleField("planner", "Q_d", [=](Config& c) -> double& { return pl(c).weights.q_d; }));
    f.push_back(DoubleField("planner", "Q_u", [=](Config& c) -> double& { return pl(c).weights.q_u; }));
    f.push_back(DoubleField("planner", "u_min", [=](Config& c) -> double& { return pl(c).u_min; }));
    f.push_back(DoubleField("planner", "u_max", [=](Config& c) -> double& { return pl(c).u_max; }));
    f.push_back(DoubleField("planner", "l_f", [=](Config& c) -> double& { return pl(c).geometry.l_f; }));
    f.push_back(DoubleField("planner", "l_r", [=](Config& c) -> double& { return pl(c).geometry.l_r; }));
    f.push_back(DoubleField("planner", "lambda_curve", [=](Config& c) -> double& { return pl(c).weights.lambda_curve; }));
    f.push_back(DoubleField("planner", "lambda_grid", [=](Config& c) -> double& { return pl(c).risk.lambda_grid; }));
    f.push_back(DoubleField("planner", "alpha_decay", [=](Config& c) -> double& { return pl(c).risk.alpha_decay; }));
    f.push_back(DoubleField("planner", "sigma", [=](Config& c) -> double& { return pl(c).risk.sigma; }));
    f.push_back(DoubleField("planner", "tau", [=](Config& c) -> double& { return pl(c).risk.tau; }));
    f.push_back(DoubleField("planner", "epsilon", [=](Config& c) -> double& { return pl(c).epsilon_buffer; }));
    f.push_back(DoubleField("planner", "psi_min", [=](Config& c) -> double& { return pl(c).psi_min; }));
    f.push_back(DoubleField("planner", "psi_max", [=](Config& c) -> double& { return pl(c).psi_max; }));
    {
      Field mode{"planner", "heading_mode", nullptr, nullptr};
      mode.set = [](Config& c, const std::string& v) {
        const std::string s = Lower(v);
        if (s == "static" || s == "box") {
          c.scenario.planner.heading_mode = HeadingConstraintMode::kStaticBox;
        } else if (s == "stepwise") {
          c.scenario.planner.heading_mode = HeadingConstraintMode::kStepwise;
        } else {
          throw ConfigError("heading_mode: expected static or stepwise",
                            "heading_mode");
        }
      };
      mode.get = [](const Config& c) {
        return std::string(c.scenario.planner.heading_mode ==
                                   HeadingConstraintMode::kStepwise
                               ? "stepwise"
                               : "static");
      };
      f.push_back(mode);
    }
    f.push_back(DoubleField("planner", "corridor_sigma", [](Config& c) -> double& { return c.scenario.corridor_sigma_multiple; }));
    f.push_back(BoolField("planner", "multi_start", [=](Config& c) -> bool& { return pl(c).multi_start; }));
    f.push_back(IntField("planner", "max_iterations", [=](Config& c) -> int& { return pl(c).solver.max_outer_iterations; }));
    f.push_back(DoubleField("planner", "gradient_tolerance", [=](Config& c) -> double& { return pl(c).solver.gradient_tolerance; }));
    f.push_back(DoubleField("planner", "constraint_tolerance", [=](Config& c) -> double& { return pl(c).solver.constraint_tolerance; }));
    // [vehicle]
    f.push_back(DoubleField("vehicle", "length", [=](Config& c) -> double& { return pl(c).geometry.length; }));
    f.push_back(DoubleField("vehicle", "width", [=](Config& c) -> double& { return pl(c).geometry.width; }));
    // [grid]
    auto gr = [](Config& c) -> GridSpec& { return c.scenario.grid; };
    f.push_back(IntField("grid", "rows", [=](Config& c) -> int& { return gr(c).n_rows; }));
    f.push_back(IntField("grid", "cols", [=](Config& c) -> int& { return gr(c).n_cols; }));
    f.push_back(DoubleField("grid", "cell_size", [=](Config& c) -> double& { return gr(c).cell_size; }));
    f.push_back(IntField("grid", "ego_row", [=](Config& c) -> int& { return gr(c).ego_row; }));
    f.push_back(IntField("grid", "ego_col", [=](Config& c) -> int& { return gr(c).ego_col; }));
    // [scenario]
    auto sc = [](Config& c) -> ScenarioConfig& { return c.scenario; };
    {
      Field route{"scenario", "route", nullptr, nullptr};
      route.set = [](Config& c, const std::string& v) {
        const std::string s = Lower(v);
        if (s == "sinusoid") {
          c.scenario.route.kind = RouteSpec::Kind::kSinusoid;
        } else if (s == "file") {
          c.scenario.route.kind = RouteSpec::Kind::kFile;
        } else {
          throw ConfigError("route: expected sinusoid or file", "route");
        }
      };
      route.get = [](const Config& c) {
        return std::string(c.scenario.route.kind == RouteSpec::Kind::kFile
                               ? "file"
                               : "sinusoid");
      };
      f.push_back(route);
      Field file{"scenario", "route_file", nullptr, nullptr};
      file.set = [](Config& c, const std::string& v) {
        c.scenario.route.file = v;
      };
      file.get = [](const Config& c) { return c.scenario.route.file; };
      f.push_back(file);
    }
    f.push_back(DoubleField("scenario", "amplitude", [=](Config& c) -> double& { return sc(c).route.amplitude; }));
    f.push_back(DoubleField("scenario", "wavelength", [=](Config& c) -> double& { return sc(c).route.wavelength; }));
    f.push_back(DoubleField("scenario", "length", [=](Config& c) -> double& { return sc(c).route.length; }));
    f.push_back(DoubleField("scenario", "spacing", [=](Config& c) -> double& { return sc(c).route.spacing; }));
    f.push_back(DoubleField("scenario", "density", [=](Config& c) -> double& { return sc(c).obstacle_density; }));
    f.push_back(DoubleField("scenario", "corridor_half_width", [=](Config& c) -> double& { return sc(c).corridor_half_width; }));
    f.push_back(DoubleField("scenario", "start_clearance", [=](Config& c) -> double& { return sc(c).start_clearance; }));
    f.push_back(DoubleField("scenario", "occupancy_noise", [=](Config& c) -> double& { return sc(c).occupancy_noise; }));
    f.push_back(DoubleField("scenario", "reference_noise", [=](Config& c) -> double& { return sc(c).reference_noise; }));
    f.push_back(DoubleField("scenario", "lookahead", [=](Config& c) -> double& { return sc(c).lookahead; }));
    f.push_back(DoubleField("scenario", "goal_heading_limit", [=](Config& c) -> double& { return sc(c).goal_heading_limit; }));
    f.push_back(DoubleField("scenario", "max_route_deviation", [=](Config& c) -> double& { return sc(c).max_route_deviation; }));
    f.push_back(IntField("scenario", "dynamic_agents", [=](Config& c) -> int& { return sc(c).dynamic_agents; }));
    f.push_back(DoubleField("scenario", "agent_speed", [=](Config& c) -> double& { return sc(c).agent_speed; }));
    f.push_back(DoubleField("scenario", "cycle_period", [=](Config& c) -> double& { return sc(c).cycle_period; }));
    // [flow]
    f.push_back(BoolField("flow", "enabled", [=](Config& c) -> bool& { return sc(c).flow_enabled; }));
    f.push_back(DoubleField("flow", "q", [=](Config& c) -> double& { return sc(c).flow.q; }));
    f.push_back(DoubleField("flow", "r", [=](Config& c) -> double& { return sc(c).flow.r; }));
    f.push_back(DoubleField("flow", "v_max", [=](Config& c) -> double& { return sc(c).flow.v_max; }));
    f.push_back(DoubleField("flow", "p_floor", [=](Config& c) -> double& { return sc(c).flow.p_floor; }));
    f.push_back(DoubleField("flow", "beta", [=](Config& c) -> double& { return sc(c).flow.activity_threshold; }));
    f.push_back(IntField("flow", "window", [=](Config& c) -> int& { return sc(c).flow_window; }));
    // [baselines]
    f.push_back(DoubleField("baselines", "astar_inflation", [=](Config& c) -> double& { return sc(c).astar.inflation_radius; }));
    f.push_back(IntField("baselines", "rrt_iterations", [=](Config& c) -> int& { return sc(c).rrt.iterations; }));
    f.push_back(DoubleField("baselines", "rrt_step", [=](Config& c) -> double& { return sc(c).rrt.step_size; }));
    f.push_back(DoubleField("baselines", "rrt_radius", [=](Config& c) -> double& { return sc(c).rrt.rewire_radius; }));
    f.push_back(DoubleField("baselines", "rrt_goal_tolerance", [=](Config& c) -> double& { return sc(c).rrt.goal_tolerance; }));
    f.push_back(DoubleField("baselines", "rrt_inflation", [=](Config& c) -> double& { return sc(c).rrt.inflation_radius; }));
    f.push_back(DoubleField("baselines", "goal_clearance", [=](Config& c) -> double& { return sc(c).goal_clearance; }));
    // [run]
    f.push_back(IntField("run", "episodes", [](Config& c) -> int& { return c.run.episodes; }));
    {
      Field planners{"run", "planners", nullptr, nullptr};
      planners.set = [](Config& c, const std::string& v) {
        c.run.planners = ParsePlannerList(v);
      };
      planners.get = [](const Config& c) {
        std::string s;
        for (PlannerKind k : c.run.planners) {
          if (!s.empty()) s += ",";
          s += ToString(k);
        }
        return s;
      };
      f.push_back(planners);
      Field seed{"run", "seed", nullptr, nullptr};
      seed.set = [](Config& c, const std::string& v) {
        const long long x = ToInteger(v, "seed");
        if (x < 0) throw ConfigError("seed: must be >= 0", "seed");
        c.run.seed = static_cast<std::uint64_t>(x);
      };
      seed.get = [](const Config& c) { return std::to_string(c.run.seed); };
      f.push_back(seed);
    }
    f.push_back(BoolField("run", "plots", [](Config& c) -> bool& { return c.run.plots; }));
    f.push_back(BoolField("run", "timing", [](Config& c) -> bool& { return c.run.timing; }));
    f.push_back(IntField("run", "traces", [](Config& c) -> int& { return c.run.traces; }));
    return f;
  }();
  return fields;
}

// 1-based line of `key` inside `[section]`, or of the section header when
// key is empty; 0 if not found.
int LineOf(const std::string& text, const std::string& section,
           const std::string& key) {
  std::istringstream in(text);
  std::string line, current;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const std::string t = Trim(line);
    if (t.empty() || t[0] == ';' || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      current = Trim(t.substr(1, t.size() - 2));
      if (key.empty() && current == section) return n;
      continue;
    }
    if (current != section || key.empty()) continue;
    const auto eq = t.find('=');
    if (eq != std::string::npos && Trim(t.substr(0, eq)) == key) return n;
  }
  return 0;
}

}  // namespace

bool ParseToggle(const std::string& value, const std::string& key) {
  const std::string s = Lower(Trim(value));
  if (s == "on" || s == "true" || s == "yes" || s == "1") return true;
  if (s == "off" || s == "false" || s == "no" || s == "0") return false;
  throw ConfigError(key + ": expected on or off, got '" + value + "'", key);
}

std::vector<PlannerKind> ParsePlannerList(const std::string& list) {
  std::vector<PlannerKind> out;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (Trim(item).empty()) continue;
    const PlannerKind k = ParsePlannerKind(item);
    if (std::find(out.begin(), out.end(), k) != out.end()) {
      throw ConfigError("planners: '" + Trim(item) + "' listed twice",
                        "planners");
    }
    out.push_back(k);
  }
  if (out.empty()) throw ConfigError("planners: empty list", "planners");
  return out;
}

Config ReadConfig(std::istream& in) {
  const std::string text((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  pt::ptree tree;
  try {
    std::istringstream s(text);
    pt::read_ini(s, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config: " + e.message(), "",
                      static_cast<int>(e.line()));
  }

  std::map<std::string, const Field*> by_name;
  for (const Field& f : Fields()) by_name[f.section + "." + f.key] = &f;

  Config config;
  bool psi_min_set = false, psi_max_set = false;
  bool astar_inflation_set = false, rrt_inflation_set = false;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError("config: key '" + section + "' outside a section",
                        section, LineOf(text, "", section));
    }
    bool known_section = false;
    for (const Field& f : Fields()) known_section |= f.section == section;
    if (!known_section) {
      throw ConfigError("config: unknown section [" + section + "]", section,
                        LineOf(text, section, ""));
    }
    for (const auto& [key, node] : body) {
      const auto it = by_name.find(section + "." + key);
      const int line = LineOf(text, section, key);
      if (it == by_name.end()) {
        throw ConfigError("config: unknown key '" + key + "' in [" + section +
                              "]",
                          key, line);
      }
      try {
        it->second->set(config, Trim(node.data()));
      } catch (const ConfigError& e) {
        throw ConfigError(std::string(e.what()) +
                              (line > 0 ? " (line " + std::to_string(line) + ")"
                                        : ""),
                          key, line);
      }
      psi_min_set |= section == "planner" && key == "psi_min";
      psi_max_set |= section == "planner" && key == "psi_max";
      astar_inflation_set |= key == "astar_inflation";
      rrt_inflation_set |= key == "rrt_inflation";
    }
  }

  // The heading box defaults follow u_min / u_max / epsilon unless given.
  PlannerParams& p = config.scenario.planner;
  if (!psi_max_set) {
    p.psi_max = PlannerParams::DefaultHeadingBound(p.u_max, p.epsilon_buffer);
  }
  if (!psi_min_set) {
    p.psi_min =
        -PlannerParams::DefaultHeadingBound(-p.u_min, p.epsilon_buffer);
  }
  // Baselines inflate by half the ego width unless told otherwise.
  const double half_width = 0.5 * p.geometry.width;
  if (!astar_inflation_set) config.scenario.astar.inflation_radius = half_width;
  if (!rrt_inflation_set) config.scenario.rrt.inflation_radius = half_width;
  if (config.run.episodes < 1) {
    throw ConfigError("episodes: must be >= 1", "episodes",
                      LineOf(text, "run", "episodes"));
  }
  if (config.run.traces < 0) {
    throw ConfigError("traces: must be >= 0", "traces",
                      LineOf(text, "run", "traces"));
  }
  try {
    config.scenario.Validate();
  } catch (const ConfigError& e) {
    // Map the field name back to a line when it is a config key.
    int line = 0;
    for (const Field& f : Fields()) {
      if (f.key == e.key()) line = LineOf(text, f.section, f.key);
    }
    throw ConfigError(e.what(), e.key(), line);
  }
  return config;
}

Config LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  Config config = ReadConfig(in);
  // A relative route file is looked up next to the config file.
  std::string& route = config.scenario.route.file;
  if (!route.empty() && std::filesystem::path(route).is_relative()) {
    route = (std::filesystem::path(path).parent_path() / route).string();
  }
  return config;
}

void WriteConfig(std::ostream& out, const Config& config) {
  std::string section;
  for (const Field& f : Fields()) {
    if (f.section != section) {
      if (!section.empty()) out << '\n';
      section = f.section;
      out << '[' << section << "]\n";
    }
    out << f.key << " = " << f.get(config) << '\n';
  }
}

std::vector<ParamCheck> CheckParameters(const ScenarioConfig& config) {
  const PlannerParams& p = config.planner;
  std::vector<ParamCheck> checks;
  auto fmt = [](double v) {
    std::ostringstream s;
    s.precision(4);
    s << v;
    return s.str();
  };

  const double bound = LambdaGridLowerBound(p.risk.sigma, p.risk.tau);
  checks.push_back({"lambda_grid_bound", p.risk.lambda_grid >= bound,
                    "lambda_grid = " + fmt(p.risk.lambda_grid) +
                        ", lower bound sigma^2 exp(1/(2 tau^2)) = " +
                        fmt(bound)});
  const double y_des = ImpliedMaxDeviation(p.risk.lambda_grid, p.weights.q_d);
  checks.push_back({"implied_deviation", true,
                    "largest deviation a single cell can justify = sqrt("
                    "lambda_grid / Q_d) = " +
                        fmt(y_des) + " m"});
  const double width = 2.0 * config.corridor_sigma_multiple;
  checks.push_back({"corridor_5sigma", width <= 5.0 + 1e-12,
                    "corridor width = " + fmt(width) +
                        " sigma (guidance: within 5 sigma)"});
  bool box_ok = true;
  std::string box;
  if (p.heading_mode == HeadingConstraintMode::kStaticBox) {
    const double hi = std::numbers::pi / 2 - p.u_max - p.epsilon_buffer;
    const double lo = -std::numbers::pi / 2 - p.u_min + p.epsilon_buffer;
    box_ok = p.psi_max < hi && p.psi_min > lo && p.psi_min < p.psi_max;
    box = "psi in [" + fmt(p.psi_min) + ", " + fmt(p.psi_max) +
          "], domain requires (" + fmt(lo) + ", " + fmt(hi) + ")";
  } else {
    box = "stepwise: |psi_k + u_k| < pi/2 - epsilon enforced per step";
  }
  checks.push_back({"heading_box", box_ok, box});
  return checks;
}

}  // namespace onrap
