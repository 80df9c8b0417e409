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

#include "onrap/cost.h"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "onrap/errors.h"

namespace onrap {

void RiskParams::Validate() const {
  if (!(sigma > 0) || !(tau > 0)) {
    throw std::invalid_argument("risk params: sigma and tau must be > 0");
  }
  if (!(lambda_grid >= 0)) {
    throw std::invalid_argument("risk params: lambda_grid must be >= 0");
  }
  if (!(alpha_decay > 0 && alpha_decay <= 1)) {
    throw std::invalid_argument("risk params: alpha_decay must be in (0, 1]");
  }
}

double RiskParams::StepWeight(int k) const {
  return alpha_decay == 1.0 ? 1.0 : std::pow(alpha_decay, k);
}

void ObjectiveWeights::Validate() const {
  auto nonneg = [](double v) { return v >= 0 && std::isfinite(v); };
  bool ok = nonneg(q_d) && nonneg(q_u) && nonneg(lambda_curve);
  for (double v : q_d_diag) ok = ok && nonneg(v);
  for (double v : q_u_diag) ok = ok && nonneg(v);
  if (!ok) throw std::invalid_argument("objective weights must be >= 0");
}

double RiskKernel(double y, double y_cell, double sigma, double tau) {
  const double width = sigma * tau;
  const double d = y - y_cell;
  return std::exp(-d * d / (2.0 * width * width));
}

bool RiskField::empty() const {
  for (const auto& column : occupied_) {
    if (!column.empty()) return false;
  }
  return true;
}

void RiskField::AddGrid(const EgoGrid& grid, double ds, int n_steps,
                        int only_k, std::vector<std::vector<double>>& out) {
  const GridSpec& spec = grid.spec();
  for (int j = 0; j < spec.n_cols; ++j) {
    const double k_real = std::floor(spec.ColX(j) / ds + 0.5);
    if (k_real < 0 || k_real > n_steps) continue;
    const int k = static_cast<int>(k_real);
    if (only_k >= 0 && k != only_k) continue;
    for (int i = 0; i < spec.n_rows; ++i) {
      if (grid.Occupied(i, j)) out[k].push_back(spec.RowY(i));
    }
  }
}

RiskField RiskField::FromGrid(const EgoGrid& grid, double ds, int n_steps) {
  if (!(ds > 0) || n_steps < 1) {
    throw std::invalid_argument("risk field: need ds > 0 and n_steps >= 1");
  }
  grid.spec().ValidateCovers(n_steps * ds);
  RiskField field;
  field.occupied_.assign(n_steps + 1, {});
  AddGrid(grid, ds, n_steps, -1, field.occupied_);
  return field;
}

RiskField RiskField::FromGrids(std::span<const EgoGrid> per_step, double ds,
                               int n_steps) {
  if (!(ds > 0) || n_steps < 1) {
    throw std::invalid_argument("risk field: need ds > 0 and n_steps >= 1");
  }
  if (per_step.size() != static_cast<std::size_t>(n_steps) + 1) {
    throw std::invalid_argument(
        "risk field: need one grid per step (n_steps + 1)");
  }
  RiskField field;
  field.occupied_.assign(n_steps + 1, {});
  for (int k = 0; k <= n_steps; ++k) {
    per_step[k].spec().ValidateCovers(n_steps * ds);
    AddGrid(per_step[k], ds, n_steps, k, field.occupied_);
  }
  return field;
}

double GridRisk(std::span<const double> y_plan, const RiskField& field,
                const RiskParams& params) {
  if (y_plan.size() != static_cast<std::size_t>(field.n_steps()) + 1) {
    throw std::invalid_argument("grid risk: plan length != field steps + 1");
  }
  double total = 0.0;
  for (int k = 0; k <= field.n_steps(); ++k) {
    double column = 0.0;
    for (double y_cell : field.occupied_y(k)) {
      column += RiskKernel(y_plan[k], y_cell, params.sigma, params.tau);
    }
    total += params.StepWeight(k) * column;
  }
  return total;
}

double GridRisk(std::span<const double> y_plan, const EgoGrid& grid,
                double ds, const RiskParams& params) {
  if (y_plan.size() < 2) throw std::invalid_argument("grid risk: short plan");
  const int n_steps = static_cast<int>(y_plan.size()) - 1;
  return GridRisk(y_plan, RiskField::FromGrid(grid, ds, n_steps), params);
}

void ObjectiveProblem::Validate() const {
  geometry.Validate();
  weights.Validate();
  risk.Validate();
  if (!(ds > 0)) throw std::invalid_argument("objective: ds must be > 0");
  if (n_steps() < 1) throw std::invalid_argument("objective: empty reference");
  if (risk_field.n_steps() != n_steps()) {
    throw std::invalid_argument("objective: risk field / reference mismatch");
  }
  if (!weights.q_d_diag.empty() &&
      weights.q_d_diag.size() != static_cast<std::size_t>(n_steps()) + 1) {
    throw std::invalid_argument("objective: q_d diagonal must have N+1 rows");
  }
  if (!weights.q_u_diag.empty() &&
      weights.q_u_diag.size() != static_cast<std::size_t>(n_steps())) {
    throw std::invalid_argument("objective: q_u diagonal must have N rows");
  }
}

std::vector<double> BackpropagateRollout(
    std::span<const PlanarState> states, std::span<const double> u,
    double ds, double l_r, std::span<const double> d_y,
    std::span<const double> d_heading, std::span<const double> d_u) {
  const std::size_t n = u.size();
  if (states.size() != n + 1 || d_y.size() != n + 1 ||
      d_heading.size() != n + 1 || d_u.size() != n) {
    throw std::invalid_argument("backpropagate: inconsistent sizes");
  }
  std::vector<double> grad(n);
  double adj_y = d_y[n];
  double adj_h = d_heading[n];
  for (std::size_t k = n; k-- > 0;) {
    const double heading = states[k].heading;
    const double a = heading + u[k];
    const double c = std::cos(a);
    const double inv_c2 = 1.0 / (c * c);
    const double dy_da = ds * inv_c2;  // d y_{k+1} / d(heading_k or u_k)
    const double dh_du = ds / l_r * std::cos(heading) * inv_c2;
    const double dh_dh = 1.0 + ds / l_r * std::sin(u[k]) * std::sin(a) * inv_c2;
    grad[k] = d_u[k] + adj_y * dy_da + adj_h * dh_du;
    const double next_adj_h = d_heading[k] + adj_y * dy_da + adj_h * dh_dh;
    adj_y = d_y[k] + adj_y;
    adj_h = next_adj_h;
  }
  return grad;
}

ObjectiveEvaluation EvaluateObjective(const ObjectiveProblem& problem,
                                      std::span<const double> u,
                                      bool with_gradient) {
  const int n = problem.n_steps();
  if (u.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("objective: control count != N");
  }
  ObjectiveEvaluation eval;
  eval.states = Rollout(problem.initial, u, problem.ds, problem.geometry,
                        problem.domain_buffer);
  const auto& states = eval.states;
  const auto& ref = problem.reference.y;
  const ObjectiveWeights& w = problem.weights;
  const RiskParams& risk = problem.risk;
  const double width2 = std::pow(risk.sigma * risk.tau, 2);

  std::vector<double> d_y(n + 1, 0.0), d_h(n + 1, 0.0), d_u(n, 0.0);
  CostBreakdown& cost = eval.cost;
  for (int k = 0; k <= n; ++k) {
    const double y = states[k].y;
    const double e = y - ref[k];
    cost.deviation += w.QdAt(k) * e * e;
    d_y[k] += 2.0 * w.QdAt(k) * e;

    const double step_weight = risk.lambda_grid * risk.StepWeight(k);
    for (double y_cell : problem.risk_field.occupied_y(k)) {
      const double d = y - y_cell;
      const double kernel = std::exp(-d * d / (2.0 * width2));
      cost.risk += step_weight * kernel;
      d_y[k] -= step_weight * kernel * d / width2;
    }
  }
  for (int k = 0; k < n; ++k) {
    const double t = std::tan(u[k]);
    const double c = std::cos(u[k]);
    cost.effort += w.QuAt(k) * u[k] * u[k];
    cost.curvature += w.lambda_curve * t * t;
    d_u[k] = 2.0 * w.QuAt(k) * u[k] + w.lambda_curve * 2.0 * t / (c * c);
  }
  if (!std::isfinite(cost.total())) {
    // Locate the first offending step for the diagnostic.
    std::size_t bad = 0;
    for (int k = 0; k <= n; ++k) {
      if (!std::isfinite(states[k].y) || !std::isfinite(states[k].heading) ||
          (k < n && !std::isfinite(std::tan(u[k])))) {
        bad = k;
        break;
      }
    }
    std::ostringstream msg;
    msg << "objective is not finite (first bad step " << bad << ")";
    throw DomainError(msg.str(), bad);
  }
  if (with_gradient) {
    eval.gradient = BackpropagateRollout(states, u, problem.ds,
                                         problem.geometry.l_r, d_y, d_h, d_u);
  }
  return eval;
}

double LambdaGridLowerBound(double sigma, double tau) {
  if (!(sigma > 0) || !(tau > 0)) {
    throw std::invalid_argument("calibration: sigma and tau must be > 0");
  }
  return sigma * sigma * std::exp(1.0 / (2.0 * tau * tau));
}

double ImpliedMaxDeviation(double lambda_grid, double q_d) {
  if (!(lambda_grid >= 0) || !(q_d > 0)) {
    throw std::invalid_argument("calibration: need lambda >= 0, q_d > 0");
  }
  return std::sqrt(lambda_grid / q_d);
}

double TurningRadius(double delta_max, double wheelbase) {
  if (!(delta_max > 0 && delta_max < std::numbers::pi / 2) ||
      !(wheelbase > 0)) {
    throw std::invalid_argument(
        "turning radius: need delta_max in (0, pi/2) and wheelbase > 0");
  }
  return wheelbase / std::tan(delta_max);
}

double MaxLateralDeviation(double s, double delta_max, double wheelbase) {
  if (!(s >= 0)) throw std::invalid_argument("max deviation: s must be >= 0");
  const double radius = TurningRadius(delta_max, wheelbase);
  // 1 - cos(t) = 2 sin^2(t/2) avoids cancellation for small t.
  const double half = std::sin(0.5 * s / radius);
  return 2.0 * radius * half * half;
}

}  // namespace onrap
