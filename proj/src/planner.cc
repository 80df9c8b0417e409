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

#include "onrap/planner.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "onrap/errors.h"
#include "onrap/grid_io.h"

namespace onrap {
namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;
// Gap kept between the stepwise constraint and the rollout's own domain
// check so that a feasible iterate never trips the latter.
constexpr double kStepwiseMargin = 1e-6;

double HeadingAfter(double heading, double u, double ds, double l_r) {
  return heading + ds / l_r * std::sin(u) / std::cos(heading + u);
}

// Largest u in [lo, hi] whose next heading stays <= limit (the next heading
// is increasing in u). Assumes HeadingAfter(lo) <= limit.
double LargestAdmissible(double heading, double lo, double hi, double limit,
                         double ds, double l_r) {
  for (int it = 0; it < 200 && hi - lo > 0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (HeadingAfter(heading, mid, ds, l_r) <= limit ? lo : hi) = mid;
  }
  return lo;
}

double SmallestAdmissible(double heading, double lo, double hi, double limit,
                          double ds, double l_r) {
  for (int it = 0; it < 200 && hi - lo > 0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (HeadingAfter(heading, mid, ds, l_r) >= limit ? hi : lo) = mid;
  }
  return hi;
}

struct ProblemContext {
  ObjectiveProblem objective;
  const PlannerParams* params = nullptr;
  int n = 0;

  int ConstraintsPerStep() const { return 4; }
  int NumConstraints() const { return ConstraintsPerStep() * n; }
};

// Constraint layout, for k = 1..N (row r = 4 (k - 1)):
//   r + 0: heading upper   r + 1: heading lower
//   r + 2: y upper         r + 3: y lower
// In stepwise mode rows r+0 / r+1 bound heading_{k-1} + u_{k-1} instead.
void EvaluateConstraints(const ProblemContext& ctx,
                         std::span<const PlanarState> states,
                         std::span<const double> u, std::span<double> c) {
  const PlannerParams& p = *ctx.params;
  const double domain = kHalfPi - p.epsilon_buffer - kStepwiseMargin;
  for (int k = 1; k <= ctx.n; ++k) {
    const int r = 4 * (k - 1);
    if (p.heading_mode == HeadingConstraintMode::kStaticBox) {
      c[r + 0] = states[k].heading - p.psi_max;
      c[r + 1] = p.psi_min - states[k].heading;
    } else {
      const double a = states[k - 1].heading + u[k - 1];
      c[r + 0] = a - domain;
      c[r + 1] = -domain - a;
    }
    c[r + 2] = states[k].y - p.UpperBound(k);
    c[r + 3] = p.LowerBound(k) - states[k].y;
  }
}

NlpProblem BuildNlp(const ProblemContext& ctx) {
  const PlannerParams& p = *ctx.params;
  NlpProblem nlp;
  nlp.num_variables = ctx.n;
  nlp.lower.assign(ctx.n, p.u_min);
  nlp.upper.assign(ctx.n, p.u_max);
  nlp.num_constraints = ctx.NumConstraints();
  nlp.objective = [&ctx](std::span<const double> u, std::span<double> grad) {
    ObjectiveEvaluation eval = EvaluateObjective(ctx.objective, u, true);
    std::copy(eval.gradient.begin(), eval.gradient.end(), grad.begin());
    return eval.cost.total();
  };
  nlp.constraints = [&ctx](std::span<const double> u, std::span<double> c) {
    const auto states =
        Rollout(ctx.objective.initial, u, ctx.objective.ds,
                ctx.objective.geometry, ctx.objective.domain_buffer);
    EvaluateConstraints(ctx, states, u, c);
  };
  nlp.constraint_vjp = [&ctx](std::span<const double> u,
                              std::span<const double> w,
                              std::span<double> out) {
    const auto states =
        Rollout(ctx.objective.initial, u, ctx.objective.ds,
                ctx.objective.geometry, ctx.objective.domain_buffer);
    const int n = ctx.n;
    std::vector<double> d_y(n + 1, 0.0), d_h(n + 1, 0.0), d_u(n, 0.0);
    const bool stepwise =
        ctx.params->heading_mode == HeadingConstraintMode::kStepwise;
    for (int k = 1; k <= n; ++k) {
      const int r = 4 * (k - 1);
      if (stepwise) {
        const double a = w[r + 0] - w[r + 1];
        d_h[k - 1] += a;
        d_u[k - 1] += a;
      } else {
        d_h[k] += w[r + 0] - w[r + 1];
      }
      d_y[k] += w[r + 2] - w[r + 3];
    }
    const auto grad =
        BackpropagateRollout(states, u, ctx.objective.ds,
                             ctx.objective.geometry.l_r, d_y, d_h, d_u);
    std::copy(grad.begin(), grad.end(), out.begin());
  };
  nlp.feasibility_gate = [&ctx](std::vector<double>& u) {
    return EnforceHeadingFeasibility(ctx.objective.initial, u, *ctx.params);
  };
  return nlp;
}

PlanResult MakeResult(const ProblemContext& ctx, const SolverResult& solved,
                      int start_index) {
  PlanResult result;
  result.controls = solved.x;
  const ObjectiveEvaluation eval =
      EvaluateObjective(ctx.objective, result.controls, false);
  result.states = eval.states;
  result.cost = eval.cost;
  result.status = solved.status;
  result.iterations = solved.iterations;
  result.start_index = start_index;
  result.max_violation = solved.max_violation;
  result.history = solved.history;
  return result;
}

}  // namespace

double PlannerParams::DefaultHeadingBound(double u_max, double eps) {
  return kHalfPi - u_max - eps - 0.01;
}

int PlannerParams::n_steps() const {
  return static_cast<int>(std::lround(horizon_length / ds));
}

double PlannerParams::LowerBound(int k) const {
  return y_lb_steps.empty() ? y_lb : y_lb_steps.at(k);
}

double PlannerParams::UpperBound(int k) const {
  return y_ub_steps.empty() ? y_ub : y_ub_steps.at(k);
}

void PlannerParams::Validate() const {
  geometry.Validate();
  weights.Validate();
  risk.Validate();
  if (!(ds > 0) || !(horizon_length > 0) || n_steps() < 1) {
    throw std::invalid_argument("planner params: need ds > 0 and N >= 1");
  }
  if (std::abs(n_steps() * ds - horizon_length) > 1e-9 * horizon_length) {
    throw std::invalid_argument(
        "planner params: horizon must be a multiple of ds");
  }
  if (!(u_min < u_max)) {
    throw std::invalid_argument("planner params: need u_min < u_max");
  }
  if (!(epsilon_buffer > 0)) {
    throw std::invalid_argument("planner params: epsilon must be > 0");
  }
  if (heading_mode == HeadingConstraintMode::kStaticBox) {
    if (!(psi_min > -kHalfPi - u_min + epsilon_buffer) ||
        !(psi_max < kHalfPi - u_max - epsilon_buffer) ||
        !(psi_min < psi_max)) {
      throw std::invalid_argument(
          "planner params: heading box leaves the model domain "
          "(need psi_min > -pi/2 - u_min + eps, psi_max < pi/2 - u_max - eps)");
    }
  }
  const std::size_t steps = static_cast<std::size_t>(n_steps()) + 1;
  if ((!y_lb_steps.empty() && y_lb_steps.size() != steps) ||
      (!y_ub_steps.empty() && y_ub_steps.size() != steps)) {
    throw std::invalid_argument("planner params: per-step bounds need N+1");
  }
  for (int k = 1; k <= n_steps(); ++k) {
    if (!(LowerBound(k) < UpperBound(k))) {
      throw std::invalid_argument("planner params: empty lateral corridor");
    }
  }
}

bool EnforceHeadingFeasibility(const PlanarState& initial,
                               std::vector<double>& controls,
                               const PlannerParams& params) {
  const double ds = params.ds;
  const double l_r = params.geometry.l_r;
  double heading = initial.heading;
  if (params.heading_mode == HeadingConstraintMode::kStaticBox) {
    if (!(heading >= params.psi_min && heading <= params.psi_max)) {
      return false;
    }
    for (double& u : controls) {
      u = std::clamp(u, params.u_min, params.u_max);
      double next = HeadingAfter(heading, u, ds, l_r);
      if (next > params.psi_max) {
        if (HeadingAfter(heading, params.u_min, ds, l_r) > params.psi_max) {
          return false;
        }
        u = LargestAdmissible(heading, params.u_min, u, params.psi_max, ds,
                              l_r);
      } else if (next < params.psi_min) {
        if (HeadingAfter(heading, params.u_max, ds, l_r) < params.psi_min) {
          return false;
        }
        u = SmallestAdmissible(heading, u, params.u_max, params.psi_min, ds,
                               l_r);
      }
      next = HeadingAfter(heading, u, ds, l_r);
      if (!(next >= params.psi_min && next <= params.psi_max)) return false;
      heading = next;
    }
    return true;
  }
  const double domain = kHalfPi - params.epsilon_buffer - kStepwiseMargin;
  for (double& u : controls) {
    const double lo = std::max(params.u_min, -domain - heading);
    const double hi = std::min(params.u_max, domain - heading);
    if (lo > hi) return false;
    u = std::clamp(u, lo, hi);
    heading = HeadingAfter(heading, u, ds, l_r);
  }
  return true;
}

bool IsHardFeasible(const PlanResult& result, const PlannerParams& params,
                    std::string* why) {
  auto fail = [why](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  const int n = params.n_steps();
  if (static_cast<int>(result.controls.size()) != n ||
      static_cast<int>(result.states.size()) != n + 1) {
    return fail("size mismatch");
  }
  for (int k = 0; k < n; ++k) {
    const double u = result.controls[k];
    if (u < params.u_min || u > params.u_max) {
      return fail("control out of box at step " + std::to_string(k));
    }
    if (!(std::abs(result.states[k].heading + u) < kHalfPi)) {
      return fail("domain violated at step " + std::to_string(k));
    }
  }
  if (params.heading_mode == HeadingConstraintMode::kStaticBox) {
    for (int k = 0; k <= n; ++k) {
      const double h = result.states[k].heading;
      if (h < params.psi_min || h > params.psi_max) {
        return fail("heading box violated at step " + std::to_string(k));
      }
    }
  }
  const auto replay = Rollout(result.states.front(), result.controls,
                              params.ds, params.geometry,
                              params.epsilon_buffer);
  for (int k = 0; k <= n; ++k) {
    if (replay[k].x != result.states[k].x ||
        replay[k].y != result.states[k].y ||
        replay[k].heading != result.states[k].heading) {
      return fail("states do not reproduce the rollout");
    }
  }
  return true;
}

ControlSequence TrackingControls(const PlanarState& initial,
                                 std::span<const double> target_y,
                                 const PlannerParams& params) {
  const int n = params.n_steps();
  if (static_cast<int>(target_y.size()) != n + 1) {
    throw std::invalid_argument("tracking controls: need N+1 targets");
  }
  ControlSequence u(n, 0.0);
  const double domain = kHalfPi - params.epsilon_buffer - 1e-3;
  PlanarState s = initial;
  for (int k = 0; k < n; ++k) {
    const double angle = std::atan((target_y[k + 1] - s.y) / params.ds);
    u[k] = std::clamp(angle - s.heading, params.u_min, params.u_max);
    u[k] = std::clamp(u[k], -domain - s.heading, domain - s.heading);
    std::vector<double> one{u[k]};
    // Reuse the heading repair on this single step.
    PlanarState here = s;
    if (EnforceHeadingFeasibility(here, one, params)) u[k] = one[0];
    s = Step(s, u[k], params.ds, params.geometry.l_r, params.epsilon_buffer);
  }
  return u;
}

ControlSequence WarmStartShift(const PlanResult& previous) {
  const auto& u = previous.controls;
  if (u.size() < 2) {
    throw std::invalid_argument("warm start: need at least two controls");
  }
  ControlSequence shifted(u.begin() + 1, u.end());
  shifted.push_back(u.back());
  return shifted;
}

ControlSequence ColdStart(int n_steps) {
  return ControlSequence(static_cast<std::size_t>(n_steps), 0.0);
}

PlanResult Plan(const PlanarState& initial, const RiskField& risk_field,
                const ReferencePath& reference, const PlannerParams& params,
                const std::optional<ControlSequence>& warm_start) {
  const auto t0 = std::chrono::steady_clock::now();
  params.Validate();
  const int n = params.n_steps();
  if (reference.n_steps() != n || std::abs(reference.ds - params.ds) > 1e-12) {
    throw std::invalid_argument("plan: reference not resampled to planner steps");
  }
  if (risk_field.n_steps() != n) {
    throw std::invalid_argument("plan: risk field does not match horizon");
  }
  if (params.heading_mode == HeadingConstraintMode::kStaticBox) {
    if (!(initial.heading > params.psi_min && initial.heading < params.psi_max)) {
      throw DomainError("plan: initial heading outside the heading box");
    }
  } else if (!(std::abs(initial.heading) <
               kHalfPi - params.epsilon_buffer)) {
    throw DomainError("plan: initial heading outside the model domain");
  }

  ProblemContext ctx;
  ctx.params = &params;
  ctx.n = n;
  ctx.objective.initial = initial;
  ctx.objective.ds = params.ds;
  ctx.objective.geometry = params.geometry;
  ctx.objective.domain_buffer = params.epsilon_buffer;
  ctx.objective.reference = reference;
  ctx.objective.risk_field = risk_field;
  ctx.objective.weights = params.weights;
  ctx.objective.risk = params.risk;
  ctx.objective.Validate();
  const NlpProblem nlp = BuildNlp(ctx);

  std::vector<ControlSequence> starts;
  if (warm_start && static_cast<int>(warm_start->size()) == n) {
    starts.push_back(*warm_start);
  } else {
    starts.push_back(ColdStart(n));
  }
  if (params.multi_start && !risk_field.empty()) {
    std::vector<double> target(reference.y.begin(), reference.y.end());
    starts.push_back(TrackingControls(initial, target, params));
    const double offset = params.risk.sigma;
    for (double side : {1.0, -1.0}) {
      std::vector<double> shifted = target;
      // Blend in the offset so the start still begins at the ego.
      for (int k = 0; k <= n; ++k) {
        shifted[k] += side * offset * std::min(1.0, k / 4.0);
        shifted[k] = std::clamp(shifted[k], params.LowerBound(k) + 0.05,
                                params.UpperBound(k) - 0.05);
      }
      starts.push_back(TrackingControls(initial, shifted, params));
    }
  }

  std::optional<PlanResult> best;
  int total_iterations = 0;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    std::vector<double> x0 = starts[i];
    if (!EnforceHeadingFeasibility(initial, x0, params)) x0 = ColdStart(n);
    SolverResult solved;
    try {
      solved = SolveNlp(nlp, x0, params.solver);
    } catch (const DomainError&) {
      continue;  // start outside the model domain; others may still work
    }
    total_iterations += solved.iterations;
    PlanResult candidate = MakeResult(ctx, solved, static_cast<int>(i));
    if (!IsHardFeasible(candidate, params)) continue;
    auto rank = [](const PlanResult& r) {
      return r.status == SolverStatus::kInfeasible ? 1 : 0;
    };
    const bool better =
        !best || rank(candidate) < rank(*best) ||
        (rank(candidate) == rank(*best) &&
         candidate.cost.total() <
             best->cost.total() -
                 1e-9 * std::max(1.0, std::abs(best->cost.total())));
    if (better) best = std::move(candidate);
  }
  if (!best) {
    // Straight ahead is always inside the heading box from a feasible start.
    SolverResult fallback;
    fallback.x = ColdStart(n);
    fallback.status = SolverStatus::kInfeasible;
    best = MakeResult(ctx, fallback, 0);
  }
  best->total_iterations = total_iterations;
  best->wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return *best;
}

PlanResult Plan(const PlanarState& initial, const EgoGrid& grid,
                const ReferencePath& reference, const PlannerParams& params,
                const std::optional<ControlSequence>& warm_start) {
  return Plan(initial, RiskField::FromGrid(grid, params.ds, params.n_steps()),
              reference, params, warm_start);
}

PlanResult Plan(const PlanarState& initial,
                std::span<const EgoGrid> per_step_grids,
                const ReferencePath& reference, const PlannerParams& params,
                const std::optional<ControlSequence>& warm_start) {
  return Plan(initial,
              RiskField::FromGrids(per_step_grids, params.ds,
                                   params.n_steps()),
              reference, params, warm_start);
}

void WriteDiagnosticsCsv(std::ostream& out, const PlanResult& result,
                         const PlanarState& initial,
                         const RiskField& risk_field,
                         const ReferencePath& reference,
                         const PlannerParams& params) {
  ObjectiveProblem problem;
  problem.initial = initial;
  problem.ds = params.ds;
  problem.geometry = params.geometry;
  problem.domain_buffer = params.epsilon_buffer;
  problem.reference = reference;
  problem.risk_field = risk_field;
  problem.weights = params.weights;
  problem.risk = params.risk;
  out << "iteration,penalty_round,deviation,risk,effort,curvature,total,"
         "merit,max_violation,projected_gradient\n";
  for (const IterationRecord& rec : result.history) {
    if (rec.x.empty()) continue;
    const CostBreakdown c = EvaluateObjective(problem, rec.x, false).cost;
    out << rec.iteration << ',' << rec.penalty_round << ','
        << FormatDouble(c.deviation) << ',' << FormatDouble(c.risk) << ','
        << FormatDouble(c.effort) << ',' << FormatDouble(c.curvature) << ','
        << FormatDouble(c.total()) << ',' << FormatDouble(rec.merit) << ','
        << FormatDouble(rec.max_violation) << ','
        << FormatDouble(rec.projected_gradient) << '\n';
  }
}

}  // namespace onrap
