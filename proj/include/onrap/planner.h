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

// Occupancy-driven local path planner: single-shooting NLP over the slip
// controls of the spatial bicycle model.

#ifndef ONRAP_PLANNER_H_
#define ONRAP_PLANNER_H_

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "onrap/cost.h"
#include "onrap/kinematics.h"
#include "onrap/occupancy.h"
#include "onrap/reference.h"
#include "onrap/solver.h"

namespace onrap {

enum class HeadingConstraintMode {
  kStaticBox,  // psi_min <= psi_k <= psi_max
  kStepwise,   // -pi/2 + eps < psi_k + u_k < pi/2 - eps
};

struct PlannerParams {
  double horizon_length = 10.0;  // [m]
  double ds = 0.5;               // [m]
  double u_min = -1.0;           // [rad]
  double u_max = 1.0;            // [rad]
  double epsilon_buffer = kDefaultDomainBuffer;
  // Heading box; must satisfy psi_min > -pi/2 - u_min + eps and
  // psi_max < pi/2 - u_max - eps. See DefaultHeadingBound().
  double psi_min = -DefaultHeadingBound(1.0, kDefaultDomainBuffer);
  double psi_max = DefaultHeadingBound(1.0, kDefaultDomainBuffer);
  HeadingConstraintMode heading_mode = HeadingConstraintMode::kStaticBox;

  // Lateral corridor for steps 1..N. Per-step vectors (size N+1) win over
  // the constant values when non-empty.
  double y_lb = -3.75;
  double y_ub = 3.75;
  std::vector<double> y_lb_steps;
  std::vector<double> y_ub_steps;

  ObjectiveWeights weights;
  RiskParams risk;
  VehicleGeometry geometry;
  SolverOptions solver;
  // Also try reference-tracking starts offset to either side of the
  // reference when the horizon contains occupied cells.
  bool multi_start = true;

  int n_steps() const;
  double LowerBound(int k) const;
  double UpperBound(int k) const;
  /// Throws std::invalid_argument on violated hard invariants (positive
  /// step, N >= 1, u_min < u_max, heading box inside the model domain).
  void Validate() const;

  /// pi/2 - u_max - eps - 0.01: the strict inequality with 10 mrad spare.
  static double DefaultHeadingBound(double u_max, double eps);
};

struct PlanResult {
  std::vector<PlanarState> states;  // N+1
  ControlSequence controls;         // N
  CostBreakdown cost;
  SolverStatus status = SolverStatus::kMaxIterations;
  int iterations = 0;        // iterations of the selected start
  int total_iterations = 0;  // all starts
  int start_index = 0;       // 0 = warm/cold start, then tracking starts
  double max_violation = 0.0;
  double wall_time_s = 0.0;
  std::vector<IterationRecord> history;  // selected start, if recorded
};

/// Solves the planning problem. `risk_field` must have N+1 steps.
/// Throws DomainError when the initial heading is outside the heading box
/// (or, in stepwise mode, outside the model domain), and
/// std::invalid_argument on inconsistent dimensions.
PlanResult Plan(const PlanarState& initial, const RiskField& risk_field,
                const ReferencePath& reference, const PlannerParams& params,
                const std::optional<ControlSequence>& warm_start = {});
PlanResult Plan(const PlanarState& initial, const EgoGrid& grid,
                const ReferencePath& reference, const PlannerParams& params,
                const std::optional<ControlSequence>& warm_start = {});
/// One predicted grid per step k = 0..N.
PlanResult Plan(const PlanarState& initial,
                std::span<const EgoGrid> per_step_grids,
                const ReferencePath& reference, const PlannerParams& params,
                const std::optional<ControlSequence>& warm_start = {});

/// Drops the first control and repeats the last one.
ControlSequence WarmStartShift(const PlanResult& previous);
ControlSequence ColdStart(int n_steps);

/// Forward pass that lowers/raises individual controls until every heading
/// lies inside the box (static mode) or every heading + control lies inside
/// the model domain (stepwise mode). Returns false if impossible.
bool EnforceHeadingFeasibility(const PlanarState& initial,
                               std::vector<double>& controls,
                               const PlannerParams& params);

/// Hard-feasibility audit of a returned plan: controls inside the box,
/// heading constraint, domain condition, and states == Rollout(controls).
bool IsHardFeasible(const PlanResult& result, const PlannerParams& params,
                    std::string* why = nullptr);

/// Controls that steer toward `target_y` (N+1 lateral targets) step by
/// step, respecting all bounds.
ControlSequence TrackingControls(const PlanarState& initial,
                                 std::span<const double> target_y,
                                 const PlannerParams& params);

/// Per-iteration cost breakdown as CSV:
/// iteration,penalty_round,deviation,risk,effort,curvature,total,merit,
/// max_violation,projected_gradient
void WriteDiagnosticsCsv(std::ostream& out, const PlanResult& result,
                         const PlanarState& initial,
                         const RiskField& risk_field,
                         const ReferencePath& reference,
                         const PlannerParams& params);

}  // namespace onrap

#endif  // ONRAP_PLANNER_H_
