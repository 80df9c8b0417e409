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

// Occupancy risk, the planning objective with its analytic gradient, and
// the closed-form weight calibration rules.

#ifndef ONRAP_COST_H_
#define ONRAP_COST_H_

#include <span>
#include <vector>

#include "onrap/kinematics.h"
#include "onrap/occupancy.h"
#include "onrap/reference.h"

namespace onrap {

struct RiskParams {
  double sigma = 1.5;        // desired safety distance [m]
  double tau = 2.0 / 3.0;    // sharpness scale
  double lambda_grid = 100;  // risk weight
  double alpha_decay = 0.95; // per-step discount on the risk term
  double y_des_max = 10.0;   // largest deviation a single cell may cause [m]

  /// Throws std::invalid_argument unless sigma > 0, tau > 0,
  /// lambda_grid >= 0 and alpha_decay in (0, 1]. The calibration bound on
  /// lambda_grid is checked separately (see CheckParameters in config.h).
  void Validate() const;
  double StepWeight(int k) const;
};

struct ObjectiveWeights {
  double q_d = 1.0;  // deviation weight (diagonal value)
  double q_u = 1.0;  // control effort weight (diagonal value)
  double lambda_curve = 10.0;
  // Optional per-step overrides of the diagonals (size N+1 and N).
  std::vector<double> q_d_diag;
  std::vector<double> q_u_diag;

  double QdAt(int k) const {
    return q_d_diag.empty() ? q_d : q_d_diag.at(k);
  }
  double QuAt(int k) const {
    return q_u_diag.empty() ? q_u : q_u_diag.at(k);
  }
  void Validate() const;
};

/// exp(-(y - y_cell)^2 / (2 (sigma tau)^2)).
double RiskKernel(double y, double y_cell, double sigma, double tau);

/// Occupied lateral coordinates seen by each planner step k = 0..N.
///
/// Every grid column is assigned to the step whose longitudinal position
/// k * ds is nearest to the column center, so a grid finer than ds still
/// contributes all of its columns. Occupancy is binarized at 0.5.
class RiskField {
 public:
  RiskField() = default;
  /// Same grid for every step. Throws std::invalid_argument if the grid
  /// does not cover x = n_steps * ds.
  static RiskField FromGrid(const EgoGrid& grid, double ds, int n_steps);
  /// One grid per step (size n_steps + 1), e.g. occupancy predictions.
  static RiskField FromGrids(std::span<const EgoGrid> per_step, double ds,
                             int n_steps);

  int n_steps() const { return static_cast<int>(occupied_.size()) - 1; }
  const std::vector<double>& occupied_y(int k) const { return occupied_[k]; }
  bool empty() const;

 private:
  static void AddGrid(const EgoGrid& grid, double ds, int n_steps, int only_k,
                      std::vector<std::vector<double>>& out);
  std::vector<std::vector<double>> occupied_;
};

/// Sum over steps of alpha^k times the kernel sum over occupied rows.
/// `y_plan` holds y_0..y_N. Not multiplied by lambda_grid.
double GridRisk(std::span<const double> y_plan, const RiskField& field,
                const RiskParams& params);
double GridRisk(std::span<const double> y_plan, const EgoGrid& grid,
                double ds, const RiskParams& params);

/// Everything the objective needs besides the controls.
struct ObjectiveProblem {
  PlanarState initial;
  double ds = 0.5;
  VehicleGeometry geometry;
  double domain_buffer = kDefaultDomainBuffer;
  ReferencePath reference;  // N+1 points
  RiskField risk_field;     // N+1 steps
  ObjectiveWeights weights;
  RiskParams risk;

  int n_steps() const { return reference.n_steps(); }
  void Validate() const;
};

struct CostBreakdown {
  double deviation = 0.0;
  double risk = 0.0;  // already multiplied by lambda_grid
  double effort = 0.0;
  double curvature = 0.0;  // already multiplied by lambda_curve
  double total() const { return deviation + risk + effort + curvature; }
};

struct ObjectiveEvaluation {
  CostBreakdown cost;
  std::vector<PlanarState> states;
  std::vector<double> gradient;  // d total / d u_k; empty if not requested
};

/// Rolls out `u` and evaluates
///   (y - y_ref)' Q_d (y - y_ref) + lambda_grid * risk + u' Q_u u
///   + lambda_curve * sum tan^2 u_k
/// over k = 0..N. The gradient is accumulated backwards through the
/// rollout recursion. Throws DomainError (with the step index) when the
/// rollout leaves the model domain or the cost is not finite.
ObjectiveEvaluation EvaluateObjective(const ObjectiveProblem& problem,
                                      std::span<const double> u,
                                      bool with_gradient = true);

/// Reverse pass through the rollout: given partial derivatives of a cost
/// with respect to every state (y_k, heading_k, k = 0..N) and direct
/// partials with respect to every control, returns the total derivative
/// with respect to the controls.
std::vector<double> BackpropagateRollout(
    std::span<const PlanarState> states, std::span<const double> u,
    double ds, double l_r, std::span<const double> d_y,
    std::span<const double> d_heading, std::span<const double> d_u);

// ---------------------------------------------------------------------------
// Calibration.

/// Smallest lambda_grid for which the risk of a cell at lateral distance
/// y_bar dominates the squared deviation y_bar^2 for every y_bar in
/// [0, sigma]: sigma^2 exp(1 / (2 tau^2)).
double LambdaGridLowerBound(double sigma, double tau);

/// Deviation at which a single cell's bounded risk equals the deviation
/// penalty: sqrt(lambda_grid / q_d).
double ImpliedMaxDeviation(double lambda_grid, double q_d = 1.0);

/// Circular-arc turning radius L / tan(delta_max).
double TurningRadius(double delta_max, double wheelbase);

/// R (1 - cos(s / R)) with R = TurningRadius(delta_max, wheelbase).
double MaxLateralDeviation(double s, double delta_max, double wheelbase);

}  // namespace onrap

#endif  // ONRAP_COST_H_
