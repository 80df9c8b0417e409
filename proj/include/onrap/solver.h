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

// Small dense NLP solver for box-bounded problems with a handful of smooth
// inequality constraints: projected quasi-Newton inner iterations inside an
// augmented-Lagrangian penalty loop, followed by an optional feasibility
// gate supplied by the caller.

#ifndef ONRAP_SOLVER_H_
#define ONRAP_SOLVER_H_

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace onrap {

enum class SolverStatus { kConverged, kMaxIterations, kInfeasible };

std::string ToString(SolverStatus status);

struct SolverOptions {
  // Projected gradient (inf-norm) relative to max(1, |f|).
  double gradient_tolerance = 1e-6;
  double constraint_tolerance = 1e-6;  // max violation
  int max_outer_iterations = 200;      // total inner iterations budget
  int max_penalty_rounds = 12;
  double initial_penalty = 1000.0;
  double penalty_growth = 10.0;
  double armijo = 1e-4;
  int max_line_search = 40;
  bool record_history = false;  // fill SolverResult::history
};

struct NlpProblem {
  int num_variables = 0;
  std::vector<double> lower, upper;
  int num_constraints = 0;
  /// f(x); writes df/dx into `grad`. May throw DomainError or return a
  /// non-finite value for points outside its domain.
  std::function<double(std::span<const double>, std::span<double>)> objective;
  /// Constraint values c_j(x) <= 0.
  std::function<void(std::span<const double>, std::span<double>)> constraints;
  /// Writes sum_j w_j * dc_j/dx into `out`.
  std::function<void(std::span<const double> x, std::span<const double> w,
                     std::span<double> out)>
      constraint_vjp;
  /// Optional hard-feasibility repair applied to the final iterate. Returns
  /// false when the iterate cannot be made feasible.
  std::function<bool(std::vector<double>&)> feasibility_gate;
};

struct IterationRecord {
  int iteration = 0;      // global inner iteration counter
  int penalty_round = 0;
  double objective = 0;   // f(x) without penalty terms
  double merit = 0;       // augmented objective being minimized
  double max_violation = 0;
  double projected_gradient = 0;
  std::vector<double> x;  // accepted iterate
};

struct SolverResult {
  std::vector<double> x;
  double objective = 0.0;
  double max_violation = 0.0;
  double projected_gradient = 0.0;
  int iterations = 0;
  int evaluations = 0;
  SolverStatus status = SolverStatus::kMaxIterations;
  std::vector<IterationRecord> history;
};

/// Unconstrained-in-all-but-boxes minimization. `merit` follows the same
/// convention as NlpProblem::objective. Used as the inner solver.
struct BoxSolveResult {
  std::vector<double> x;
  double value = 0.0;
  double projected_gradient = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

using MeritFunction =
    std::function<double(std::span<const double>, std::span<double>)>;

BoxSolveResult MinimizeBoxConstrained(
    const MeritFunction& merit, std::span<const double> lower,
    std::span<const double> upper, std::vector<double> x0,
    double gradient_tolerance, int max_iterations,
    const SolverOptions& options = {},
    const std::function<void(std::span<const double>, double, double)>&
        on_accept = {});

/// inf-norm of P(x - g) - x.
double ProjectedGradientNorm(std::span<const double> x,
                             std::span<const double> g,
                             std::span<const double> lower,
                             std::span<const double> upper);

/// Full solve. Throws DomainError when the objective is not finite at the
/// (projected) initial guess.
SolverResult SolveNlp(const NlpProblem& problem, std::vector<double> x0,
                      const SolverOptions& options = {});

}  // namespace onrap

#endif  // ONRAP_SOLVER_H_
