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

#include "onrap/solver.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "onrap/errors.h"

namespace onrap {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double SafeEval(const MeritFunction& f, std::span<const double> x,
                std::span<double> grad) {
  try {
    const double v = f(x, grad);
    if (!std::isfinite(v)) return kInf;
    for (double g : grad) {
      if (!std::isfinite(g)) return kInf;
    }
    return v;
  } catch (const DomainError&) {
    return kInf;
  }
}

void Project(std::span<double> x, std::span<const double> lower,
             std::span<const double> upper) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = std::clamp(x[i], lower[i], upper[i]);
  }
}

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Dense inverse-Hessian approximation, row-major.
class InverseHessian {
 public:
  explicit InverseHessian(std::size_t n) : n_(n), h_(n * n) { Reset(); }

  void Reset() {
    std::fill(h_.begin(), h_.end(), 0.0);
    for (std::size_t i = 0; i < n_; ++i) h_[i * n_ + i] = 1.0;
    fresh_ = true;
  }
  bool fresh() const { return fresh_; }

  // d_F = -H_FF g_F on the free set, zero elsewhere.
  void Direction(std::span<const double> g, const std::vector<bool>& free,
                 std::span<double> d) const {
    for (std::size_t i = 0; i < n_; ++i) {
      d[i] = 0.0;
      if (!free[i]) continue;
      for (std::size_t j = 0; j < n_; ++j) {
        if (free[j]) d[i] -= h_[i * n_ + j] * g[j];
      }
    }
  }

  void Update(std::span<const double> s, std::span<const double> y) {
    const double sy = Dot(s, y);
    const double yy = Dot(y, y);
    if (!(sy > 1e-12 * std::sqrt(Dot(s, s) * yy))) return;
    if (fresh_) {
      const double scale = sy / yy;
      for (double& v : h_) v *= scale;
      fresh_ = false;
    }
    const double rho = 1.0 / sy;
    std::vector<double> hy(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) hy[i] += h_[i * n_ + j] * y[j];
    }
    const double yhy = Dot(y, hy);
    // H+ = H - rho (s hy' + hy s') + (rho^2 yHy + rho) s s'
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        h_[i * n_ + j] += -rho * (s[i] * hy[j] + hy[i] * s[j]) +
                          (rho * rho * yhy + rho) * s[i] * s[j];
      }
    }
  }

 private:
  std::size_t n_;
  std::vector<double> h_;
  bool fresh_ = true;
};

}  // namespace

std::string ToString(SolverStatus status) {
  switch (status) {
    case SolverStatus::kConverged:
      return "converged";
    case SolverStatus::kMaxIterations:
      return "max_iter";
    case SolverStatus::kInfeasible:
      return "infeasible";
  }
  return "unknown";
}

double ProjectedGradientNorm(std::span<const double> x,
                             std::span<const double> g,
                             std::span<const double> lower,
                             std::span<const double> upper) {
  double norm = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double step = std::clamp(x[i] - g[i], lower[i], upper[i]) - x[i];
    norm = std::max(norm, std::abs(step));
  }
  return norm;
}

BoxSolveResult MinimizeBoxConstrained(
    const MeritFunction& merit, std::span<const double> lower,
    std::span<const double> upper, std::vector<double> x0,
    double gradient_tolerance, int max_iterations,
    const SolverOptions& options,
    const std::function<void(std::span<const double>, double, double)>&
        on_accept) {
  const std::size_t n = x0.size();
  if (lower.size() != n || upper.size() != n) {
    throw std::invalid_argument("box solve: bound size mismatch");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(lower[i] <= upper[i])) {
      throw std::invalid_argument("box solve: lower bound above upper bound");
    }
  }
  BoxSolveResult result;
  result.x = std::move(x0);
  std::vector<double>& x = result.x;
  Project(x, lower, upper);

  std::vector<double> g(n), g_trial(n), d(n), x_trial(n), s(n), y(n);
  double f = SafeEval(merit, x, g);
  ++result.evaluations;
  if (!std::isfinite(f)) {
    throw DomainError("solver: objective is not finite at the initial guess");
  }
  InverseHessian h(n);
  std::vector<bool> free(n);

  for (;;) {
    result.projected_gradient = ProjectedGradientNorm(x, g, lower, upper);
    if (result.projected_gradient <
        gradient_tolerance * std::max(1.0, std::abs(f))) {
      result.converged = true;
      break;
    }
    if (result.iterations >= max_iterations) break;

    for (std::size_t i = 0; i < n; ++i) {
      free[i] = !((x[i] <= lower[i] && g[i] > 0) ||
                  (x[i] >= upper[i] && g[i] < 0));
    }
    h.Direction(g, free, d);
    double slope = Dot(g, d);
    if (!(slope < 0)) {
      h.Reset();
      h.Direction(g, free, d);
      slope = Dot(g, d);
    }
    // A fresh (identity) metric has no scale information yet.
    double alpha = 1.0;
    if (h.fresh()) {
      double dmax = 0.0;
      for (double v : d) dmax = std::max(dmax, std::abs(v));
      if (dmax > 0) alpha = std::min(1.0, 0.1 / dmax);
    }

    bool accepted = false;
    double f_trial = kInf;
    for (int ls = 0; ls < options.max_line_search; ++ls) {
      for (std::size_t i = 0; i < n; ++i) x_trial[i] = x[i] + alpha * d[i];
      Project(x_trial, lower, upper);
      for (std::size_t i = 0; i < n; ++i) s[i] = x_trial[i] - x[i];
      const double decrease = Dot(g, s);
      if (!(decrease < 0)) break;
      f_trial = SafeEval(merit, x_trial, g_trial);
      ++result.evaluations;
      if (f_trial <= f + options.armijo * decrease) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      if (!h.fresh()) {
        h.Reset();
        continue;
      }
      break;  // no progress possible along the steepest-descent arc
    }
    for (std::size_t i = 0; i < n; ++i) y[i] = g_trial[i] - g[i];
    h.Update(s, y);
    x.swap(x_trial);
    g.swap(g_trial);
    f = f_trial;
    ++result.iterations;
    if (on_accept) {
      on_accept(x, f, ProjectedGradientNorm(x, g, lower, upper));
    }
  }
  result.value = f;
  return result;
}

SolverResult SolveNlp(const NlpProblem& problem, std::vector<double> x0,
                      const SolverOptions& options) {
  const int n = problem.num_variables;
  const int m = problem.num_constraints;
  if (static_cast<int>(x0.size()) != n ||
      static_cast<int>(problem.lower.size()) != n ||
      static_cast<int>(problem.upper.size()) != n) {
    throw std::invalid_argument("nlp: dimension mismatch");
  }
  if (m > 0 && (!problem.constraints || !problem.constraint_vjp)) {
    throw std::invalid_argument("nlp: constraints declared but not provided");
  }

  std::vector<double> multipliers(m, 0.0), c(m), w(m), vjp(n);
  double penalty = options.initial_penalty;

  auto max_violation = [&](std::span<const double> x) {
    if (m == 0) return 0.0;
    problem.constraints(x, c);
    double v = 0.0;
    for (double cj : c) v = std::max(v, cj);
    return v;
  };
  auto objective_only = [&](std::span<const double> x) {
    std::vector<double> grad(n);
    return SafeEval(problem.objective, x, grad);
  };
  MeritFunction merit = [&](std::span<const double> x,
                            std::span<double> grad) {
    double value = problem.objective(x, grad);
    if (m == 0 || !std::isfinite(value)) return value;
    problem.constraints(x, c);
    for (int j = 0; j < m; ++j) {
      w[j] = std::max(0.0, multipliers[j] + penalty * c[j]);
      value += (w[j] * w[j] - multipliers[j] * multipliers[j]) /
               (2.0 * penalty);
    }
    problem.constraint_vjp(x, w, vjp);
    for (int i = 0; i < n; ++i) grad[i] += vjp[i];
    return value;
  };

  SolverResult result;
  Project(x0, problem.lower, problem.upper);
  std::vector<double> x = std::move(x0);

  // Best iterate that already satisfies the constraints.
  std::vector<double> best_x;
  double best_f = kInf;
  auto consider_best = [&](std::span<const double> candidate) {
    if (max_violation(candidate) > options.constraint_tolerance) return;
    const double f = objective_only(candidate);
    if (f < best_f) {
      best_f = f;
      best_x.assign(candidate.begin(), candidate.end());
    }
  };
  {
    std::vector<double> grad(n);
    if (!std::isfinite(SafeEval(problem.objective, x, grad))) {
      throw DomainError("solver: objective is not finite at initial guess");
    }
  }
  consider_best(x);

  bool converged = false;
  double previous_violation = kInf;
  int round = 0;
  for (; round < options.max_penalty_rounds; ++round) {
    const int budget = options.max_outer_iterations - result.iterations;
    if (budget <= 0) break;
    const int history_before = static_cast<int>(result.history.size());
    std::function<void(std::span<const double>, double, double)> record;
    if (options.record_history) {
      record = [&](std::span<const double> xi, double merit_value,
                   double pg) {
        IterationRecord rec;
        rec.iteration = result.iterations +
                        static_cast<int>(result.history.size()) -
                        history_before + 1;
        rec.penalty_round = round;
        rec.merit = merit_value;
        rec.projected_gradient = pg;
        rec.objective = objective_only(xi);
        rec.max_violation = max_violation(xi);
        rec.x.assign(xi.begin(), xi.end());
        result.history.push_back(rec);
      };
    }
    // Inexact inner solves: loose early on, the final tolerance once the
    // constraints are nearly satisfied.
    const double inner_tolerance =
        std::max(options.gradient_tolerance,
                 previous_violation <= options.constraint_tolerance
                     ? 0.0
                     : 1e-2 * std::pow(0.1, round));
    BoxSolveResult inner = MinimizeBoxConstrained(
        merit, problem.lower, problem.upper, x, inner_tolerance, budget,
        options, record);
    result.iterations += inner.iterations;
    result.evaluations += inner.evaluations;
    x = std::move(inner.x);
    result.projected_gradient = inner.projected_gradient;
    consider_best(x);

    const double violation = max_violation(x);
    if (inner.converged && violation <= options.constraint_tolerance &&
        inner.projected_gradient <
            options.gradient_tolerance * std::max(1.0, std::abs(inner.value))) {
      converged = true;
      break;
    }
    if (m == 0) break;
    for (int j = 0; j < m; ++j) {
      multipliers[j] = std::max(0.0, multipliers[j] + penalty * c[j]);
    }
    if (violation > 0.25 * previous_violation) {
      penalty *= options.penalty_growth;
    }
    previous_violation = violation;
  }

  SolverStatus status =
      converged ? SolverStatus::kConverged : SolverStatus::kMaxIterations;
  if (problem.feasibility_gate && !problem.feasibility_gate(x)) {
    status = SolverStatus::kInfeasible;
  }
  double f_final = objective_only(x);
  double v_final = max_violation(x);
  if (status == SolverStatus::kConverged &&
      v_final > options.constraint_tolerance) {
    status = SolverStatus::kMaxIterations;
  }
  // Never hand back something worse than a feasible point already seen.
  const bool final_feasible = status != SolverStatus::kInfeasible &&
                              v_final <= options.constraint_tolerance;
  const bool worse =
      f_final > best_f + 1e-12 * std::max(1.0, std::abs(best_f));
  if (!best_x.empty() && (!final_feasible || worse)) {
    std::vector<double> candidate = best_x;
    if (!problem.feasibility_gate || problem.feasibility_gate(candidate)) {
      x = std::move(candidate);
      f_final = objective_only(x);
      v_final = max_violation(x);
      status = SolverStatus::kMaxIterations;
    }
  }
  result.x = std::move(x);
  result.objective = f_final;
  result.max_violation = v_final;
  result.status = status;
  return result;
}

}  // namespace onrap
