// Copyright 2026 The proxcenter Authors
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

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "proxcenter/dual_oracle.hpp"
#include "proxcenter/problem.hpp"
#include "proxcenter/prox.hpp"
#include "proxcenter/solver_common.hpp"

namespace proxcenter {

/// Step-size schedule of the dual subgradient baseline.
struct StepRule {
  enum class Kind { kConstant, kDiminishing };
  Kind kind = Kind::kConstant;
  double s = 1.0;

  static StepRule constant(double s) {
    if (!(s > 0.0)) throw InvalidProblemError("step size must be positive");
    return StepRule{Kind::kConstant, s};
  }
  static StepRule diminishing(double s) {
    if (!(s > 0.0)) throw InvalidProblemError("step size must be positive");
    return StepRule{Kind::kDiminishing, s};
  }

  double step(long k) const {
    return kind == Kind::kConstant ? s : s / std::sqrt(static_cast<double>(k + 1));
  }
};

struct DsmOptions {
  /// Step rule; when unset, a constant step 1/||stacked coupling operator||^2
  /// is used so the baseline is not a strawman.
  std::optional<StepRule> rule;
  long max_iter = 5000;
  /// Optional early-stop accuracy on the ergodic certificate (< 0: run to cap).
  double target_eps = -1.0;
};

/// Full coupling operator [C_1 ... C_M; D_1 ... D_M] as one dense matrix.
inline Eigen::MatrixXd stacked_coupling_matrix(const SeparableProblem& p) {
  Eigen::MatrixXd full(p.n_eq() + p.n_ineq(), p.total_dim());
  int col = 0;
  for (int i = 0; i < p.num_agents(); ++i) {
    const AgentBlock& a = p.agent(i);
    if (p.n_eq() > 0) full.block(0, col, p.n_eq(), a.dim()) = a.eq_coupling();
    if (p.n_ineq() > 0) full.block(p.n_eq(), col, p.n_ineq(), a.dim()) = a.ineq_coupling();
    col += a.dim();
  }
  return full;
}

struct DsmResult {
  SolverRun run;
  Certificate certificate;  ///< formed on the ergodic primal average
};

/// Dual subgradient baseline: steepest-ascent multiplier updates
/// lambda^{k+1} = P_Q(lambda^k + c_k r(x^{k+1})) on the plain dual, with
/// agent subproblems solved at c = 0. The minimizer may be non-unique for
/// non-strictly convex objectives; the subsolver's minimum-norm tie-break is
/// used, which still yields a valid supergradient.
///
/// Tracks the best dual value seen and reports the primal both as the last
/// iterate and as the running (ergodic) average.
inline DsmResult run_dsm(const SeparableProblem& p, const MultiplierSpace& q,
                         const DsmOptions& opt) {
  if (q.n_eq() != p.n_eq() || q.n_ineq() != p.n_ineq()) {
    throw DimensionError("run_dsm: multiplier space does not match the coupling rows");
  }
  if (opt.max_iter < 1) throw InvalidProblemError("run_dsm: max_iter must be at least 1");

  const DualOracle oracle(p);
  StepRule rule = opt.rule.value_or(StepRule{});
  if (!opt.rule) {
    const double full_norm = operator_norm(stacked_coupling_matrix(p));
    rule = StepRule::constant(full_norm > 0.0 ? 1.0 / (full_norm * full_norm) : 1.0);
  }

  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  SolverRun run;
  run.trace.reserve(static_cast<std::size_t>(std::min<long>(opt.max_iter, 1 << 20)));

  const int n_agents = p.num_agents();
  Eigen::VectorXd lambda = q.center();
  Eigen::VectorXd lambda_best = lambda;
  double f0_best = -std::numeric_limits<double>::infinity();

  std::vector<Eigen::VectorXd> ergodic_sum(n_agents);
  for (int i = 0; i < n_agents; ++i) ergodic_sum[i] = Eigen::VectorXd::Zero(p.agent(i).dim());
  std::vector<Eigen::VectorXd> x_hat(n_agents);
  std::vector<Eigen::VectorXd> x_last;

  Certificate cert;
  long k = 0;
  for (; k < opt.max_iter; ++k) {
    const DualEvaluation ev = oracle.evaluate(lambda, 0.0);
    if (ev.value > f0_best) {
      f0_best = ev.value;
      lambda_best = lambda;
    }
    if (q.n_ineq() > 0) {
      run.min_ineq_multiplier =
          std::min(run.min_ineq_multiplier, lambda.tail(q.n_ineq()).minCoeff());
    }

    for (int i = 0; i < n_agents; ++i) ergodic_sum[i].noalias() += ev.primal_points[i];
    const double scale = 1.0 / static_cast<double>(k + 1);
    for (int i = 0; i < n_agents; ++i) x_hat[i] = scale * ergodic_sum[i];
    x_last = ev.primal_points;

    const double phi = total_objective(p, x_hat);
    const CouplingResidual resid = coupling_residual(p, x_hat);
    const double eq_violation = resid.eq.size() > 0 ? resid.eq.norm() : 0.0;
    const double ineq_violation = resid.ineq.size() > 0 ? resid.ineq.cwiseMax(0.0).norm() : 0.0;
    const double gap_surrogate = phi - f0_best;

    run.trace.push_back({k, ev.value, gap_surrogate, eq_violation, ineq_violation, elapsed()});

    cert.gap_surrogate = gap_surrogate;
    cert.eq_violation = eq_violation;
    cert.ineq_violation = ineq_violation;
    cert.multiplier_norm = lambda_best.norm();
    cert.multiplier_norm_is_estimate = true;

    if (opt.target_eps > 0.0) {
      const double ln = cert.multiplier_norm;
      const double eps_c = opt.target_eps * (ln + std::sqrt(ln * ln + 2.0));
      if (gap_surrogate <= opt.target_eps && eq_violation <= eps_c && ineq_violation <= eps_c) {
        run.certified = true;
        ++k;
        break;
      }
    }

    lambda = q.project(lambda + rule.step(k) * ev.gradient);
  }

  run.primal_average = x_hat;
  run.primal_last = x_last;
  run.multiplier = lambda_best;
  run.dual_value = f0_best;
  run.iterations = k;
  return DsmResult{std::move(run), cert};
}

}  // namespace proxcenter
