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
#include <cmath>
#include <vector>

#include "proxcenter/errors.hpp"
#include "proxcenter/problem.hpp"
#include "proxcenter/prox.hpp"
#include "proxcenter/solver_dsm.hpp"

namespace proxcenter {

struct ReferenceSolution {
  double objective = 0.0;
  std::vector<Eigen::VectorXd> minimizer;
  double eq_violation = 0.0;
  double ineq_violation = 0.0;
  long iterations = 0;
};

/// Independent high-accuracy solve of small coupled instances
/// (total dimension <= 20), used as a cross-check oracle.
///
/// Quadratic-penalty continuation: minimize
///   phi(x) + rho/2 (||eq(x)||^2 + ||[ineq(x)]+||^2)
/// over the product of the feasible sets by accelerated projected gradient,
/// warm-started across stages with rho = 10, 100, ..., 1e8.
inline ReferenceSolution reference_solve(const SeparableProblem& p) {
  if (p.total_dim() > 20) {
    throw InvalidProblemError("reference_solve: total dimension must be at most 20");
  }
  constexpr int kStages = 8;
  constexpr double kRhoInit = 10.0;
  constexpr double kInnerTol = 1e-12;
  constexpr long kInnerCap = 300000;

  const int n_agents = p.num_agents();
  const double stack_norm = operator_norm(stacked_coupling_matrix(p));
  double h_norm = 0.0;
  for (const auto& a : p.agents()) {
    if (a.dim() > 0) {
      h_norm = std::max(h_norm, a.hessian().selfadjointView<Eigen::Lower>().operatorNorm());
    }
  }

  auto project = [&](const FeasibleSet& set, const Eigen::VectorXd& z) -> Eigen::VectorXd {
    if (set.is_ball()) {
      const auto& b = set.ball();
      Eigen::VectorXd d = z - b.center;
      const double n = d.norm();
      return n <= b.radius ? z : Eigen::VectorXd(b.center + (b.radius / n) * d);
    }
    return project_to_simplex(z);
  };

  std::vector<Eigen::VectorXd> x(n_agents);
  for (int i = 0; i < n_agents; ++i) {
    x[i] = p.agent(i).set().is_ball()
               ? p.agent(i).set().ball().center
               : Eigen::VectorXd::Constant(p.agent(i).dim(), 1.0 / p.agent(i).dim());
  }

  long total_iters = 0;
  double rho = kRhoInit;
  for (int stage = 0; stage < kStages; ++stage, rho *= 10.0) {
    const double L = h_norm + rho * stack_norm * stack_norm + 1.0;
    const double step = 1.0 / L;

    auto penalized = [&](const std::vector<Eigen::VectorXd>& pt) {
      const CouplingResidual r = coupling_residual(p, pt);
      double v = total_objective(p, pt) + 0.5 * rho * r.eq.squaredNorm();
      if (r.ineq.size() > 0) v += 0.5 * rho * r.ineq.cwiseMax(0.0).squaredNorm();
      return v;
    };
    auto gradient = [&](const std::vector<Eigen::VectorXd>& pt,
                        std::vector<Eigen::VectorXd>& grad) {
      const CouplingResidual r = coupling_residual(p, pt);
      const Eigen::VectorXd ineq_plus =
          r.ineq.size() > 0 ? Eigen::VectorXd(r.ineq.cwiseMax(0.0)) : Eigen::VectorXd();
      for (int i = 0; i < n_agents; ++i) {
        const AgentBlock& a = p.agent(i);
        grad[i] = a.hessian() * pt[i] + a.linear();
        if (p.n_eq() > 0) grad[i].noalias() += rho * (a.eq_coupling().transpose() * r.eq);
        if (p.n_ineq() > 0) {
          grad[i].noalias() += rho * (a.ineq_coupling().transpose() * ineq_plus);
        }
      }
    };

    std::vector<Eigen::VectorXd> x_prev = x;
    std::vector<Eigen::VectorXd> y = x;
    std::vector<Eigen::VectorXd> grad(n_agents);
    double theta = 1.0;
    double f_best = penalized(x);

    for (long it = 0; it < kInnerCap; ++it) {
      ++total_iters;
      gradient(y, grad);
      std::vector<Eigen::VectorXd> x_next(n_agents);
      for (int i = 0; i < n_agents; ++i) {
        x_next[i] = project(p.agent(i).set(), y[i] - step * grad[i]);
      }
      const double f_next = penalized(x_next);
      if (f_next > f_best) {
        // monotone restart: plain projected-gradient step from the incumbent
        gradient(x, grad);
        for (int i = 0; i < n_agents; ++i) {
          x_next[i] = project(p.agent(i).set(), x[i] - step * grad[i]);
        }
        theta = 1.0;
      }
      const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
      const double momentum = (theta - 1.0) / theta_next;

      double disp = 0.0;
      double xnorm = 0.0;
      for (int i = 0; i < n_agents; ++i) {
        disp += (x_next[i] - x[i]).squaredNorm();
        xnorm += x_next[i].squaredNorm();
      }
      for (int i = 0; i < n_agents; ++i) {
        y[i] = x_next[i] + momentum * (x_next[i] - x[i]);
      }
      x_prev = std::move(x);
      x = std::move(x_next);
      theta = theta_next;
      f_best = std::min(f_best, penalized(x));

      if (std::sqrt(disp) <= kInnerTol * std::max(1.0, std::sqrt(xnorm))) break;
    }
  }

  ReferenceSolution out;
  out.minimizer = x;
  out.objective = total_objective(p, x);
  const CouplingResidual r = coupling_residual(p, x);
  out.eq_violation = r.eq.size() > 0 ? r.eq.norm() : 0.0;
  out.ineq_violation = r.ineq.size() > 0 ? r.ineq.cwiseMax(0.0).norm() : 0.0;
  out.iterations = total_iters;

  const double rhs_scale =
      std::max({1.0, p.eq_rhs().size() > 0 ? p.eq_rhs().cwiseAbs().maxCoeff() : 0.0,
                p.ineq_rhs().size() > 0 ? p.ineq_rhs().cwiseAbs().maxCoeff() : 0.0});
  if (out.eq_violation > 1e-5 * rhs_scale || out.ineq_violation > 1e-5 * rhs_scale) {
    throw SolverError("reference_solve: penalty continuation did not converge",
                      std::max(out.eq_violation, out.ineq_violation));
  }
  return out;
}

}  // namespace proxcenter
