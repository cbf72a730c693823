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
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "proxcenter/errors.hpp"
#include "proxcenter/problem.hpp"
#include "proxcenter/prox.hpp"
#include "proxcenter/subsolver.hpp"

namespace proxcenter {

namespace detail {

/// Deterministic raw-bits uniform in [0, 1); keeps norm estimates and
/// generated instances reproducible bit-for-bit across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ^ 0x9e3779b97f4a7c15ull) {
    // splitmix warmup so nearby seeds decorrelate
    next();
    next();
  }

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double two_pi = 6.283185307179586476925286766559;
    spare_ = r * std::sin(two_pi * u2);
    have_spare_ = true;
    return r * std::cos(two_pi * u2);
  }

  Eigen::VectorXd normal_vector(Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

  Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal();
    }
    return m;
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace detail

/// Largest singular value of M by power iteration on M'M, relative tolerance
/// 1e-10 on the Rayleigh quotient, iteration cap 1e4. The start vector is
/// seeded deterministically so repeated runs agree bit-for-bit.
inline double operator_norm(const Eigen::MatrixXd& M) {
  if (M.rows() == 0 || M.cols() == 0) {
    throw DimensionError("operator_norm: matrix must have nonzero dimensions");
  }
  constexpr int kMaxIter = 10000;
  constexpr double kRelTol = 1e-10;

  detail::Rng rng(0xA11CE5EEDull + 1315423911ull * static_cast<std::uint64_t>(M.rows()) +
                  2654435761ull * static_cast<std::uint64_t>(M.cols()));
  Eigen::VectorXd v = rng.normal_vector(M.cols());
  double vn = v.norm();
  if (vn == 0.0) return 0.0;
  v /= vn;

  double rho_prev = -1.0;
  for (int it = 0; it < kMaxIter; ++it) {
    const Eigen::VectorXd w = M * v;
    const double rho = w.squaredNorm();  // Rayleigh quotient of M'M at v
    if (rho == 0.0) return 0.0;
    if (std::abs(rho - rho_prev) <= kRelTol * rho) return std::sqrt(rho);
    rho_prev = rho;
    v.noalias() = M.transpose() * w;
    v /= v.norm();
  }
  throw SolverError("operator_norm: power iteration cap exceeded; last Rayleigh quotient " +
                        std::to_string(rho_prev),
                    std::sqrt(std::max(rho_prev, 0.0)));
}

/// Induced norm of M as a map from (R^m, ||.||_1) to (R^n, ||.||_2):
/// the largest Euclidean column norm. Used for simplex agents.
inline double max_column_norm(const Eigen::MatrixXd& M) {
  if (M.rows() == 0 || M.cols() == 0) {
    throw DimensionError("max_column_norm: matrix must have nonzero dimensions");
  }
  return M.colwise().norm().maxCoeff();
}

/// Smoothing data for a fixed problem: the smoothness parameter c, the
/// gradient Lipschitz constant L_c = (sum_i ||[C_i; D_i]||^2 / sigma_i) / c,
/// and the prox bound sum_i D_i.
struct SmoothingConfig {
  double c = 0.0;
  double lipschitz = 0.0;
  double op_norm_sq_over_sigma = 0.0;
  double prox_bound_sum = 0.0;
};

/// Smoothed dual value, gradient, and the per-agent minimizers at one
/// multiplier.
struct DualEvaluation {
  double value = 0.0;                        ///< f_c(lambda)
  Eigen::VectorXd gradient;                  ///< stacked [eq; ineq] residual at the minimizers
  std::vector<Eigen::VectorXd> primal_points;
  double plain_dual_lower = 0.0;             ///< f_c(lambda) - c * prox_bound_sum
};

/// Parameters from the Euclidean-multiplier selection rule:
/// c = eps / prox_bound_sum and the a-priori iteration bound.
struct EuclideanSelection {
  double c = 0.0;
  long k_bound = 0;
};

inline EuclideanSelection select_c_euclidean(double eps, double op_norm_sq_over_sigma,
                                             double prox_bound_sum) {
  if (!(eps > 0.0)) throw InvalidProblemError("select_c_euclidean: eps must be positive");
  if (!(prox_bound_sum > 0.0)) {
    throw InvalidProblemError(
        "select_c_euclidean: prox bound sum is zero (degenerate singleton sets)");
  }
  EuclideanSelection sel;
  sel.c = eps / prox_bound_sum;
  sel.k_bound = static_cast<long>(
                    std::ceil(2.0 * std::sqrt(op_norm_sq_over_sigma * prox_bound_sum) / eps)) -
                1;
  if (sel.k_bound < 0) sel.k_bound = 0;
  return sel;
}

/// Parameters from the compact-multiplier selection rule for a ball of bound
/// D_Q and a fixed iteration budget k.
struct BallSelection {
  double c = 0.0;
  double gap_bound = 0.0;  ///< (4/(k+1)) sqrt(D_Q * prox_bound_sum * op_norm_sq)
};

inline BallSelection select_c_ball(long k, double multiplier_bound, double op_norm_sq_over_sigma,
                                   double prox_bound_sum) {
  if (k < 0) throw InvalidProblemError("select_c_ball: k must be nonnegative");
  if (!(prox_bound_sum > 0.0)) {
    throw InvalidProblemError("select_c_ball: prox bound sum is zero");
  }
  BallSelection sel;
  const double kk = static_cast<double>(k + 1);
  sel.c = (2.0 / kk) * std::sqrt(multiplier_bound / prox_bound_sum * op_norm_sq_over_sigma);
  sel.gap_bound =
      (4.0 / kk) * std::sqrt(multiplier_bound * prox_bound_sum * op_norm_sq_over_sigma);
  return sel;
}

/// Evaluator of the smoothed dual
///
///   f_c(lambda) = sum_i min_{x_i in X_i} [ psi_i(x_i) + <lambda_eq, C_i x_i>
///                 + <lambda_ineq, D_i x_i> + c d_i(x_i) ]
///                 - <lambda_eq, gamma> - <lambda_ineq, beta>
///
/// with gradient the stacked coupling residual of the per-agent minimizers.
/// Operator norms and prox bounds are computed once at construction; c = 0
/// evaluations (the plain dual) lazily build one spectral factorization per
/// agent so repeated subgradient steps stay cheap.
///
/// Instances are meant for single-threaded use; the underlying problem may be
/// shared freely.
class DualOracle {
 public:
  explicit DualOracle(const SeparableProblem& p) : problem_(&p) {
    prox_.reserve(p.num_agents());
    coupling_norms_.reserve(p.num_agents());
    spectral_.resize(p.num_agents());
    warm_mu_.assign(p.num_agents(), -1.0);
    for (int i = 0; i < p.num_agents(); ++i) {
      const AgentBlock& a = p.agent(i);
      prox_.push_back(ProxFunction::for_set(a.set()));
      prox_bound_sum_ += prox_.back().upper_bound();

      Eigen::MatrixXd stacked(p.n_eq() + p.n_ineq(), a.dim());
      if (p.n_eq() > 0) stacked.topRows(p.n_eq()) = a.eq_coupling();
      if (p.n_ineq() > 0) stacked.bottomRows(p.n_ineq()) = a.ineq_coupling();
      const double norm = a.set().is_ball() ? operator_norm(stacked) : max_column_norm(stacked);
      coupling_norms_.push_back(norm);
      op_norm_sq_over_sigma_ += norm * norm;  // sigma_i = 1 for both prox kinds
    }
  }

  const SeparableProblem& problem() const noexcept { return *problem_; }
  double op_norm_sq_over_sigma() const noexcept { return op_norm_sq_over_sigma_; }
  double prox_bound_sum() const noexcept { return prox_bound_sum_; }
  const std::vector<double>& coupling_norms() const noexcept { return coupling_norms_; }
  const std::vector<ProxFunction>& prox_functions() const noexcept { return prox_; }

  SmoothingConfig config(double c) const {
    if (!(c > 0.0)) throw InvalidProblemError("smoothing parameter c must be positive");
    return SmoothingConfig{c, op_norm_sq_over_sigma_ / c, op_norm_sq_over_sigma_,
                           prox_bound_sum_};
  }

  /// Solve all agent subproblems at lambda and assemble f_c and its gradient.
  /// c = 0 evaluates the plain dual f_0 (exact for ball agents and for
  /// linear-objective simplex agents).
  DualEvaluation evaluate(const Eigen::VectorXd& lambda, double c) const {
    const SeparableProblem& p = *problem_;
    if (lambda.size() != p.n_eq() + p.n_ineq()) {
      throw DimensionError("evaluate: multiplier has dimension " + std::to_string(lambda.size()) +
                           ", expected " + std::to_string(p.n_eq() + p.n_ineq()));
    }
    if (c < 0.0) throw InvalidProblemError("evaluate: c must be nonnegative");
    const auto lambda_eq = lambda.head(p.n_eq());
    const auto lambda_ineq = lambda.tail(p.n_ineq());

    DualEvaluation out;
    out.primal_points.resize(p.num_agents());
    Eigen::VectorXd eq_sum = Eigen::VectorXd::Zero(p.n_eq());
    Eigen::VectorXd ineq_sum = Eigen::VectorXd::Zero(p.n_ineq());

    for (int i = 0; i < p.num_agents(); ++i) {
      const AgentBlock& a = p.agent(i);
      Eigen::VectorXd g_eff = a.linear();
      if (p.n_eq() > 0) g_eff.noalias() += a.eq_coupling().transpose() * lambda_eq;
      if (p.n_ineq() > 0) g_eff.noalias() += a.ineq_coupling().transpose() * lambda_ineq;

      SubproblemSolution sol;
      try {
        sol = solve_agent(i, a, g_eff, c);
      } catch (const SolverError& e) {
        throw SolverError("agent " + std::to_string(i) + ": " + e.what(), e.residual());
      }
      out.value += sol.objective_value;
      if (p.n_eq() > 0) eq_sum.noalias() += a.eq_coupling() * sol.minimizer;
      if (p.n_ineq() > 0) ineq_sum.noalias() += a.ineq_coupling() * sol.minimizer;
      out.primal_points[i] = std::move(sol.minimizer);
    }

    out.value -= lambda_eq.dot(p.eq_rhs()) + lambda_ineq.dot(p.ineq_rhs());
    out.gradient.resize(lambda.size());
    out.gradient.head(p.n_eq()) = eq_sum - p.eq_rhs();
    out.gradient.tail(p.n_ineq()) = ineq_sum - p.ineq_rhs();
    out.plain_dual_lower = out.value - c * prox_bound_sum_;
    return out;
  }

 private:
  SubproblemSolution solve_agent(int i, const AgentBlock& a, const Eigen::VectorXd& g_eff,
                                 double c) const {
    if (a.set().is_ball()) {
      const auto& ball = a.set().ball();
      if (c == 0.0) {
        if (!spectral_[i]) spectral_[i] = SpectralDecomposition::of(a.hessian());
        return solve_ball_quadratic(*spectral_[i], g_eff, ball.center, ball.radius, c);
      }
      return solve_ball_quadratic(a.hessian(), g_eff, ball.center, ball.radius, c,
                                  &warm_mu_[i]);
    }
    const bool linear_objective = a.hessian().cwiseAbs().maxCoeff() == 0.0;
    if (c == 0.0) {
      if (!linear_objective) {
        throw InvalidProblemError(
            "agent " + std::to_string(i) +
            ": exact plain-dual solves over a simplex require a linear objective");
      }
      return solve_simplex_vertex(g_eff);
    }
    if (linear_objective) return solve_simplex_linear(g_eff, c);
    return solve_generic(a.hessian(), g_eff, a.set(), prox_[i], c,
                         1e-10 * std::max(1.0, g_eff.norm()));
  }

  const SeparableProblem* problem_;
  std::vector<ProxFunction> prox_;
  std::vector<double> coupling_norms_;
  mutable std::vector<std::optional<SpectralDecomposition>> spectral_;
  mutable std::vector<double> warm_mu_;  // per-agent secular warm starts
  double op_norm_sq_over_sigma_ = 0.0;
  double prox_bound_sum_ = 0.0;
};

}  // namespace proxcenter
