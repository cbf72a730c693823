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
#include <limits>
#include <optional>
#include <string>

#include "proxcenter/errors.hpp"
#include "proxcenter/problem.hpp"
#include "proxcenter/prox.hpp"

namespace proxcenter {

/// Result of one agent subproblem solve.
struct SubproblemSolution {
  Eigen::VectorXd minimizer;
  double objective_value = 0.0;
  /// KKT multiplier of the ball constraint; 0 when the minimizer is interior
  /// or the constraint is inactive. Always 0 for simplex solves.
  double kkt_multiplier = 0.0;
  int iterations = 0;
  /// True when the regularized Hessian was singular along the gradient and a
  /// minimum-norm representative of a non-unique minimizer set was returned.
  bool hard_case = false;
};

namespace detail {

constexpr int kSecularMaxIter = 200;
constexpr double kSecularRelTol = 1e-10;

/// Secular iteration in the 1/||y|| parametrization for a diagonalized
/// quadratic: find mu > 0 with ||y(mu)|| = R where y_j(mu) = -beta_j/(a_j+mu).
/// Assumes a root exists in (0, hi].
inline double secular_root_spectral(const Eigen::VectorXd& a, const Eigen::VectorXd& beta,
                                    double R, double hi, int* iterations) {
  double lo = 0.0;
  double mu = std::min(hi, std::max(1e-12 * hi, 0.5 * hi));
  for (int it = 0; it < kSecularMaxIter; ++it) {
    double n2 = 0.0;
    double q2 = 0.0;
    for (Eigen::Index j = 0; j < a.size(); ++j) {
      const double d = a[j] + mu;
      const double yj = beta[j] / d;
      n2 += yj * yj;
      q2 += yj * yj / d;
    }
    const double n = std::sqrt(n2);
    if (std::abs(n - R) <= kSecularRelTol * R) {
      *iterations = it + 1;
      return mu;
    }
    if (n > R) {
      lo = mu;
    } else {
      hi = mu;
    }
    double next = mu + (n2 / q2) * ((n - R) / R);
    if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
    mu = next;
  }
  double n_final = 0.0;
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    const double yj = beta[j] / (a[j] + mu);
    n_final += yj * yj;
  }
  throw SolverError("ball subproblem: secular iteration did not converge",
                    std::abs(std::sqrt(n_final) - R));
}

}  // namespace detail

/// Cached spectral factorization of a fixed Hessian, for repeated ball solves
/// with c = 0 where the regularized system may be singular.
struct SpectralDecomposition {
  Eigen::MatrixXd eigenvectors;
  Eigen::VectorXd eigenvalues;

  static SpectralDecomposition of(const Eigen::MatrixXd& H) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    if (es.info() != Eigen::Success) {
      throw SolverError("spectral decomposition failed", 0.0);
    }
    return SpectralDecomposition{es.eigenvectors(), es.eigenvalues()};
  }
};

/// Minimize 0.5 x'Hx + g_eff'x + (c/2)||x - x0||^2 over ||x - x0|| <= R,
/// given the spectral factorization of H. Handles c = 0 with singular H,
/// including the hard case (right-hand side orthogonal to the null space),
/// where the minimum-norm minimizer is returned and flagged.
inline SubproblemSolution solve_ball_quadratic(const SpectralDecomposition& eig,
                                               const Eigen::VectorXd& g_eff,
                                               const Eigen::VectorXd& x0, double R, double c) {
  if (!(R > 0.0)) throw InvalidProblemError("ball subproblem: radius must be positive");
  if (c < 0.0) throw InvalidProblemError("ball subproblem: c must be nonnegative");
  const Eigen::Index m = g_eff.size();
  const double eig_scale = std::max(1.0, eig.eigenvalues.cwiseAbs().maxCoeff());
  if (eig.eigenvalues.minCoeff() < -1e-10 * eig_scale) {
    throw InvalidProblemError("ball subproblem: Hessian is not positive semidefinite");
  }

  // Shift to y = x - x0. The linear term becomes b = H x0 + g_eff and the
  // quadratic term H + cI, diagonal a_j = d_j + c in the eigenbasis.
  const Eigen::VectorXd b =
      eig.eigenvectors * (eig.eigenvalues.asDiagonal() * (eig.eigenvectors.transpose() * x0)) +
      g_eff;
  const Eigen::VectorXd beta = eig.eigenvectors.transpose() * b;
  Eigen::VectorXd a = (eig.eigenvalues.array() + c).cwiseMax(0.0).matrix();
  const double a_scale = std::max(1.0, a.maxCoeff());
  const double null_tol = 1e-12 * a_scale;

  auto finish = [&](const Eigen::VectorXd& y, double mu, int iters,
                    bool hard) -> SubproblemSolution {
    SubproblemSolution sol;
    sol.minimizer = x0 + eig.eigenvectors * y;
    const Eigen::VectorXd hx = eig.eigenvectors * (eig.eigenvalues.asDiagonal() *
                                                   (eig.eigenvectors.transpose() * sol.minimizer));
    sol.objective_value = 0.5 * sol.minimizer.dot(hx) + g_eff.dot(sol.minimizer) +
                          0.5 * c * (sol.minimizer - x0).squaredNorm();
    sol.kkt_multiplier = mu;
    sol.iterations = iters;
    sol.hard_case = hard;
    return sol;
  };

  bool singular = false;
  double beta_null_sq = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    if (a[j] <= null_tol) {
      singular = true;
      beta_null_sq += beta[j] * beta[j];
    }
  }

  if (!singular) {
    const Eigen::VectorXd y = -(beta.array() / a.array()).matrix();
    if (y.norm() <= R) return finish(y, 0.0, 0, false);
  } else if (beta_null_sq <= (1e-11 * std::max(1.0, b.norm())) * (1e-11 * std::max(1.0, b.norm()))) {
    // Hard case: the minimum-norm solution of the reduced system. If it fits
    // in the ball it is a global minimizer (the objective is flat along the
    // null space); otherwise a boundary root with mu > 0 exists below.
    Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
    for (Eigen::Index j = 0; j < m; ++j) {
      if (a[j] > null_tol) y[j] = -beta[j] / a[j];
    }
    if (y.norm() <= R) return finish(y, 0.0, 0, true);
  }

  const double hi = std::max(b.norm() / R, 1e-300);
  int iters = 0;
  const double mu = detail::secular_root_spectral(a, beta, R, hi, &iters);
  const Eigen::VectorXd y = -(beta.array() / (a.array() + mu)).matrix();
  return finish(y, mu, iters, false);
}

/// Minimize 0.5 x'Hx + g_eff'x + (c/2)||x - x0||^2 over ||x - x0|| <= R.
///
/// The regularized system (H + (c + mu)I) y = -(g_eff + H x0) is solved by a
/// dense Cholesky factorization recomputed per mu-iterate; the boundary
/// multiplier solves the secular equation 1/||y(mu)|| = 1/R by safeguarded
/// Newton bracketed in (0, ||g_eff + H x0||/R]. A singular regularized system
/// (c = 0 with rank-deficient H) falls back to the spectral path above.
///
/// warm_mu, when given, seeds the Newton iteration with a previous boundary
/// multiplier and receives the final one; the minimizer is unaffected.
inline SubproblemSolution solve_ball_quadratic(const Eigen::MatrixXd& H,
                                               const Eigen::VectorXd& g_eff,
                                               const Eigen::VectorXd& x0, double R, double c,
                                               double* warm_mu = nullptr) {
  if (!(R > 0.0)) throw InvalidProblemError("ball subproblem: radius must be positive");
  if (c < 0.0) throw InvalidProblemError("ball subproblem: c must be nonnegative");
  if (H.rows() != H.cols() || H.rows() != g_eff.size() || x0.size() != g_eff.size()) {
    throw DimensionError("ball subproblem: H, g_eff, x0 dimensions disagree");
  }
  const Eigen::Index m = g_eff.size();
  const double h_scale = std::max(1.0, H.size() > 0 ? H.cwiseAbs().maxCoeff() : 0.0);
  if ((H - H.transpose()).cwiseAbs().maxCoeff() > 1e-10 * h_scale) {
    throw InvalidProblemError("ball subproblem: Hessian is not symmetric");
  }

  const Eigen::VectorXd b = H * x0 + g_eff;
  Eigen::MatrixXd A = H;
  A.diagonal().array() += c;

  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) {
    return solve_ball_quadratic(SpectralDecomposition::of(H), g_eff, x0, R, c);
  }

  auto finish = [&](const Eigen::VectorXd& y, double mu, int iters) -> SubproblemSolution {
    SubproblemSolution sol;
    sol.minimizer = x0 + y;
    sol.objective_value = 0.5 * sol.minimizer.dot(H * sol.minimizer) + g_eff.dot(sol.minimizer) +
                          0.5 * c * y.squaredNorm();
    sol.kkt_multiplier = mu;
    sol.iterations = iters;
    if (warm_mu != nullptr) *warm_mu = mu;
    return sol;
  };

  Eigen::VectorXd y = -llt.solve(b);
  double n = y.norm();
  if (n <= R) return finish(y, 0.0, 0);

  // Boundary solution: safeguarded Newton on 1/||y(mu)|| - 1/R. The first
  // iterate is the warm-started multiplier when available, else the Newton
  // step from the mu = 0 factorization already at hand.
  double lo = 0.0;
  double hi = std::max(b.norm() / R, 1e-300);
  double mu;
  if (warm_mu != nullptr && *warm_mu > 0.0 && *warm_mu < hi) {
    mu = *warm_mu;
  } else {
    const Eigen::VectorXd w = llt.matrixL().solve(y);
    mu = (n * n / w.squaredNorm()) * ((n - R) / R);
    if (!(mu > lo) || !(mu < hi)) mu = 0.5 * hi;
  }
  for (int it = 0; it < detail::kSecularMaxIter; ++it) {
    A = H;
    A.diagonal().array() += c + mu;
    llt.compute(A);
    if (llt.info() != Eigen::Success) {
      return solve_ball_quadratic(SpectralDecomposition::of(H), g_eff, x0, R, c);
    }
    y = -llt.solve(b);
    n = y.norm();
    if (std::abs(n - R) <= detail::kSecularRelTol * R) return finish(y, mu, it + 1);
    if (n > R) {
      lo = mu;
    } else {
      hi = mu;
    }
    const Eigen::VectorXd w = llt.matrixL().solve(y);
    double next = mu + (n * n / w.squaredNorm()) * ((n - R) / R);
    if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
    mu = next;
  }
  throw SolverError("ball subproblem: secular iteration did not converge", std::abs(n - R));
}

/// Exact minimizer of <g_eff, x> + c (log m + sum x log x) over the simplex:
/// the softmax of -g_eff/c, computed with max-subtraction.
inline SubproblemSolution solve_simplex_linear(const Eigen::VectorXd& g_eff, double c) {
  if (!(c > 0.0)) {
    throw InvalidProblemError("simplex subproblem: entropy smoothing requires c > 0");
  }
  const Eigen::Index m = g_eff.size();
  if (m < 1) throw DimensionError("simplex subproblem: empty objective");
  const Eigen::VectorXd s = -g_eff / c;
  const double a = s.maxCoeff();
  const Eigen::VectorXd w = (s.array() - a).exp();
  const double total = w.sum();

  SubproblemSolution sol;
  sol.minimizer = w / total;
  const double log_total = std::log(total);
  double xlogx = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    xlogx += sol.minimizer[i] * (s[i] - a - log_total);
  }
  sol.objective_value =
      g_eff.dot(sol.minimizer) + c * (std::log(static_cast<double>(m)) + xlogx);
  return sol;
}

/// Exact minimizer of a linear objective over the simplex (vertex solve),
/// used by the plain dual at c = 0. Ties are broken toward the lowest index
/// and flagged as a non-unique minimizer.
inline SubproblemSolution solve_simplex_vertex(const Eigen::VectorXd& g_eff) {
  const Eigen::Index m = g_eff.size();
  if (m < 1) throw DimensionError("simplex subproblem: empty objective");
  const double vmin = g_eff.minCoeff();
  Eigen::Index best = -1;
  int ties = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (g_eff[i] <= vmin + 1e-12) {
      if (best < 0) best = i;
      ++ties;
    }
  }
  SubproblemSolution sol;
  sol.minimizer = Eigen::VectorXd::Zero(m);
  sol.minimizer[best] = 1.0;
  sol.objective_value = g_eff[best];
  sol.hard_case = ties > 1;
  return sol;
}

/// Iterative fallback for combinations without a closed form (quadratic over
/// a simplex, mismatched prox centers). Minimizes
/// 0.5 x'Hx + g_eff'x + c d(x) over the set.
///
/// Balls use accelerated projected gradient with strong-convexity momentum;
/// simplices use entropic mirror steps that absorb the c d(x) term in closed
/// form. Terminates when the Euclidean projected-gradient norm falls below
/// tol; linear convergence is guaranteed for c > 0.
inline SubproblemSolution solve_generic(const Eigen::MatrixXd& H, const Eigen::VectorXd& g_eff,
                                        const FeasibleSet& set, const ProxFunction& prox,
                                        double c, double tol = 1e-10, long max_iter = 100000,
                                        const Eigen::VectorXd* warm_start = nullptr) {
  if (c < 0.0) throw InvalidProblemError("generic subproblem: c must be nonnegative");
  const Eigen::Index m = g_eff.size();
  if (H.rows() != m || H.cols() != m || set.dimension() != m) {
    throw DimensionError("generic subproblem: dimensions disagree");
  }
  const double h_norm = m > 0 ? H.selfadjointView<Eigen::Lower>().operatorNorm() : 0.0;

  auto project = [&](const Eigen::VectorXd& z) -> Eigen::VectorXd {
    if (set.is_ball()) {
      const auto& ball = set.ball();
      Eigen::VectorXd d = z - ball.center;
      const double n = d.norm();
      if (n <= ball.radius) return z;
      return ball.center + (ball.radius / n) * d;
    }
    return project_to_simplex(z);
  };

  SubproblemSolution sol;

  if (set.is_ball()) {
    // Smooth part: quadratic + squared-Euclidean prox. L = ||H|| + c.
    const double L = h_norm + c;
    const double q = L > 0 ? c / L : 0.0;
    const double momentum = (1.0 - std::sqrt(q)) / (1.0 + std::sqrt(q));
    auto grad = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
      return H * x + g_eff + c * (x - prox.center());
    };
    auto objective = [&](const Eigen::VectorXd& x) {
      return 0.5 * x.dot(H * x) + g_eff.dot(x) + 0.5 * c * (x - prox.center()).squaredNorm();
    };
    Eigen::VectorXd x = warm_start != nullptr ? project(*warm_start) : project(prox.center());
    Eigen::VectorXd x_prev = x;
    double f_prev = objective(x);
    const double step = L > 0 ? 1.0 / L : 1.0;
    for (long k = 0; k < max_iter; ++k) {
      Eigen::VectorXd y = x + momentum * (x - x_prev);
      Eigen::VectorXd x_next = project(y - step * grad(y));
      const double f_next = objective(x_next);
      if (f_next > f_prev) {
        x_next = project(x - step * grad(x));  // momentum restart
      }
      x_prev = x;
      x = x_next;
      f_prev = objective(x);
      const double stat = (x - project(x - grad(x))).norm();
      if (stat <= tol) {
        sol.minimizer = x;
        sol.objective_value = f_prev;
        sol.iterations = static_cast<int>(k + 1);
        return sol;
      }
    }
    throw SolverError("generic subproblem: iteration cap exceeded",
                      (x - project(x - grad(x))).norm());
  }

  // Simplex: entropic mirror steps x+ ~ softmax((log x - t grad_q(x))/(1 + c t))
  // keep iterates strictly interior and absorb the entropy prox exactly.
  const double t = h_norm > 0 ? 1.0 / h_norm : 1.0;
  auto grad_quad = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return H * x + g_eff; };
  auto full_grad = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    Eigen::VectorXd g = grad_quad(x);
    for (Eigen::Index i = 0; i < m; ++i) g[i] += c * (std::log(std::max(x[i], kEntropyFloor)) + 1.0);
    return g;
  };
  Eigen::VectorXd x = warm_start != nullptr && warm_start->minCoeff() > 0.0
                          ? *warm_start
                          : Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
  for (long k = 0; k < max_iter; ++k) {
    Eigen::VectorXd logits =
        ((x.array().max(kEntropyFloor).log() - t * grad_quad(x).array()) / (1.0 + c * t)).matrix();
    const double top = logits.maxCoeff();
    Eigen::VectorXd w = (logits.array() - top).exp();
    x = w / w.sum();
    const double stat = (x - project_to_simplex(x - full_grad(x))).norm();
    if (stat <= tol) {
      sol.minimizer = x;
      double xlogx = 0.0;
      for (Eigen::Index i = 0; i < m; ++i) {
        if (x[i] > kEntropyFloor) xlogx += x[i] * std::log(x[i]);
      }
      sol.objective_value = 0.5 * x.dot(H * x) + g_eff.dot(x) +
                            c * (std::log(static_cast<double>(m)) + xlogx);
      sol.iterations = static_cast<int>(k + 1);
      return sol;
    }
  }
  throw SolverError("generic subproblem: iteration cap exceeded",
                    (x - project_to_simplex(x - full_grad(x))).norm());
}

}  // namespace proxcenter
