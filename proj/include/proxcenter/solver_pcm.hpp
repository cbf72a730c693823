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

/// Options for the proximal center solver.
struct PcmOptions {
  /// Target accuracy for the duality-gap surrogate; also drives the choice of
  /// the smoothness parameter.
  double epsilon = 1e-2;

  /// Maximum number of outer iterations; -1 selects the a-priori iteration
  /// bound of the accuracy-driven parameter selection.
  long max_iter = -1;

  enum class Mode {
    kFixedK,         ///< run the full budget, certify at the end
    kCertifiedStop,  ///< stop as soon as gap and violations certify
  };
  Mode mode = Mode::kCertifiedStop;

  enum class Variant {
    kArgmax,  ///< multiplier = f_c-argmax over {step point, previous, query}
    kXbar,    ///< multiplier = step point; skips one oracle call per iteration
  };
  Variant variant = Variant::kArgmax;

  /// Certificates are formed every this many iterations in certified mode.
  int certificate_interval = 10;

  /// Certify with an exact plain-dual evaluation (extra c = 0 solves, ball
  /// agents only) instead of the sandwich surrogate.
  bool use_exact_f0 = false;

  /// Record the per-iteration estimate-sequence slack (argmax variant).
  bool record_estimate_sequence = false;

  /// Grow the multiplier ball when iterates approach its boundary.
  bool adaptive_radius = true;
  double radius_growth = 2.0;
  int max_radius_restarts = 40;
};

/// Maximizer of the quadratic model f(u) + <grad, lambda - u> - L/2 ||lambda - u||^2
/// over Q: the projected gradient step u + grad/L.
inline Eigen::VectorXd gradient_step(const Eigen::VectorXd& u, const Eigen::VectorXd& grad,
                                     double lipschitz, const MultiplierSpace& q) {
  if (!(lipschitz > 0.0)) throw InvalidProblemError("gradient_step: Lipschitz constant must be positive");
  return q.project(u + grad / lipschitz);
}

/// Maximizer of -(L/sigma_Q) d_Q(lambda) + sum_l (l+1)/2 [f(u^l) + <grad_l, lambda - u^l>]
/// over Q for d_Q = 0.5 ||lambda||^2: the projection of (running weighted
/// gradient sum)/L. Affine terms independent of lambda drop out.
inline Eigen::VectorXd dual_averaging_step(const Eigen::VectorXd& grad_history_sum,
                                           double lipschitz, const MultiplierSpace& q) {
  if (!(lipschitz > 0.0)) {
    throw InvalidProblemError("dual_averaging_step: Lipschitz constant must be positive");
  }
  return q.project(grad_history_sum / lipschitz);
}

struct PcmResult {
  SolverRun run;
  Certificate certificate;
};

namespace detail {

struct PcmSelection {
  double c = 0.0;
  double lipschitz = 0.0;
  long k_bound = 0;
};

inline PcmSelection pcm_select(const MultiplierSpace& q, double eps, double op_norm_sq,
                               double prox_bound_sum) {
  PcmSelection out;
  if (op_norm_sq == 0.0) {
    // Decoupled problem: the dual is constant, one pass suffices.
    out.c = eps / prox_bound_sum;
    out.k_bound = 0;
    out.lipschitz = 1.0 / out.c;
    return out;
  }
  if (auto dq = q.upper_bound()) {
    // Compact multiplier ball: pick the iteration budget from the a-priori
    // gap bound (4/(k+1)) sqrt(D_Q (D_X+D_Z) op^2) <= eps, then c for that k.
    const double root = std::sqrt(*dq * prox_bound_sum * op_norm_sq);
    long k = static_cast<long>(std::ceil(4.0 * root / eps)) - 1;
    if (k < 0) k = 0;
    const BallSelection sel = select_c_ball(k, *dq, op_norm_sq, prox_bound_sum);
    out.c = sel.c;
    out.k_bound = k;
  } else {
    const EuclideanSelection sel = select_c_euclidean(eps, op_norm_sq, prox_bound_sum);
    out.c = sel.c;
    out.k_bound = sel.k_bound;
  }
  // Zero coupling operators make the dual constant; any positive step scale
  // works, so floor the Lipschitz constant away from zero.
  out.lipschitz = (op_norm_sq > 0.0 ? op_norm_sq : 1.0) / out.c;
  return out;
}

inline double positive_part_norm(const Eigen::VectorXd& v) {
  return v.size() > 0 ? v.cwiseMax(0.0).norm() : 0.0;
}

}  // namespace detail

/// Proximal center method: accelerated multiplier updates on the smoothed
/// dual with fixed prox centers, primal averaging, and certified termination.
///
/// Each iteration evaluates the smoothed dual at the query point u^k, takes
/// the projected model-maximizing step, keeps the best multiplier seen
/// (argmax variant), forms the dual-averaging point v^k, and advances
/// u^{k+1} = ((k+1) lambda^k + 2 v^k) / (k+3). The primal average weights
/// iterate l's minimizers by 2(l+1)/((k+1)(k+2)), which sums to one exactly.
///
/// When the multiplier ball is compact and an iterate approaches its
/// boundary, the radius grows geometrically, parameters are reselected, and
/// the scheme restarts from the current best multiplier.
inline PcmResult run_pcm(const SeparableProblem& p, const MultiplierSpace& q,
                         const PcmOptions& opt) {
  if (!(opt.epsilon > 0.0)) throw InvalidProblemError("run_pcm: epsilon must be positive");
  if (q.n_eq() != p.n_eq() || q.n_ineq() != p.n_ineq()) {
    throw DimensionError("run_pcm: multiplier space does not match the coupling rows");
  }

  const DualOracle oracle(p);
  const double op_norm_sq = oracle.op_norm_sq_over_sigma();
  const double pbs = oracle.prox_bound_sum();
  const double eps = opt.epsilon;

  MultiplierSpace q_cur = q;
  detail::PcmSelection sel = detail::pcm_select(q_cur, eps, op_norm_sq, pbs);

  const long max_passes = opt.max_iter >= 0 ? opt.max_iter : sel.k_bound + 1;
  if (max_passes < 1) throw InvalidProblemError("run_pcm: max_iter must be at least 1");
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  SolverRun run;
  run.k_bound = sel.k_bound;
  run.trace.reserve(static_cast<std::size_t>(std::min<long>(max_passes, 1 << 20)));

  const int n_agents = p.num_agents();
  Eigen::VectorXd u = q_cur.center();
  Eigen::VectorXd grad_history_sum = Eigen::VectorXd::Zero(q_cur.dim());
  double linearization_const = 0.0;  // sum_l (l+1)/2 (f_c(u^l) - <grad_l, u^l>)
  std::vector<Eigen::VectorXd> primal_sum(n_agents);
  for (int i = 0; i < n_agents; ++i) primal_sum[i] = Eigen::VectorXd::Zero(p.agent(i).dim());

  bool has_prev = false;
  Eigen::VectorXd lambda_prev;
  double fc_prev = -std::numeric_limits<double>::infinity();

  Eigen::VectorXd lambda_best = u;
  double best_fc = -std::numeric_limits<double>::infinity();

  std::vector<Eigen::VectorXd> x_hat(n_agents);
  Certificate cert;
  long k_local = 0;
  long k_global = 0;

  auto track_ineq_min = [&](const Eigen::VectorXd& lam) {
    if (q_cur.n_ineq() > 0) {
      run.min_ineq_multiplier =
          std::min(run.min_ineq_multiplier, lam.tail(q_cur.n_ineq()).minCoeff());
    }
  };

  while (k_global < max_passes) {
    const DualEvaluation ev_u = oracle.evaluate(u, sel.c);
    const double w = static_cast<double>(k_local + 1);
    for (int i = 0; i < n_agents; ++i) primal_sum[i].noalias() += w * ev_u.primal_points[i];
    grad_history_sum.noalias() += (w / 2.0) * ev_u.gradient;
    linearization_const += (w / 2.0) * (ev_u.value - ev_u.gradient.dot(u));

    const Eigen::VectorXd lambda_bar = gradient_step(u, ev_u.gradient, sel.lipschitz, q_cur);

    Eigen::VectorXd lambda;
    double fc_lambda;
    if (opt.variant == PcmOptions::Variant::kArgmax) {
      const DualEvaluation ev_bar = oracle.evaluate(lambda_bar, sel.c);
      lambda = lambda_bar;
      fc_lambda = ev_bar.value;  // ties prefer the step point
      if (has_prev && fc_prev > fc_lambda) {
        lambda = lambda_prev;
        fc_lambda = fc_prev;
      }
      if (ev_u.value > fc_lambda) {
        lambda = u;
        fc_lambda = ev_u.value;
      }
    } else {
      lambda = lambda_bar;
      fc_lambda = ev_u.value;  // value at the query point; the step point is not evaluated
    }

    const Eigen::VectorXd v = dual_averaging_step(grad_history_sum, sel.lipschitz, q_cur);

    if (opt.record_estimate_sequence && opt.variant == PcmOptions::Variant::kArgmax) {
      const double lhs = 0.25 * static_cast<double>((k_local + 1) * (k_local + 2)) * fc_lambda;
      const double rhs = -0.5 * sel.lipschitz * v.squaredNorm() + grad_history_sum.dot(v) +
                         linearization_const;
      run.estimate_sequence_slack.push_back(lhs - rhs);
    }

    track_ineq_min(u);
    track_ineq_min(lambda);
    track_ineq_min(v);

    if (fc_lambda > best_fc) {
      best_fc = fc_lambda;
      lambda_best = lambda;
    }

    // Primal average and the running gap surrogate.
    const double denom = static_cast<double>((k_local + 1) * (k_local + 2)) / 2.0;
    for (int i = 0; i < n_agents; ++i) x_hat[i] = primal_sum[i] / denom;
    const double phi = total_objective(p, x_hat);
    const CouplingResidual resid = coupling_residual(p, x_hat);
    const double eq_violation = resid.eq.size() > 0 ? resid.eq.norm() : 0.0;
    const double ineq_violation = detail::positive_part_norm(resid.ineq);
    const double gap_surrogate = phi - (fc_lambda - sel.c * pbs);

    run.trace.push_back(
        {k_global, fc_lambda, gap_surrogate, eq_violation, ineq_violation, elapsed()});

    const bool last_pass = k_global + 1 >= max_passes;
    const bool check_now = (k_local % opt.certificate_interval == 0) || last_pass;
    if (check_now) {
      double gap = gap_surrogate;
      if (opt.use_exact_f0) {
        const DualEvaluation ev0 = oracle.evaluate(lambda, 0.0);
        gap = phi - ev0.value;
      }
      cert.gap_surrogate = gap;
      cert.eq_violation = eq_violation;
      cert.ineq_violation = ineq_violation;
      cert.multiplier_norm = lambda.norm();
      cert.multiplier_norm_is_estimate = true;
      const double kk = static_cast<double>(k_local + 1);
      if (auto dq = q_cur.upper_bound()) {
        const double root = std::sqrt(*dq * pbs * op_norm_sq);
        cert.theorem_gap_bound = 4.0 * root / kk;
        const double slack_radius = q_cur.radius() - cert.multiplier_norm;
        cert.theorem_violation_bound = slack_radius > 0.0
                                           ? 4.0 * root / (slack_radius * kk)
                                           : std::numeric_limits<double>::infinity();
      } else {
        const double eps_gap = sel.c * pbs;
        cert.theorem_gap_bound = eps_gap;
        cert.theorem_violation_bound =
            eps_gap * (cert.multiplier_norm +
                       std::sqrt(cert.multiplier_norm * cert.multiplier_norm + 2.0));
      }

      if (opt.mode == PcmOptions::Mode::kCertifiedStop) {
        const double ln = cert.multiplier_norm;
        const double eps_c = eps * (ln + std::sqrt(ln * ln + 2.0));
        if (gap <= eps && eq_violation <= eps_c && ineq_violation <= eps_c) {
          run.certified = true;
          ++k_global;
          break;
        }
      }
    }

    // Adaptive radius: grow the ball when the multiplier crowds its boundary,
    // reselect parameters, and restart the estimate sequence from scratch with
    // the current multiplier carried as the incumbent.
    if (opt.adaptive_radius && q_cur.eq_geometry() == MultiplierSpace::EqGeometry::kBall &&
        q_cur.n_eq() > 0 && run.radius_restarts < opt.max_radius_restarts &&
        lambda.head(q_cur.n_eq()).norm() >= 0.9 * q_cur.radius()) {
      q_cur = q_cur.with_radius(opt.radius_growth * q_cur.radius());
      sel = detail::pcm_select(q_cur, eps, op_norm_sq, pbs);
      run.k_bound = std::max(run.k_bound, sel.k_bound);
      ++run.radius_restarts;

      const DualEvaluation ev_inc = oracle.evaluate(lambda, sel.c);
      lambda_prev = lambda;
      fc_prev = ev_inc.value;
      has_prev = true;
      best_fc = ev_inc.value;
      lambda_best = lambda;

      u = q_cur.center();
      grad_history_sum.setZero();
      linearization_const = 0.0;
      for (int i = 0; i < n_agents; ++i) primal_sum[i].setZero();
      k_local = 0;
      ++k_global;
      continue;
    }

    lambda_prev = lambda;
    fc_prev = fc_lambda;
    has_prev = true;

    u = (static_cast<double>(k_local + 1) * lambda + 2.0 * v) /
        static_cast<double>(k_local + 3);
    ++k_local;
    ++k_global;
  }

  run.primal_average = x_hat;
  run.primal_last = x_hat;
  run.multiplier = lambda_best;
  run.dual_value = best_fc;
  run.iterations = k_global;
  run.smoothing_c = sel.c;
  run.lipschitz = sel.lipschitz;
  return PcmResult{std::move(run), cert};
}

}  // namespace proxcenter
