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
#include <cstddef>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "proxcenter/errors.hpp"

namespace proxcenter {

/// Feasibility tolerances shared by the membership tests.
inline constexpr double kBallMembershipTol = 1e-9;
inline constexpr double kSimplexNonnegTol = 1e-12;
inline constexpr double kSimplexSumTol = 1e-9;

/// Euclidean ball { x : ||x - center||_2 <= radius }.
struct EuclideanBall {
  Eigen::VectorXd center;
  double radius = 0.0;
};

/// Standard simplex { x >= 0 : sum x = 1 } in the given dimension.
struct Simplex {
  int dimension = 0;
};

/// Compact convex feasible set of one agent: a Euclidean ball or a simplex.
class FeasibleSet {
 public:
  static FeasibleSet ball(Eigen::VectorXd center, double radius) {
    if (!(radius > 0.0)) {
      throw InvalidProblemError("ball radius must be positive");
    }
    return FeasibleSet(EuclideanBall{std::move(center), radius});
  }

  static FeasibleSet simplex(int dimension) {
    if (dimension < 1) {
      throw InvalidProblemError("simplex dimension must be >= 1");
    }
    return FeasibleSet(Simplex{dimension});
  }

  bool is_ball() const noexcept { return std::holds_alternative<EuclideanBall>(v_); }
  bool is_simplex() const noexcept { return !is_ball(); }

  const EuclideanBall& ball() const { return std::get<EuclideanBall>(v_); }
  const Simplex& simplex() const { return std::get<Simplex>(v_); }

  /// Ambient dimension of the set.
  int dimension() const {
    if (is_ball()) return static_cast<int>(ball().center.size());
    return simplex().dimension;
  }

  /// Membership test with the standard tolerances.
  bool contains(const Eigen::VectorXd& x) const {
    if (x.size() != dimension()) return false;
    if (is_ball()) {
      const auto& b = ball();
      return (x - b.center).norm() <= b.radius + kBallMembershipTol;
    }
    if (x.minCoeff() < -kSimplexNonnegTol) return false;
    return std::abs(x.sum() - 1.0) <= kSimplexSumTol;
  }

 private:
  explicit FeasibleSet(std::variant<EuclideanBall, Simplex> v) : v_(std::move(v)) {}
  std::variant<EuclideanBall, Simplex> v_;
};

/// One agent of a separable program: convex quadratic objective
/// 0.5 x' H x + g' x over a compact set, with linear coupling columns.
///
/// H must be symmetric positive semidefinite (strict convexity is not
/// required); the check runs once at construction.
class AgentBlock {
 public:
  AgentBlock(Eigen::MatrixXd objective_hessian, Eigen::VectorXd objective_linear,
             FeasibleSet feasible_set, Eigen::MatrixXd eq_coupling,
             Eigen::MatrixXd ineq_coupling)
      : hessian_(std::move(objective_hessian)),
        linear_(std::move(objective_linear)),
        set_(std::move(feasible_set)),
        eq_coupling_(std::move(eq_coupling)),
        ineq_coupling_(std::move(ineq_coupling)) {
    const int m = set_.dimension();
    if (hessian_.rows() != m || hessian_.cols() != m) {
      throw InvalidProblemError("objective_hessian must be m x m with m the set dimension");
    }
    if (linear_.size() != m) {
      throw InvalidProblemError("objective_linear must have the set dimension");
    }
    if (eq_coupling_.size() > 0 && eq_coupling_.cols() != m) {
      throw InvalidProblemError("eq_coupling column count must equal the set dimension");
    }
    if (ineq_coupling_.size() > 0 && ineq_coupling_.cols() != m) {
      throw InvalidProblemError("ineq_coupling column count must equal the set dimension");
    }
    if (eq_coupling_.size() == 0) eq_coupling_.resize(eq_coupling_.rows(), m);
    if (ineq_coupling_.size() == 0) ineq_coupling_.resize(ineq_coupling_.rows(), m);

    const double scale = std::max(1.0, hessian_.size() > 0 ? hessian_.cwiseAbs().maxCoeff() : 0.0);
    if (m > 0) {
      const double asym = (hessian_ - hessian_.transpose()).cwiseAbs().maxCoeff();
      if (asym > 1e-12 * scale) {
        throw InvalidProblemError("objective_hessian is not symmetric (max asymmetry " +
                                  std::to_string(asym) + ")");
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hessian_, Eigen::EigenvaluesOnly);
      min_eigenvalue_ = es.eigenvalues().minCoeff();
      if (min_eigenvalue_ < -1e-10 * scale) {
        throw InvalidProblemError("objective_hessian is not positive semidefinite (min eigenvalue " +
                                  std::to_string(min_eigenvalue_) + ")");
      }
    }
  }

  const Eigen::MatrixXd& hessian() const noexcept { return hessian_; }
  const Eigen::VectorXd& linear() const noexcept { return linear_; }
  const FeasibleSet& set() const noexcept { return set_; }
  const Eigen::MatrixXd& eq_coupling() const noexcept { return eq_coupling_; }
  const Eigen::MatrixXd& ineq_coupling() const noexcept { return ineq_coupling_; }

  int dim() const noexcept { return set_.dimension(); }
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

  /// 0.5 x' H x + g' x.
  double objective(const Eigen::VectorXd& x) const {
    return 0.5 * x.dot(hessian_ * x) + linear_.dot(x);
  }

 private:
  Eigen::MatrixXd hessian_;
  Eigen::VectorXd linear_;
  FeasibleSet set_;
  Eigen::MatrixXd eq_coupling_;
  Eigen::MatrixXd ineq_coupling_;
  double min_eigenvalue_ = 0.0;
};

/// Separable convex program over M agent blocks:
///
///   min  sum_i 0.5 x_i' H_i x_i + g_i' x_i
///   s.t. sum_i C_i x_i = gamma,   sum_i D_i x_i <= beta,   x_i in X_i.
///
/// Immutable after construction; safe to share across concurrent readers.
class SeparableProblem {
 public:
  SeparableProblem(std::vector<AgentBlock> agents, Eigen::VectorXd eq_rhs,
                   Eigen::VectorXd ineq_rhs)
      : agents_(std::move(agents)), eq_rhs_(std::move(eq_rhs)), ineq_rhs_(std::move(ineq_rhs)) {
    if (agents_.empty()) throw InvalidProblemError("problem needs at least one agent");
    const auto n1 = eq_rhs_.size();
    const auto n2 = ineq_rhs_.size();
    if (n1 + n2 < 1) throw InvalidProblemError("problem needs at least one coupling row");
    for (std::size_t i = 0; i < agents_.size(); ++i) {
      if (agents_[i].eq_coupling().rows() != n1) {
        throw InvalidProblemError("agent " + std::to_string(i) +
                                  ": eq_coupling row count does not match gamma");
      }
      if (agents_[i].ineq_coupling().rows() != n2) {
        throw InvalidProblemError("agent " + std::to_string(i) +
                                  ": ineq_coupling row count does not match beta");
      }
    }
  }

  const std::vector<AgentBlock>& agents() const noexcept { return agents_; }
  const AgentBlock& agent(std::size_t i) const { return agents_.at(i); }
  const Eigen::VectorXd& eq_rhs() const noexcept { return eq_rhs_; }
  const Eigen::VectorXd& ineq_rhs() const noexcept { return ineq_rhs_; }

  int num_agents() const noexcept { return static_cast<int>(agents_.size()); }
  int n_eq() const noexcept { return static_cast<int>(eq_rhs_.size()); }
  int n_ineq() const noexcept { return static_cast<int>(ineq_rhs_.size()); }

  int total_dim() const noexcept {
    int d = 0;
    for (const auto& a : agents_) d += a.dim();
    return d;
  }

 private:
  std::vector<AgentBlock> agents_;
  Eigen::VectorXd eq_rhs_;
  Eigen::VectorXd ineq_rhs_;
};

namespace detail {
inline void check_point_dims(const SeparableProblem& p,
                             const std::vector<Eigen::VectorXd>& x, const char* op) {
  if (static_cast<int>(x.size()) != p.num_agents()) {
    throw DimensionError(std::string(op) + ": expected " + std::to_string(p.num_agents()) +
                         " agent vectors, got " + std::to_string(x.size()));
  }
  for (int i = 0; i < p.num_agents(); ++i) {
    if (x[i].size() != p.agent(i).dim()) {
      throw DimensionError(std::string(op) + ": agent " + std::to_string(i) + " expects dimension " +
                               std::to_string(p.agent(i).dim()) + ", got " +
                               std::to_string(x[i].size()),
                           i);
    }
  }
}
}  // namespace detail

/// Total objective sum_i (0.5 x_i' H_i x_i + g_i' x_i).
inline double total_objective(const SeparableProblem& p, const std::vector<Eigen::VectorXd>& x) {
  detail::check_point_dims(p, x, "total_objective");
  double v = 0.0;
  for (int i = 0; i < p.num_agents(); ++i) v += p.agent(i).objective(x[i]);
  return v;
}

/// Raw (unprojected) coupling residuals.
struct CouplingResidual {
  Eigen::VectorXd eq;    ///< sum_i C_i x_i - gamma
  Eigen::VectorXd ineq;  ///< sum_i D_i x_i - beta
};

inline CouplingResidual coupling_residual(const SeparableProblem& p,
                                          const std::vector<Eigen::VectorXd>& x) {
  detail::check_point_dims(p, x, "coupling_residual");
  CouplingResidual r{Eigen::VectorXd::Zero(p.n_eq()), Eigen::VectorXd::Zero(p.n_ineq())};
  for (int i = 0; i < p.num_agents(); ++i) {
    if (p.n_eq() > 0) r.eq.noalias() += p.agent(i).eq_coupling() * x[i];
    if (p.n_ineq() > 0) r.ineq.noalias() += p.agent(i).ineq_coupling() * x[i];
  }
  r.eq -= p.eq_rhs();
  r.ineq -= p.ineq_rhs();
  return r;
}

/// Per-agent feasible-set membership.
inline std::vector<bool> membership(const SeparableProblem& p,
                                    const std::vector<Eigen::VectorXd>& x) {
  detail::check_point_dims(p, x, "membership");
  std::vector<bool> in(p.num_agents());
  for (int i = 0; i < p.num_agents(); ++i) in[i] = p.agent(i).set().contains(x[i]);
  return in;
}

}  // namespace proxcenter
