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
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "proxcenter/errors.hpp"
#include "proxcenter/problem.hpp"

namespace proxcenter {

/// Entropy terms treat components below this floor as exact zeros in values
/// (0 log 0 = 0) and clamp them before taking logarithms in gradients.
inline constexpr double kEntropyFloor = 1e-300;

/// Strongly convex distance generator over a compact set: nonnegative,
/// vanishing at the set's center, with convexity parameter sigma and a finite
/// upper bound D over the set.
///
/// Two instances are provided: squared Euclidean distance over a ball
/// (sigma = 1 w.r.t. the 2-norm, D = R^2/2) and the entropy distance over a
/// simplex (sigma = 1 w.r.t. the 1-norm, D = log m).
class ProxFunction {
 public:
  enum class Kind { kSquaredEuclidean, kEntropy };

  /// Canonical prox for a feasible set: squared Euclidean for balls,
  /// entropy for simplices.
  static ProxFunction for_set(const FeasibleSet& set) { return ProxFunction(set); }

  Kind kind() const noexcept { return kind_; }
  double convexity_parameter() const noexcept { return 1.0; }

  /// Finite bound D >= max over the set of the prox value.
  double upper_bound() const noexcept { return upper_bound_; }

  /// Center u0 with value(u0) = 0 (ball center, or the uniform point).
  const Eigen::VectorXd& center() const noexcept { return center_; }

  const FeasibleSet& set() const noexcept { return set_; }

  /// d(x). Requires x feasible within the membership tolerance.
  double value(const Eigen::VectorXd& x) const {
    if (!set_.contains(x)) {
      throw InfeasiblePointError("prox value requested at an infeasible point");
    }
    if (kind_ == Kind::kSquaredEuclidean) {
      return 0.5 * (x - center_).squaredNorm();
    }
    double s = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (x[i] > kEntropyFloor) s += x[i] * std::log(x[i]);
    }
    return std::log(static_cast<double>(x.size())) + s;
  }

  /// Gradient of d. Entropy components are floored before the logarithm.
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const {
    if (kind_ == Kind::kSquaredEuclidean) return x - center_;
    Eigen::VectorXd g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      g[i] = std::log(std::max(x[i], kEntropyFloor)) + 1.0;
    }
    return g;
  }

 private:
  explicit ProxFunction(const FeasibleSet& set) : set_(set) {
    if (set.is_ball()) {
      kind_ = Kind::kSquaredEuclidean;
      center_ = set.ball().center;
      upper_bound_ = 0.5 * set.ball().radius * set.ball().radius;
    } else {
      kind_ = Kind::kEntropy;
      const int m = set.simplex().dimension;
      center_ = Eigen::VectorXd::Constant(m, 1.0 / m);
      upper_bound_ = std::log(static_cast<double>(m));
    }
  }

  FeasibleSet set_;
  Kind kind_ = Kind::kSquaredEuclidean;
  Eigen::VectorXd center_;
  double upper_bound_ = 0.0;
};

/// Geometry of the multiplier set Q, a product of an equality part
/// (free space or a centered ball) and the nonnegative orthant for the
/// inequality part. The multiplier prox is fixed to 0.5 ||lambda||^2 at the
/// origin with sigma_Q = 1, which keeps the outer steps in closed form.
class MultiplierSpace {
 public:
  enum class EqGeometry { kFree, kBall };

  static MultiplierSpace free(int n_eq, int n_ineq) {
    return MultiplierSpace(n_eq, n_ineq, EqGeometry::kFree, 0.0);
  }

  static MultiplierSpace ball(int n_eq, double radius, int n_ineq) {
    if (!(radius > 0.0)) throw InvalidProblemError("multiplier ball radius must be positive");
    return MultiplierSpace(n_eq, n_ineq, EqGeometry::kBall, radius);
  }

  int n_eq() const noexcept { return n_eq_; }
  int n_ineq() const noexcept { return n_ineq_; }
  int dim() const noexcept { return n_eq_ + n_ineq_; }
  EqGeometry eq_geometry() const noexcept { return eq_geometry_; }
  double radius() const noexcept { return radius_; }

  double sigma() const noexcept { return 1.0; }

  /// D_Q, finite only for a ball equality part with no inequality rows.
  std::optional<double> upper_bound() const {
    if (eq_geometry_ == EqGeometry::kBall && n_ineq_ == 0) return 0.5 * radius_ * radius_;
    return std::nullopt;
  }

  Eigen::VectorXd center() const { return Eigen::VectorXd::Zero(dim()); }

  double prox_value(const Eigen::VectorXd& lambda) const { return 0.5 * lambda.squaredNorm(); }

  /// Euclidean projection onto Q: the equality part is radially clipped to
  /// the ball (unchanged when free), the inequality part is clamped at zero.
  Eigen::VectorXd project(const Eigen::VectorXd& lambda) const {
    if (lambda.size() != dim()) {
      throw DimensionError("project: multiplier has dimension " + std::to_string(lambda.size()) +
                           ", expected " + std::to_string(dim()));
    }
    Eigen::VectorXd out = lambda;
    if (eq_geometry_ == EqGeometry::kBall && n_eq_ > 0) {
      const double norm = out.head(n_eq_).norm();
      if (norm > radius_) out.head(n_eq_) *= radius_ / norm;
    }
    if (n_ineq_ > 0) out.tail(n_ineq_) = out.tail(n_ineq_).cwiseMax(0.0);
    return out;
  }

  bool contains(const Eigen::VectorXd& lambda, double tol = 1e-9) const {
    if (lambda.size() != dim()) return false;
    if (eq_geometry_ == EqGeometry::kBall && n_eq_ > 0 &&
        lambda.head(n_eq_).norm() > radius_ + tol) {
      return false;
    }
    return n_ineq_ == 0 || lambda.tail(n_ineq_).minCoeff() >= -tol;
  }

  /// Same geometry with the equality-ball radius rescaled.
  MultiplierSpace with_radius(double radius) const {
    return MultiplierSpace(n_eq_, n_ineq_, eq_geometry_, radius);
  }

 private:
  MultiplierSpace(int n_eq, int n_ineq, EqGeometry g, double radius)
      : n_eq_(n_eq), n_ineq_(n_ineq), eq_geometry_(g), radius_(radius) {
    if (n_eq < 0 || n_ineq < 0 || n_eq + n_ineq < 1) {
      throw InvalidProblemError("multiplier space needs at least one coordinate");
    }
  }

  int n_eq_;
  int n_ineq_;
  EqGeometry eq_geometry_;
  double radius_;
};

/// Multiplier space matching a problem's coupling rows with a free equality
/// part.
inline MultiplierSpace default_multiplier_space(const SeparableProblem& p) {
  return MultiplierSpace::free(p.n_eq(), p.n_ineq());
}

/// Euclidean projection onto the standard simplex (sort-and-threshold).
inline Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& y) {
  const Eigen::Index m = y.size();
  std::vector<double> u(y.data(), y.data() + m);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0;
  double tau = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    css += u[j];
    const double t = (css - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) tau = t;
  }
  return (y.array() - tau).cwiseMax(0.0).matrix();
}

}  // namespace proxcenter
