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

#include "proxcenter/subsolver.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"

namespace proxcenter {
namespace {

TEST(BallQuadratic, UnconstrainedSolutionOnBoundary) {
  // H = 0, g = (1, 0), c = 1: the unregularized gradient x + g vanishes at
  // x = (-1, 0), exactly on the boundary; mu stays 0.
  Eigen::VectorXd g(2);
  g << 1.0, 0.0;
  const auto sol = solve_ball_quadratic(Eigen::MatrixXd::Zero(2, 2), g,
                                        Eigen::VectorXd::Zero(2), 1.0, 1.0);
  EXPECT_NEAR(sol.minimizer[0], -1.0, 1e-12);
  EXPECT_NEAR(sol.minimizer[1], 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(sol.kkt_multiplier, 0.0);
}

TEST(BallQuadratic, BoundaryKktMultiplier) {
  // H = 0, g = (2, 0), c = 1: KKT gives g + (c + mu) x = 0 with ||x|| = 1,
  // so x = (-1, 0) and mu = 1.
  Eigen::VectorXd g(2);
  g << 2.0, 0.0;
  const auto sol = solve_ball_quadratic(Eigen::MatrixXd::Zero(2, 2), g,
                                        Eigen::VectorXd::Zero(2), 1.0, 1.0);
  EXPECT_NEAR(sol.minimizer[0], -1.0, 1e-9);
  EXPECT_NEAR(sol.minimizer[1], 0.0, 1e-9);
  EXPECT_NEAR(sol.kkt_multiplier, 1.0, 1e-8);
}

TEST(BallQuadratic, MatchesDiskGridSearch) {
  // Half the draws have small linear terms (interior minimizers, where the
  // grid argmin is position-identifiable); the rest land on the boundary,
  // where grid positions wander tangentially and only objectives compare.
  oracles::TestRng rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const bool interior_draw = trial % 2 == 0;
    const Eigen::Matrix2d H =
        rng.psd_matrix(2, 2) + 0.5 * Eigen::Matrix2d::Identity();
    const Eigen::Vector2d g =
        (interior_draw ? 0.25 : 2.0) * Eigen::Vector2d(rng.normal_vector(2));
    const double c = 0.1;
    const auto sol = solve_ball_quadratic(H, g, Eigen::VectorXd::Zero(2), 1.0, c);
    const auto grid = oracles::disk_grid_search(H, g, Eigen::Vector2d::Zero(), 1.0, c);
    if (sol.kkt_multiplier == 0.0 && sol.minimizer.norm() < 0.9) {
      EXPECT_LE((sol.minimizer - grid.minimizer).cwiseAbs().maxCoeff(), 2.0 * grid.cell)
          << "trial " << trial;
    }
    EXPECT_LE(sol.objective_value, grid.objective + 1e-6) << "trial " << trial;
    EXPECT_GE(sol.objective_value, grid.objective - 1.0) << "sanity";
  }
}

TEST(BallQuadratic, OffCenterBallAgainstGrid) {
  oracles::TestRng rng(77);
  Eigen::Vector2d x0;
  x0 << 0.5, -1.0;
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::Matrix2d H = rng.psd_matrix(2, 1);  // rank deficient on purpose
    const Eigen::Vector2d g = rng.normal_vector(2);
    const double c = 0.3;
    const auto sol = solve_ball_quadratic(H, g, x0, 2.0, c);
    const auto grid = oracles::disk_grid_search(H, g, x0, 2.0, c);
    EXPECT_LE(sol.objective_value, grid.objective + 1e-6);
  }
}

TEST(BallQuadratic, KktCertificateOnRandomInstances) {
  oracles::TestRng rng(4242);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 6;
    const Eigen::MatrixXd H = rng.psd_matrix(m, 3);
    const Eigen::VectorXd g = 3.0 * rng.normal_vector(m);
    const Eigen::VectorXd x0 = rng.normal_vector(m);
    const double R = 1.5;
    const double c = trial % 2 == 0 ? 0.0 : 0.25;
    const auto sol = solve_ball_quadratic(H, g, x0, R, c);

    const Eigen::VectorXd y = sol.minimizer - x0;
    EXPECT_LE(y.norm(), R + 1e-9);
    EXPECT_GE(sol.kkt_multiplier, -1e-12);
    // stationarity: grad(psi + c d) + mu (x - x0) = 0
    const Eigen::VectorXd grad =
        H * sol.minimizer + g + c * y + sol.kkt_multiplier * y;
    EXPECT_LT(grad.norm(), 1e-7 * (1.0 + g.norm()));
    // complementary slackness
    EXPECT_LE(std::abs(sol.kkt_multiplier * (y.norm() - R)), 1e-8);
  }
}

TEST(BallQuadratic, HardCaseReturnsMinimumNormMinimizer) {
  // H singular, c = 0, g orthogonal to the null space: flat directions exist
  // and the reduced minimum-norm solution is interior.
  Eigen::MatrixXd H(2, 2);
  H << 1.0, 0.0, 0.0, 0.0;
  Eigen::VectorXd g(2);
  g << 0.5, 0.0;  // no component along the null direction e2
  const auto sol = solve_ball_quadratic(H, g, Eigen::VectorXd::Zero(2), 1.0, 0.0);
  EXPECT_TRUE(sol.hard_case);
  EXPECT_NEAR(sol.minimizer[0], -0.5, 1e-10);
  EXPECT_NEAR(sol.minimizer[1], 0.0, 1e-10);
  EXPECT_DOUBLE_EQ(sol.kkt_multiplier, 0.0);
  // any feasible point with the same first coordinate has equal objective
  Eigen::VectorXd alt(2);
  alt << -0.5, 0.5;
  EXPECT_NEAR(0.5 * alt.dot(H * alt) + g.dot(alt), sol.objective_value, 1e-12);
}

TEST(BallQuadratic, SingularLeavingBallGoesToBoundary) {
  // Null-space component in g: the c = 0 system is inconsistent, a positive
  // boundary multiplier must be found.
  Eigen::MatrixXd H(2, 2);
  H << 1.0, 0.0, 0.0, 0.0;
  Eigen::VectorXd g(2);
  g << 0.1, 1.0;
  const auto sol = solve_ball_quadratic(H, g, Eigen::VectorXd::Zero(2), 1.0, 0.0);
  EXPECT_FALSE(sol.hard_case);
  EXPECT_NEAR(sol.minimizer.norm(), 1.0, 1e-9);
  EXPECT_GT(sol.kkt_multiplier, 0.0);
  const auto grid = oracles::disk_grid_search(H, g, Eigen::Vector2d::Zero(), 1.0, 0.0);
  EXPECT_LE(sol.objective_value, grid.objective + 1e-6);
}

TEST(BallQuadratic, WarmStartedMultiplierAgreesCold) {
  oracles::TestRng rng(88);
  const int m = 5;
  const Eigen::MatrixXd H = rng.psd_matrix(m, 2);
  const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd g = 4.0 * rng.normal_vector(m);
  double warm = -1.0;
  const auto cold = solve_ball_quadratic(H, g, x0, 1.0, 0.5);
  auto first = solve_ball_quadratic(H, g, x0, 1.0, 0.5, &warm);
  EXPECT_LT((first.minimizer - cold.minimizer).norm(), 1e-9);
  g *= 1.02;  // nearby problem: warm start should not change the answer
  const auto cold2 = solve_ball_quadratic(H, g, x0, 1.0, 0.5);
  const auto warm2 = solve_ball_quadratic(H, g, x0, 1.0, 0.5, &warm);
  EXPECT_LT((warm2.minimizer - cold2.minimizer).norm(), 1e-8);
}

TEST(BallQuadratic, RejectsNonPsd) {
  Eigen::MatrixXd H(2, 2);
  H << 1.0, 0.0, 0.0, -1.0;
  EXPECT_THROW(
      solve_ball_quadratic(H, Eigen::VectorXd::Ones(2), Eigen::VectorXd::Zero(2), 1.0, 0.0),
      InvalidProblemError);
}

TEST(SimplexLinear, UniformAtZeroObjective) {
  const auto sol = solve_simplex_linear(Eigen::VectorXd::Zero(3), 0.7);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(sol.minimizer[i], 1.0 / 3.0, 1e-15);
}

TEST(SimplexLinear, MassConcentratesOnCheapComponent) {
  const double c = 0.5;
  Eigen::VectorXd g = Eigen::VectorXd::Constant(4, 100.0 * c);
  g[0] = 0.0;
  const auto sol = solve_simplex_linear(g, c);
  EXPECT_GT(sol.minimizer[0], 0.999);
}

TEST(SimplexLinear, MatchesProjectedGradientOracle) {
  Eigen::VectorXd g(3);
  g << 1.0, 2.0, 3.0;
  const auto sol = solve_simplex_linear(g, 1.0);
  const Eigen::VectorXd x_pg =
      oracles::simplex_projected_gradient(Eigen::MatrixXd::Zero(3, 3), g, 1.0);
  EXPECT_LT((sol.minimizer - x_pg).norm(), 1e-8);
}

TEST(SimplexLinear, OverflowSafeForLargeRatios) {
  Eigen::VectorXd g(3);
  g << -2000.0, 0.0, 2000.0;
  const auto sol = solve_simplex_linear(g, 1.0);
  EXPECT_TRUE(sol.minimizer.allFinite());
  EXPECT_NEAR(sol.minimizer[0], 1.0, 1e-12);
  EXPECT_NEAR(sol.objective_value, -2000.0 + std::log(3.0), 1e-9);
}

TEST(SimplexLinear, RejectsNonpositiveSmoothing) {
  EXPECT_THROW(solve_simplex_linear(Eigen::VectorXd::Zero(3), 0.0), InvalidProblemError);
}

TEST(SimplexVertex, PicksLowestIndexOnTies) {
  Eigen::VectorXd g(4);
  g << 2.0, 1.0, 1.0, 3.0;
  const auto sol = solve_simplex_vertex(g);
  EXPECT_DOUBLE_EQ(sol.minimizer[1], 1.0);
  EXPECT_TRUE(sol.hard_case);  // tie flags non-uniqueness
}

TEST(Generic, AgreesWithClosedFormBallSolver) {
  oracles::TestRng rng(909);
  for (int trial = 0; trial < 10; ++trial) {
    const int m = 4;
    const Eigen::MatrixXd H = rng.psd_matrix(m, 3);
    const Eigen::VectorXd g = 2.0 * rng.normal_vector(m);
    const auto set = FeasibleSet::ball(Eigen::VectorXd::Zero(m), 1.0);
    const ProxFunction prox = ProxFunction::for_set(set);
    const double c = 1.0;
    const auto closed = solve_ball_quadratic(H, g, Eigen::VectorXd::Zero(m), 1.0, c);
    const auto iterative = solve_generic(H, g, set, prox, c, 1e-10);
    EXPECT_LT((closed.minimizer - iterative.minimizer).norm(), 1e-6);
    EXPECT_NEAR(closed.objective_value, iterative.objective_value, 1e-8);
  }
}

TEST(Generic, CenterIsFixedPoint) {
  const auto set = FeasibleSet::ball(Eigen::VectorXd::Zero(3), 1.0);
  const auto sol = solve_generic(Eigen::MatrixXd::Identity(3, 3), Eigen::VectorXd::Zero(3),
                                 set, ProxFunction::for_set(set), 1.0);
  EXPECT_LT(sol.minimizer.norm(), 1e-9);
}

TEST(Generic, QuadraticOverSimplexMatchesGrid) {
  // dim 2: parametrize x = (t, 1 - t) and scan t with a fine grid.
  Eigen::MatrixXd H(2, 2);
  H << 2.0, 0.0, 0.0, 1.0;
  Eigen::VectorXd g(2);
  g << -0.3, 0.4;
  const double c = 0.25;
  const auto set = FeasibleSet::simplex(2);
  const auto sol = solve_generic(H, g, set, ProxFunction::for_set(set), c, 1e-11);

  double best_val = std::numeric_limits<double>::infinity();
  double best_t = 0.0;
  const int n = 1000000;
  for (int i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    Eigen::Vector2d x(t, 1.0 - t);
    double v = 0.5 * x.dot(H * x) + g.dot(x) + c * std::log(2.0);
    for (int j = 0; j < 2; ++j) {
      if (x[j] > 0.0) v += c * x[j] * std::log(x[j]);
    }
    if (v < best_val) {
      best_val = v;
      best_t = t;
    }
  }
  EXPECT_NEAR(sol.minimizer[0], best_t, 1e-5);
  EXPECT_NEAR(sol.objective_value, best_val, 1e-5);
}

TEST(Generic, UniqueUnderStrongConvexityFromDifferentWarmStarts) {
  oracles::TestRng rng(13);
  const int m = 4;
  const Eigen::MatrixXd H = rng.psd_matrix(m, 2);
  const Eigen::VectorXd g = rng.normal_vector(m);
  const auto set = FeasibleSet::ball(Eigen::VectorXd::Zero(m), 1.0);
  const ProxFunction prox = ProxFunction::for_set(set);
  const Eigen::VectorXd w1 = rng.ball_point(Eigen::VectorXd::Zero(m), 1.0);
  const Eigen::VectorXd w2 = rng.ball_point(Eigen::VectorXd::Zero(m), 1.0);
  const auto a = solve_generic(H, g, set, prox, 0.8, 1e-11, 100000, &w1);
  const auto b = solve_generic(H, g, set, prox, 0.8, 1e-11, 100000, &w2);
  EXPECT_LT((a.minimizer - b.minimizer).norm(), 1e-8);
}

TEST(Subsolver, LipschitzSolutionMapProperty) {
  // || C x(lambda) - C x(eta) || <= (||C||^2 / (c sigma)) || lambda - eta ||
  oracles::TestRng rng(31);
  const int m = 5;
  const int n = 3;
  const Eigen::MatrixXd H = rng.psd_matrix(m, 2);
  const Eigen::VectorXd g = rng.normal_vector(m);
  const Eigen::MatrixXd C = rng.normal_matrix(n, m);
  const double c = 0.5;
  const double c_norm = oracles::jacobi_svd_norm(C);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::VectorXd lambda = rng.normal_vector(n);
    const Eigen::VectorXd eta = rng.normal_vector(n);
    const auto xl = solve_ball_quadratic(H, g + C.transpose() * lambda,
                                         Eigen::VectorXd::Zero(m), 1.0, c);
    const auto xe =
        solve_ball_quadratic(H, g + C.transpose() * eta, Eigen::VectorXd::Zero(m), 1.0, c);
    EXPECT_LE((C * (xl.minimizer - xe.minimizer)).norm(),
              c_norm * c_norm / c * (lambda - eta).norm() + 1e-8);
  }
}

}  // namespace
}  // namespace proxcenter
