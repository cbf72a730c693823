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

#include "proxcenter/dual_oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "proxcenter/instances.hpp"
#include "oracles.hpp"

namespace proxcenter {
namespace {

TEST(OperatorNorm, IdentityIsOne) {
  EXPECT_NEAR(operator_norm(Eigen::MatrixXd::Identity(2, 2)), 1.0, 1e-9);
}

TEST(OperatorNorm, DiagonalSingularValues) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2, 2);
  M(0, 0) = 3.0;
  M(1, 1) = 1.0;
  EXPECT_NEAR(operator_norm(M), 3.0, 1e-9);
}

TEST(OperatorNorm, MatchesJacobiSvdOracle) {
  oracles::TestRng rng(61);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd M = rng.normal_matrix(5, 7);
    const double expected = oracles::jacobi_svd_norm(M);
    EXPECT_NEAR(operator_norm(M), expected, 1e-8 * expected);
  }
}

TEST(OperatorNorm, ZeroMatrixIsZero) {
  EXPECT_DOUBLE_EQ(operator_norm(Eigen::MatrixXd::Zero(3, 4)), 0.0);
}

TEST(OperatorNorm, MaxColumnNormForSimplexDomains) {
  Eigen::MatrixXd M(2, 3);
  M << 1.0, 0.0, 3.0, 0.0, 2.0, 4.0;
  EXPECT_DOUBLE_EQ(max_column_norm(M), 5.0);
}

TEST(SelectC, EuclideanFormula) {
  const auto sel = select_c_euclidean(0.01, 4.0, 2.0);
  EXPECT_DOUBLE_EQ(sel.c, 0.005);
  const auto sel2 = select_c_euclidean(0.1, 4.0, 1.0);
  EXPECT_EQ(sel2.k_bound, 39);  // ceil(2 * 2 / 0.1) - 1
}

TEST(SelectC, DoublingEpsHalvesIterationBound) {
  const auto a = select_c_euclidean(0.01, 9.0, 2.0);
  const auto b = select_c_euclidean(0.02, 9.0, 2.0);
  EXPECT_NEAR(static_cast<double>(a.k_bound + 1) / static_cast<double>(b.k_bound + 1), 2.0,
              0.01);
}

TEST(SelectC, RejectsDegenerateProxBound) {
  EXPECT_THROW(select_c_euclidean(0.1, 1.0, 0.0), InvalidProblemError);
}

TEST(SelectC, BallFormula) {
  const auto sel = select_c_ball(3, 0.5, 1.0, 0.5);
  EXPECT_DOUBLE_EQ(sel.c, 0.5);  // (2/4) sqrt((1/2)/(1/2) * 1)
}

TEST(SelectC, BallGapBoundScalesInverseK) {
  const auto a = select_c_ball(3, 0.5, 2.0, 1.5);
  const auto b = select_c_ball(7, 0.5, 2.0, 1.5);
  EXPECT_NEAR(b.gap_bound, 0.5 * a.gap_bound, 1e-12);
  // c * (k+1) is constant across k
  EXPECT_NEAR(4.0 * a.c, 8.0 * b.c, 1e-12);
}

TEST(SmoothingConfig, LipschitzByConstruction) {
  const auto inst = generate(RandomBallQpSpec{6, 2, 2, 3});
  const DualOracle oracle(inst.problem);
  const SmoothingConfig cfg = oracle.config(0.25);
  EXPECT_DOUBLE_EQ(cfg.lipschitz, cfg.op_norm_sq_over_sigma / cfg.c);
  EXPECT_GT(cfg.prox_bound_sum, 0.0);
}

TEST(DualOracle, ValueAtZeroMultiplier) {
  const auto inst = generate(RandomBallQpSpec{5, 2, 2, 11});
  const DualOracle oracle(inst.problem);
  const double c = 0.2;
  const auto ev = oracle.evaluate(Eigen::VectorXd::Zero(2), c);

  // At lambda = 0 the value is the sum of the regularized per-agent minima
  // and the gradient is the raw coupling residual of the minimizers.
  double expected = 0.0;
  for (int i = 0; i < inst.problem.num_agents(); ++i) {
    const auto& a = inst.problem.agent(i);
    expected += solve_ball_quadratic(a.hessian(), a.linear(), a.set().ball().center,
                                     a.set().ball().radius, c)
                    .objective_value;
  }
  EXPECT_NEAR(ev.value, expected, 1e-9 * (1.0 + std::abs(expected)));
  const CouplingResidual r = coupling_residual(inst.problem, ev.primal_points);
  EXPECT_LT((ev.gradient.head(2) - r.eq).norm(), 1e-12);
}

TEST(DualOracle, GradientMatchesCentralDifferences) {
  const auto inst = generate(RandomBallQpSpec{5, 2, 3, 19});
  const DualOracle oracle(inst.problem);
  const double c = 0.3;
  oracles::TestRng rng(5);
  auto fc = [&](const Eigen::VectorXd& lam) { return oracle.evaluate(lam, c).value; };
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::VectorXd lambda = rng.normal_vector(3);
    const Eigen::VectorXd grad = oracle.evaluate(lambda, c).gradient;
    const Eigen::VectorXd fd = oracles::central_difference(fc, lambda);
    EXPECT_LT((grad - fd).cwiseAbs().maxCoeff(), 1e-4) << "trial " << trial;
  }
}

TEST(DualOracle, ConcaveAlongSampledSegments) {
  const auto inst = generate(RandomBallQpSpec{4, 2, 2, 23});
  const DualOracle oracle(inst.problem);
  oracles::TestRng rng(9);
  const double c = 0.5;
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd a = rng.normal_vector(2);
    const Eigen::VectorXd b = rng.normal_vector(2);
    const double t = rng.uniform();
    const double lhs = oracle.evaluate(t * a + (1.0 - t) * b, c).value;
    const double rhs =
        t * oracle.evaluate(a, c).value + (1.0 - t) * oracle.evaluate(b, c).value;
    EXPECT_GE(lhs, rhs - 1e-9);
  }
}

TEST(DualOracle, GradientLipschitzBound) {
  const auto inst = generate(RandomBallQpSpec{6, 2, 3, 29});
  const DualOracle oracle(inst.problem);
  const double c = 0.2;
  const double L = oracle.config(c).lipschitz;
  oracles::TestRng rng(71);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::VectorXd a = rng.normal_vector(3);
    const Eigen::VectorXd b = rng.normal_vector(3);
    const double lhs =
        (oracle.evaluate(a, c).gradient - oracle.evaluate(b, c).gradient).norm();
    EXPECT_LE(lhs, L * (a - b).norm() + 1e-7);
  }
}

TEST(DualOracle, SandwichAgainstExactPlainDual) {
  const auto inst = generate(RandomBallQpSpec{5, 3, 2, 31});
  const DualOracle oracle(inst.problem);
  const double c = 0.15;
  oracles::TestRng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::VectorXd lambda = rng.normal_vector(2);
    const auto smoothed = oracle.evaluate(lambda, c);
    const auto plain = oracle.evaluate(lambda, 0.0);
    EXPECT_GE(smoothed.value, plain.value - 1e-8);
    EXPECT_GE(plain.value, smoothed.value - c * oracle.prox_bound_sum() - 1e-8);
    EXPECT_NEAR(smoothed.plain_dual_lower, smoothed.value - c * oracle.prox_bound_sum(),
                1e-12);
  }
}

TEST(DualOracle, SeparabilityAcrossAgents) {
  // f_c of the full problem equals the sum of single-agent duals with zeroed
  // right-hand sides, minus <lambda, rhs>.
  const auto inst = generate(RandomBallQpSpec{4, 3, 2, 37});
  const DualOracle oracle(inst.problem);
  const double c = 0.4;
  oracles::TestRng rng(8);
  const Eigen::VectorXd lambda = rng.normal_vector(2);

  double sum = 0.0;
  for (int i = 0; i < inst.problem.num_agents(); ++i) {
    std::vector<AgentBlock> single{inst.problem.agent(i)};
    const SeparableProblem sub(std::move(single), Eigen::VectorXd::Zero(2),
                               Eigen::VectorXd(0));
    sum += DualOracle(sub).evaluate(lambda, c).value;
  }
  sum -= lambda.dot(inst.problem.eq_rhs());
  EXPECT_NEAR(oracle.evaluate(lambda, c).value, sum, 1e-10 * (1.0 + std::abs(sum)));
}

TEST(DualOracle, RejectsQuadraticSimplexAtCZero) {
  std::vector<AgentBlock> blocks;
  blocks.emplace_back(Eigen::MatrixXd::Identity(3, 3), Eigen::VectorXd::Zero(3),
                      FeasibleSet::simplex(3), Eigen::MatrixXd::Identity(1, 3),
                      Eigen::MatrixXd(0, 3));
  const SeparableProblem p(std::move(blocks), Eigen::VectorXd::Zero(1), Eigen::VectorXd(0));
  const DualOracle oracle(p);
  EXPECT_THROW(oracle.evaluate(Eigen::VectorXd::Zero(1), 0.0), InvalidProblemError);
}

TEST(DualOracle, SimplexAgentsUseColumnNorm) {
  Eigen::MatrixXd C(2, 3);
  C << 1.0, 0.0, 3.0, 0.0, 2.0, 4.0;
  std::vector<AgentBlock> blocks;
  blocks.emplace_back(Eigen::MatrixXd::Zero(3, 3), Eigen::VectorXd::Zero(3),
                      FeasibleSet::simplex(3), C, Eigen::MatrixXd(0, 3));
  const SeparableProblem p(std::move(blocks), Eigen::VectorXd::Zero(2), Eigen::VectorXd(0));
  const DualOracle oracle(p);
  EXPECT_DOUBLE_EQ(oracle.op_norm_sq_over_sigma(), 25.0);
  EXPECT_DOUBLE_EQ(oracle.prox_bound_sum(), std::log(3.0));
}

}  // namespace
}  // namespace proxcenter
