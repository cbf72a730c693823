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
#include <cstdint>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "proxcenter/dual_oracle.hpp"
#include "proxcenter/errors.hpp"
#include "proxcenter/problem.hpp"

namespace proxcenter {

/// Known optimal data of a constructed instance.
struct KnownOptimum {
  double f_star = 0.0;
  std::vector<Eigen::VectorXd> x_star;
  Eigen::VectorXd lambda_star;
};

/// A generated problem together with a strictly feasible interior point
/// (which witnesses that the optimal multiplier set is nonempty) and, for
/// constructed instances, the exact optimum.
struct GeneratedInstance {
  SeparableProblem problem;
  std::vector<Eigen::VectorXd> feasible_point;
  std::optional<KnownOptimum> optimum;
};

/// Random ball-constrained QP: rank-deficient PSD Hessians (rank ~ m/2, so
/// the objective is convex but not strictly), standard-normal coupling, and
/// the equality right-hand side placed at a strict interior point. Ball radii
/// default to sqrt(m).
struct RandomBallQpSpec {
  int m = 10;
  int agents = 2;
  int n_eq = 3;
  std::uint64_t seed = 1;
  double radius = 1.0;
};

/// Instance built backwards from a chosen primal-dual pair: x* strictly
/// interior to each ball (margin >= 0.1 R, so the ball multipliers vanish)
/// and g_i = -H_i x*_i - C_i' lambda*, which forces stationarity. The optimal
/// value phi(x*) is exact.
struct KktConstructedSpec {
  int m = 10;
  int agents = 2;
  int n_eq = 3;
  std::uint64_t seed = 1;
  double radius = 1.0;
};

/// Distributed control problem over ring-coupled linear subsystems recast as
/// a separable program: per-subsystem decision vectors stack the state
/// trajectory and input sequence, and the dynamics plus initial conditions
/// become equality coupling rows. Box state/input sets are relaxed to
/// enclosing balls.
struct MpcRecastSpec {
  int subsystems = 3;
  int horizon = 5;
  std::uint64_t seed = 1;
};

/// Ball QP with added inequality coupling, slack-feasible at the interior
/// point.
struct NetworkAllocSpec {
  int m = 10;
  int agents = 2;
  int n_eq = 2;
  int n_ineq = 2;
  std::uint64_t seed = 1;
  double radius = 1.0;
};

using InstanceSpec =
    std::variant<RandomBallQpSpec, KktConstructedSpec, MpcRecastSpec, NetworkAllocSpec>;

namespace detail {

/// Point uniform-in-radius inside the ball of the given radius around zero.
inline Eigen::VectorXd interior_point(Rng& rng, int m, double radius) {
  Eigen::VectorXd y = rng.normal_vector(m);
  const double n = y.norm();
  if (n == 0.0) return Eigen::VectorXd::Zero(m);
  const double r = radius * std::pow(rng.uniform01(), 1.0 / static_cast<double>(m));
  return (r / n) * y;
}

/// PSD Hessian of rank ceil(m/2): H = G'G with G standard normal.
inline Eigen::MatrixXd half_rank_hessian(Rng& rng, int m) {
  const int rank = (m + 1) / 2;
  const Eigen::MatrixXd G = rng.normal_matrix(rank, m);
  Eigen::MatrixXd H = G.transpose() * G;
  H = 0.5 * (H + H.transpose());  // exact symmetry
  return H;
}

}  // namespace detail

inline GeneratedInstance generate(const RandomBallQpSpec& spec) {
  if (spec.m < 1 || spec.agents < 1 || spec.n_eq < 1) {
    throw InvalidProblemError("random ball QP: dimensions must be positive");
  }
  detail::Rng rng(spec.seed);
  const double radius = spec.radius;

  std::vector<AgentBlock> agents;
  std::vector<Eigen::VectorXd> feasible;
  Eigen::VectorXd gamma = Eigen::VectorXd::Zero(spec.n_eq);
  for (int i = 0; i < spec.agents; ++i) {
    Eigen::MatrixXd H = detail::half_rank_hessian(rng, spec.m);
    Eigen::VectorXd g = rng.normal_vector(spec.m);
    Eigen::MatrixXd C = rng.normal_matrix(spec.n_eq, spec.m);
    Eigen::VectorXd x_tilde = detail::interior_point(rng, spec.m, 0.5 * radius);
    gamma.noalias() += C * x_tilde;
    feasible.push_back(std::move(x_tilde));
    agents.emplace_back(std::move(H), std::move(g),
                        FeasibleSet::ball(Eigen::VectorXd::Zero(spec.m), radius), std::move(C),
                        Eigen::MatrixXd(0, spec.m));
  }
  return GeneratedInstance{
      SeparableProblem(std::move(agents), std::move(gamma), Eigen::VectorXd(0)),
      std::move(feasible), std::nullopt};
}

inline GeneratedInstance generate(const KktConstructedSpec& spec) {
  if (spec.m < 1 || spec.agents < 1 || spec.n_eq < 1) {
    throw InvalidProblemError("KKT-constructed instance: dimensions must be positive");
  }
  detail::Rng rng(spec.seed);
  const double radius = spec.radius;

  // Multiplier norm kept at or below one so that the accuracy bounds stated
  // in terms of ||lambda*|| stay small.
  Eigen::VectorXd lambda_star = rng.normal_vector(spec.n_eq);
  const double ln = lambda_star.norm();
  if (ln > 0.0) lambda_star *= (0.3 + 0.7 * rng.uniform01()) / ln;

  std::vector<AgentBlock> agents;
  std::vector<Eigen::VectorXd> x_star;
  Eigen::VectorXd gamma = Eigen::VectorXd::Zero(spec.n_eq);
  double f_star = 0.0;
  for (int i = 0; i < spec.agents; ++i) {
    Eigen::MatrixXd H = detail::half_rank_hessian(rng, spec.m);
    Eigen::MatrixXd C = rng.normal_matrix(spec.n_eq, spec.m);
    Eigen::VectorXd xs = detail::interior_point(rng, spec.m, 0.6 * radius);
    Eigen::VectorXd g = -(H * xs) - C.transpose() * lambda_star;
    gamma.noalias() += C * xs;
    f_star += 0.5 * xs.dot(H * xs) + g.dot(xs);
    x_star.push_back(xs);
    agents.emplace_back(std::move(H), std::move(g),
                        FeasibleSet::ball(Eigen::VectorXd::Zero(spec.m), radius), std::move(C),
                        Eigen::MatrixXd(0, spec.m));
  }
  KnownOptimum opt{f_star, x_star, std::move(lambda_star)};
  return GeneratedInstance{
      SeparableProblem(std::move(agents), std::move(gamma), Eigen::VectorXd(0)),
      std::move(x_star), std::move(opt)};
}

inline GeneratedInstance generate(const NetworkAllocSpec& spec) {
  if (spec.m < 1 || spec.agents < 1 || spec.n_eq < 0 || spec.n_ineq < 1 ||
      spec.n_eq + spec.n_ineq < 1) {
    throw InvalidProblemError("network allocation instance: dimensions must be positive");
  }
  detail::Rng rng(spec.seed);
  const double radius = spec.radius;

  std::vector<AgentBlock> agents;
  std::vector<Eigen::VectorXd> feasible;
  Eigen::VectorXd gamma = Eigen::VectorXd::Zero(spec.n_eq);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(spec.n_ineq);
  for (int i = 0; i < spec.agents; ++i) {
    Eigen::MatrixXd H = detail::half_rank_hessian(rng, spec.m);
    Eigen::VectorXd g = rng.normal_vector(spec.m);
    Eigen::MatrixXd C = rng.normal_matrix(spec.n_eq, spec.m);
    Eigen::MatrixXd D = rng.normal_matrix(spec.n_ineq, spec.m);
    Eigen::VectorXd x_tilde = detail::interior_point(rng, spec.m, 0.5 * radius);
    if (spec.n_eq > 0) gamma.noalias() += C * x_tilde;
    beta.noalias() += D * x_tilde;
    feasible.push_back(std::move(x_tilde));
    agents.emplace_back(std::move(H), std::move(g),
                        FeasibleSet::ball(Eigen::VectorXd::Zero(spec.m), radius), std::move(C),
                        std::move(D));
  }
  // Strictly slack-feasible interior point: beta exceeds sum D_i x~_i.
  for (int j = 0; j < spec.n_ineq; ++j) beta[j] += 0.5 + std::abs(rng.normal());
  return GeneratedInstance{
      SeparableProblem(std::move(agents), std::move(gamma), std::move(beta)),
      std::move(feasible), std::nullopt};
}

/// Dynamics data of a recast control instance, for forward simulation.
struct MpcRecastData {
  int subsystems = 0;
  int horizon = 0;
  int state_dim = 0;
  int input_dim = 0;
  /// neighbors[i]: sorted unique interaction set of subsystem i (contains i).
  std::vector<std::vector<int>> neighbors;
  /// blocks aligned with neighbors[i]: state and input maps of x^i_{l+1}.
  std::vector<std::vector<Eigen::MatrixXd>> state_maps;
  std::vector<std::vector<Eigen::MatrixXd>> input_maps;
  std::vector<Eigen::VectorXd> x_init;

  /// Offset of state block l in an agent's stacked decision vector.
  int state_offset(int l) const { return l * state_dim; }
  /// Offset of input block l in an agent's stacked decision vector.
  int input_offset(int l) const { return (horizon + 1) * state_dim + l * input_dim; }
  int agent_dim() const { return (horizon + 1) * state_dim + horizon * input_dim; }
};

/// Builds the recast control instance and returns the raw dynamics alongside.
inline std::pair<GeneratedInstance, MpcRecastData> build_mpc_recast(const MpcRecastSpec& spec) {
  if (spec.subsystems < 1 || spec.horizon < 1) {
    throw InvalidProblemError("control recast: subsystems and horizon must be positive");
  }
  detail::Rng rng(spec.seed);
  const int M = spec.subsystems;
  const int N = spec.horizon;
  const int nx = 2;
  const int nu = 1;

  MpcRecastData data;
  data.subsystems = M;
  data.horizon = N;
  data.state_dim = nx;
  data.input_dim = nu;
  data.neighbors.resize(M);
  data.state_maps.resize(M);
  data.input_maps.resize(M);
  data.x_init.resize(M);

  for (int i = 0; i < M; ++i) {
    std::vector<int> nb{(i + M - 1) % M, i, (i + 1) % M};
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    data.neighbors[i] = nb;
    for (int j : nb) {
      const double scale = (j == i ? 0.4 : 0.1) / std::sqrt(static_cast<double>(nx));
      data.state_maps[i].push_back(scale * rng.normal_matrix(nx, nx));
      data.input_maps[i].push_back(0.3 * rng.normal_matrix(nx, nu));
    }
    data.x_init[i] = 0.5 * rng.normal_vector(nx);
  }

  // Zero-input forward simulation gives a coupling-feasible trajectory.
  std::vector<std::vector<Eigen::VectorXd>> traj(M);
  for (int i = 0; i < M; ++i) {
    traj[i].resize(N + 1);
    traj[i][0] = data.x_init[i];
  }
  for (int l = 0; l < N; ++l) {
    for (int i = 0; i < M; ++i) {
      Eigen::VectorXd next = Eigen::VectorXd::Zero(nx);
      for (std::size_t t = 0; t < data.neighbors[i].size(); ++t) {
        next.noalias() += data.state_maps[i][t] * traj[data.neighbors[i][t]][l];
      }
      traj[i][l + 1] = next;
    }
  }

  const int dim = data.agent_dim();
  const int n1 = M * N * nx + M * nx;
  std::vector<Eigen::MatrixXd> coupling(M, Eigen::MatrixXd::Zero(n1, dim));
  Eigen::VectorXd gamma = Eigen::VectorXd::Zero(n1);

  for (int i = 0; i < M; ++i) {
    for (int l = 0; l < N; ++l) {
      const int row = (i * N + l) * nx;
      coupling[i].block(row, data.state_offset(l + 1), nx, nx) =
          Eigen::MatrixXd::Identity(nx, nx);
      for (std::size_t t = 0; t < data.neighbors[i].size(); ++t) {
        const int j = data.neighbors[i][t];
        coupling[j].block(row, data.state_offset(l), nx, nx) -= data.state_maps[i][t];
        coupling[j].block(row, data.input_offset(l), nx, nu) -= data.input_maps[i][t];
      }
    }
    const int row0 = M * N * nx + i * nx;
    coupling[i].block(row0, data.state_offset(0), nx, nx) = Eigen::MatrixXd::Identity(nx, nx);
    gamma.segment(row0, nx) = data.x_init[i];
  }

  std::vector<AgentBlock> agents;
  std::vector<Eigen::VectorXd> feasible;
  for (int i = 0; i < M; ++i) {
    // Stage cost: rank-one state weight over l = 0..N-1 (terminal state
    // uncosted) plus a small input weight; convex but not strictly.
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);
    const Eigen::VectorXd qdir = rng.normal_vector(nx);
    const Eigen::MatrixXd Q = qdir * qdir.transpose();
    for (int l = 0; l < N; ++l) {
      H.block(data.state_offset(l), data.state_offset(l), nx, nx) = Q;
      H.block(data.input_offset(l), data.input_offset(l), nu, nu) =
          0.1 * Eigen::MatrixXd::Identity(nu, nu);
    }
    H = 0.5 * (H + H.transpose());

    Eigen::VectorXd x_tilde = Eigen::VectorXd::Zero(dim);
    for (int l = 0; l <= N; ++l) x_tilde.segment(data.state_offset(l), nx) = traj[i][l];
    const double radius = 2.0 * std::max(1.0, x_tilde.norm());

    agents.emplace_back(std::move(H), Eigen::VectorXd::Zero(dim),
                        FeasibleSet::ball(Eigen::VectorXd::Zero(dim), radius),
                        std::move(coupling[i]), Eigen::MatrixXd(0, dim));
    feasible.push_back(std::move(x_tilde));
  }

  GeneratedInstance inst{
      SeparableProblem(std::move(agents), std::move(gamma), Eigen::VectorXd(0)),
      std::move(feasible), std::nullopt};
  return {std::move(inst), std::move(data)};
}

inline GeneratedInstance generate(const MpcRecastSpec& spec) {
  return build_mpc_recast(spec).first;
}

inline GeneratedInstance generate(const InstanceSpec& spec) {
  return std::visit([](const auto& s) { return generate(s); }, spec);
}

}  // namespace proxcenter
