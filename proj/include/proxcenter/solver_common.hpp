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
#include <limits>
#include <vector>

#include "proxcenter/problem.hpp"

namespace proxcenter {

/// One per-iteration trace record.
struct TraceRecord {
  long k = 0;
  double fc = 0.0;             ///< dual value at the current multiplier
  double gap_surrogate = 0.0;  ///< phi(x_hat) - (f_c(lambda) - c * prox_bound_sum)
  double eq_violation = 0.0;
  double ineq_violation = 0.0;
  double wall_time = 0.0;      ///< seconds since the run started
};

/// Certified accuracy of a primal-dual pair.
///
/// gap_surrogate upper-bounds the primal value minus the plain dual value;
/// the theorem bounds are the a-priori estimates at the iteration where the
/// certificate was formed. The violation bound needs ||lambda*||, which is
/// replaced by the norm of the best multiplier found when no optimal
/// multiplier is known (flagged by multiplier_norm_is_estimate).
struct Certificate {
  double gap_surrogate = std::numeric_limits<double>::quiet_NaN();
  double eq_violation = 0.0;
  double ineq_violation = 0.0;
  double theorem_gap_bound = std::numeric_limits<double>::quiet_NaN();
  double theorem_violation_bound = std::numeric_limits<double>::quiet_NaN();
  double multiplier_norm = 0.0;
  bool multiplier_norm_is_estimate = true;
};

/// Output of a solver run. The primal average is the weighted running
/// average the duality-gap bounds apply to; solvers that also track the last
/// iterate expose it in primal_last.
struct SolverRun {
  std::vector<Eigen::VectorXd> primal_average;
  std::vector<Eigen::VectorXd> primal_last;
  Eigen::VectorXd multiplier;          ///< best multiplier found
  double dual_value = 0.0;             ///< dual value at that multiplier
  long iterations = 0;                 ///< outer iterations performed
  bool certified = false;
  std::vector<TraceRecord> trace;

  // Smoothing data of the run (zero for the plain-dual baseline).
  double smoothing_c = 0.0;
  double lipschitz = 0.0;
  long k_bound = -1;

  /// Smallest inequality-multiplier component seen across all multiplier
  /// sequences of the run; >= 0 certifies sign feasibility throughout.
  double min_ineq_multiplier = std::numeric_limits<double>::infinity();

  /// Per-iteration estimate-sequence slack (filled on request).
  std::vector<double> estimate_sequence_slack;

  /// Number of multiplier-ball radius increases (compact geometries only).
  int radius_restarts = 0;
};

}  // namespace proxcenter
