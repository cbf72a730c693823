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

#include <stdexcept>
#include <string>

namespace proxcenter {

/// Thrown when a vector or matrix does not conform to the problem dimensions.
/// Carries the offending agent index when the mismatch is agent-specific.
class DimensionError : public std::invalid_argument {
 public:
  explicit DimensionError(const std::string& what, int agent_index = -1)
      : std::invalid_argument(what), agent_index_(agent_index) {}

  /// Index of the offending agent, or -1 when not tied to an agent.
  int agent_index() const noexcept { return agent_index_; }

 private:
  int agent_index_;
};

/// Thrown when problem data violates a structural requirement
/// (non-PSD Hessian, nonpositive radius, inconsistent coupling rows, ...).
class InvalidProblemError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a point lies outside its feasible set beyond tolerance.
class InfeasiblePointError : public std::domain_error {
  using std::domain_error::domain_error;
};

/// Thrown when an iterative kernel fails to reach its tolerance within the
/// iteration cap. Carries the last residual for diagnostics.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace proxcenter
