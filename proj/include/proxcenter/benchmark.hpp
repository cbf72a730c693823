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

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "proxcenter/dual_oracle.hpp"
#include "proxcenter/instances.hpp"
#include "proxcenter/solver_dsm.hpp"
#include "proxcenter/solver_pcm.hpp"

namespace proxcenter {

struct BenchmarkCell {
  int m = 50;
  int agents = 2;
  double eps = 1e-2;
};

struct BenchmarkRow {
  int m = 0;
  int agents = 0;
  double eps = 0.0;
  long pcm_iterations = 0;
  /// Certified accuracy max(gap surrogate, eq + ineq violation): the primal
  /// average can slightly undershoot the primal optimum while it is still
  /// coupling-infeasible, which would make the raw surrogate negative, so the
  /// violation is folded in to keep the reported accuracy a nonnegative
  /// solution-quality bound.
  double pcm_accuracy = 0.0;
  bool pcm_certified = false;
  long dsm_iterations = 0;
  double dsm_accuracy_at_cap = 0.0;  ///< same semantics, on the ergodic average
  double pcm_wall_time = 0.0;        ///< seconds; kept out of the table output
  double dsm_wall_time = 0.0;
  std::string status = "ok";  ///< "ok" or "error: ..."
};

struct BenchmarkOptions {
  std::uint64_t seed = 1;
  int n_eq = 5;          ///< coupling rows of the generated cells
  long pcm_cap = 20000;  ///< hard iteration cap on top of the a-priori bound
  long dsm_cap_small = 5000;   ///< m <= 200
  long dsm_cap_large = 10000;  ///< larger m
};

namespace detail {
inline std::uint64_t cell_seed(std::uint64_t seed, const BenchmarkCell& cell) {
  Rng mixer(seed ^ (0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(cell.m)) ^
            (0xC2B2AE3D27D4EB4Full * static_cast<std::uint64_t>(cell.agents)) ^
            static_cast<std::uint64_t>(cell.eps * 1e12));
  return mixer.next();
}

inline double certified_accuracy(const Certificate& cert) {
  return std::max(cert.gap_surrogate, cert.eq_violation + cert.ineq_violation);
}
}  // namespace detail

/// Runs one benchmark cell: PCM in certified-stop mode against DSM run to its
/// iteration cap, on the same seeded random ball QP.
struct BenchmarkCellResult {
  BenchmarkRow row;
  SolverRun pcm_run;
  SolverRun dsm_run;
};

inline BenchmarkCellResult run_benchmark_cell(const BenchmarkCell& cell,
                                              const BenchmarkOptions& opt) {
  BenchmarkCellResult out;
  out.row.m = cell.m;
  out.row.agents = cell.agents;
  out.row.eps = cell.eps;

  const RandomBallQpSpec spec{cell.m, cell.agents, opt.n_eq, detail::cell_seed(opt.seed, cell)};
  const GeneratedInstance inst = generate(spec);
  const MultiplierSpace q = default_multiplier_space(inst.problem);

  {
    const DualOracle oracle(inst.problem);
    const EuclideanSelection sel =
        select_c_euclidean(cell.eps, oracle.op_norm_sq_over_sigma(), oracle.prox_bound_sum());
    PcmOptions popt;
    popt.epsilon = cell.eps;
    popt.mode = PcmOptions::Mode::kCertifiedStop;
    popt.max_iter = std::min(sel.k_bound + 1, opt.pcm_cap);
    PcmResult pcm = run_pcm(inst.problem, q, popt);
    out.row.pcm_iterations = pcm.run.iterations;
    out.row.pcm_accuracy = detail::certified_accuracy(pcm.certificate);
    out.row.pcm_certified = pcm.run.certified;
    out.row.pcm_wall_time = pcm.run.trace.empty() ? 0.0 : pcm.run.trace.back().wall_time;
    out.pcm_run = std::move(pcm.run);
  }
  {
    // The baseline runs the classical diminishing schedule (the regime with
    // an O(1/eps^2) guarantee on nonsmooth duals); the constant rule is
    // available through DsmOptions for head-to-head experiments.
    DsmOptions dopt;
    const double full_norm = operator_norm(stacked_coupling_matrix(inst.problem));
    dopt.rule =
        StepRule::diminishing(full_norm > 0.0 ? 1.0 / (full_norm * full_norm) : 1.0);
    dopt.max_iter = cell.m <= 200 ? opt.dsm_cap_small : opt.dsm_cap_large;
    DsmResult dsm = run_dsm(inst.problem, q, dopt);
    out.row.dsm_iterations = dsm.run.iterations;
    out.row.dsm_accuracy_at_cap = detail::certified_accuracy(dsm.certificate);
    out.row.dsm_wall_time = dsm.run.trace.empty() ? 0.0 : dsm.run.trace.back().wall_time;
    out.dsm_run = std::move(dsm.run);
  }
  return out;
}

/// Runs every cell of the grid; per-cell failures are recorded in the row
/// status and the benchmark continues. Rows come back sorted by (m, M, eps).
inline std::vector<BenchmarkRow> run_benchmark(const std::vector<BenchmarkCell>& grid,
                                               const BenchmarkOptions& opt) {
  std::vector<BenchmarkRow> rows;
  rows.reserve(grid.size());
  for (const BenchmarkCell& cell : grid) {
    try {
      rows.push_back(run_benchmark_cell(cell, opt).row);
    } catch (const std::exception& e) {
      BenchmarkRow row;
      row.m = cell.m;
      row.agents = cell.agents;
      row.eps = cell.eps;
      row.status = std::string("error: ") + e.what();
      rows.push_back(std::move(row));
    }
  }
  std::sort(rows.begin(), rows.end(), [](const BenchmarkRow& a, const BenchmarkRow& b) {
    return std::tie(a.m, a.agents, a.eps) < std::tie(b.m, b.agents, b.eps);
  });
  return rows;
}

namespace detail {
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}
}  // namespace detail

/// Comma-separated table with a header row. Wall times are deliberately
/// excluded so tables from identically seeded runs are byte-identical; they
/// live in the run traces instead.
inline std::string benchmark_csv(const std::vector<BenchmarkRow>& rows) {
  std::string out =
      "m,M,eps,pcm_iterations,pcm_accuracy,pcm_certified,dsm_iterations,dsm_accuracy_at_cap,"
      "status\n";
  for (const BenchmarkRow& r : rows) {
    out += std::to_string(r.m) + ',' + std::to_string(r.agents) + ',' +
           detail::format_double(r.eps) + ',' + std::to_string(r.pcm_iterations) + ',' +
           detail::format_double(r.pcm_accuracy) + ',' + (r.pcm_certified ? "1" : "0") + ',' +
           std::to_string(r.dsm_iterations) + ',' + detail::format_double(r.dsm_accuracy_at_cap) +
           ',' + r.status + '\n';
  }
  return out;
}

}  // namespace proxcenter
