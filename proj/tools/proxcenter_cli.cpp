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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "proxcenter/benchmark.hpp"
#include "proxcenter/dual_oracle.hpp"
#include "proxcenter/instances.hpp"
#include "proxcenter/io.hpp"
#include "proxcenter/prox.hpp"
#include "proxcenter/reference.hpp"
#include "proxcenter/solver_dsm.hpp"
#include "proxcenter/solver_pcm.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitCapBound = 2;

proxcenter::MultiplierSpace parse_multiplier_space(const std::string& q_spec, int n_eq,
                                                   int n_ineq) {
  using proxcenter::MultiplierSpace;
  if (q_spec == "free") return MultiplierSpace::free(n_eq, n_ineq);
  if (q_spec == "orthant") {
    if (n_eq != 0) {
      throw proxcenter::InvalidProblemError(
          "--q orthant needs a problem without equality rows; use free or ball:R");
    }
    return MultiplierSpace::free(0, n_ineq);
  }
  if (q_spec.rfind("ball:", 0) == 0) {
    const double radius = std::stod(q_spec.substr(5));
    return MultiplierSpace::ball(n_eq, radius, n_ineq);
  }
  throw proxcenter::InvalidProblemError("unknown multiplier geometry '" + q_spec +
                                        "' (expected free, ball:R, or orthant)");
}

std::optional<proxcenter::StepRule> parse_step_rule(const std::string& s) {
  if (s.empty()) return std::nullopt;
  auto parse_value = [](const std::string& spec, const char* prefix) -> double {
    const std::string rest = spec.substr(std::string(prefix).size());
    return rest.empty() ? -1.0 : std::stod(rest.substr(1));
  };
  if (s.rfind("constant", 0) == 0) {
    const double v = parse_value(s, "constant");
    return v > 0 ? proxcenter::StepRule::constant(v) : std::optional<proxcenter::StepRule>();
  }
  if (s.rfind("diminishing", 0) == 0) {
    const double v = parse_value(s, "diminishing");
    if (v > 0) return proxcenter::StepRule::diminishing(v);
    throw proxcenter::InvalidProblemError("diminishing rule needs a scale: diminishing:S");
  }
  throw proxcenter::InvalidProblemError("unknown step rule '" + s + "'");
}

std::vector<proxcenter::BenchmarkCell> parse_grid(const std::string& grid) {
  std::vector<proxcenter::BenchmarkCell> cells;
  std::size_t start = 0;
  while (start < grid.size()) {
    std::size_t end = grid.find(';', start);
    if (end == std::string::npos) end = grid.size();
    const std::string cell = grid.substr(start, end - start);
    if (!cell.empty()) {
      int m = 0;
      int agents = 0;
      double eps = 0.0;
      if (std::sscanf(cell.c_str(), "%d,%d,%lf", &m, &agents, &eps) != 3) {
        throw proxcenter::InvalidProblemError("bad grid cell '" + cell +
                                              "' (expected m,M,eps)");
      }
      cells.push_back({m, agents, eps});
    }
    start = end + 1;
  }
  return cells;
}

int cmd_generate(const std::string& family, int m, int agents, int n_eq, int n_ineq,
                 int subsystems, int horizon, std::uint64_t seed, double radius,
                 const std::string& out, const std::string& optimum_out) {
  using namespace proxcenter;
  GeneratedInstance inst = [&]() -> GeneratedInstance {
    if (family == "randomballqp") return generate(RandomBallQpSpec{m, agents, n_eq, seed, radius});
    if (family == "kkt") return generate(KktConstructedSpec{m, agents, n_eq, seed, radius});
    if (family == "mpc") return generate(MpcRecastSpec{subsystems, horizon, seed});
    if (family == "netalloc") {
      return generate(NetworkAllocSpec{m, agents, n_eq, n_ineq, seed, radius});
    }
    throw InvalidProblemError("unknown family '" + family +
                              "' (expected randomballqp, kkt, mpc, or netalloc)");
  }();
  save_instance(out, inst.problem);
  std::cout << "wrote " << out << " (" << inst.problem.num_agents() << " agents, "
            << inst.problem.n_eq() << " eq rows, " << inst.problem.n_ineq() << " ineq rows)\n";
  if (inst.optimum) {
    const std::string opt_path = optimum_out.empty() ? out + ".optimum.json" : optimum_out;
    std::ofstream f(opt_path);
    f << optimum_to_json(*inst.optimum).dump(2) << '\n';
    std::cout << "wrote " << opt_path << " (f* = " << inst.optimum->f_star << ")\n";
  }
  return kExitOk;
}

int cmd_solve(const std::string& in, const std::string& method, double eps, long max_iter,
              const std::string& q_spec, const std::string& variant, bool fixed_k,
              bool exact_f0, const std::string& step_rule, const std::string& trace_path) {
  using namespace proxcenter;
  const SeparableProblem problem = load_instance(in);
  const MultiplierSpace q = parse_multiplier_space(q_spec, problem.n_eq(), problem.n_ineq());

  if (method == "pcm") {
    PcmOptions opt;
    opt.epsilon = eps;
    opt.max_iter = max_iter;
    opt.mode = fixed_k ? PcmOptions::Mode::kFixedK : PcmOptions::Mode::kCertifiedStop;
    opt.variant =
        variant == "xbar" ? PcmOptions::Variant::kXbar : PcmOptions::Variant::kArgmax;
    opt.use_exact_f0 = exact_f0;
    const PcmResult res = run_pcm(problem, q, opt);
    if (!trace_path.empty()) write_trace(trace_path, res.run.trace);
    std::cout << "pcm: iterations=" << res.run.iterations << " (bound " << res.run.k_bound
              << "), c=" << res.run.smoothing_c << ", L_c=" << res.run.lipschitz << "\n"
              << "     gap_surrogate=" << res.certificate.gap_surrogate
              << " eq_violation=" << res.certificate.eq_violation
              << " ineq_violation=" << res.certificate.ineq_violation << "\n"
              << "     theorem_gap_bound=" << res.certificate.theorem_gap_bound
              << " theorem_violation_bound=" << res.certificate.theorem_violation_bound
              << (res.certificate.multiplier_norm_is_estimate ? " (||lambda*|| estimated)" : "")
              << "\n"
              << "     certified=" << (res.run.certified ? "yes" : "no") << "\n";
    return res.run.certified ? kExitOk : kExitCapBound;
  }
  if (method == "dsm") {
    DsmOptions opt;
    opt.max_iter = max_iter > 0 ? max_iter : 5000;
    opt.target_eps = eps;
    opt.rule = parse_step_rule(step_rule);
    const DsmResult res = run_dsm(problem, q, opt);
    if (!trace_path.empty()) write_trace(trace_path, res.run.trace);
    std::cout << "dsm: iterations=" << res.run.iterations << ", best f_0=" << res.run.dual_value
              << "\n"
              << "     ergodic gap_surrogate=" << res.certificate.gap_surrogate
              << " eq_violation=" << res.certificate.eq_violation
              << " ineq_violation=" << res.certificate.ineq_violation << "\n"
              << "     certified=" << (res.run.certified ? "yes" : "no") << "\n";
    return res.run.certified ? kExitOk : kExitCapBound;
  }
  throw InvalidProblemError("unknown method '" + method + "' (expected pcm or dsm)");
}

int cmd_bench(const std::string& grid_spec, std::uint64_t seed, const std::string& out,
              int n_eq, long pcm_cap, const std::string& trace_dir) {
  using namespace proxcenter;
  BenchmarkOptions opt;
  opt.seed = seed;
  opt.n_eq = n_eq;
  opt.pcm_cap = pcm_cap;
  const std::vector<BenchmarkCell> grid = parse_grid(grid_spec);

  std::vector<BenchmarkRow> rows;
  for (const BenchmarkCell& cell : grid) {
    try {
      BenchmarkCellResult res = run_benchmark_cell(cell, opt);
      if (!trace_dir.empty()) {
        const std::string tag = std::to_string(cell.m) + "_" + std::to_string(cell.agents) +
                                "_" + detail::format_double(cell.eps);
        write_trace(trace_dir + "/pcm_" + tag + ".jsonl", res.pcm_run.trace);
        write_trace(trace_dir + "/dsm_" + tag + ".jsonl", res.dsm_run.trace);
      }
      rows.push_back(std::move(res.row));
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

  const std::string csv = benchmark_csv(rows);
  if (out.empty()) {
    std::cout << csv;
  } else {
    std::ofstream f(out);
    f << csv;
    std::cout << "wrote " << out << "\n";
  }
  for (const BenchmarkRow& r : rows) {
    if (r.status != "ok") return kExitError;
    if (!r.pcm_certified) return kExitCapBound;
  }
  return kExitOk;
}

int cmd_verify(const std::string& in) {
  using namespace proxcenter;
  int failures = 0;
  auto report = [&](const char* name, bool ok) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << "\n";
    if (!ok) ++failures;
  };

  const SeparableProblem p = load_instance(in);  // constructor checks run here
  report("load: dimensions, symmetry, PSD, coupling rows", true);

  detail::Rng rng(20260809);
  auto sample_point = [&](const FeasibleSet& set) -> Eigen::VectorXd {
    if (set.is_ball()) {
      Eigen::VectorXd y = rng.normal_vector(set.dimension());
      const double n = y.norm();
      if (n == 0.0) return set.ball().center;
      const double r = set.ball().radius *
                       std::pow(rng.uniform01(), 1.0 / static_cast<double>(set.dimension()));
      return set.ball().center + (r / n) * y;
    }
    Eigen::VectorXd w(set.dimension());
    for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = -std::log(1.0 - rng.uniform01());
    return w / w.sum();
  };
  auto sample_full = [&]() {
    std::vector<Eigen::VectorXd> x;
    x.reserve(p.num_agents());
    for (const auto& a : p.agents()) x.push_back(sample_point(a.set()));
    return x;
  };

  bool convex_ok = true;
  bool affine_ok = true;
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = sample_full();
    const auto y = sample_full();
    const double t = rng.uniform01();
    std::vector<Eigen::VectorXd> z(p.num_agents());
    for (int i = 0; i < p.num_agents(); ++i) z[i] = t * x[i] + (1.0 - t) * y[i];
    const double lhs = total_objective(p, z);
    const double rhs = t * total_objective(p, x) + (1.0 - t) * total_objective(p, y);
    if (lhs > rhs + 1e-9 * (1.0 + std::abs(rhs))) convex_ok = false;
    const CouplingResidual rz = coupling_residual(p, z);
    const CouplingResidual rx = coupling_residual(p, x);
    const CouplingResidual ry = coupling_residual(p, y);
    const double scale = 1.0 + rx.eq.norm() + ry.eq.norm() + rx.ineq.norm() + ry.ineq.norm();
    if ((rz.eq - t * rx.eq - (1.0 - t) * ry.eq).norm() > 1e-10 * scale) affine_ok = false;
    if ((rz.ineq - t * rx.ineq - (1.0 - t) * ry.ineq).norm() > 1e-10 * scale) affine_ok = false;
  }
  report("objective convex along sampled segments", convex_ok);
  report("coupling residual affine on sampled points", affine_ok);

  bool prox_ok = true;
  for (const auto& a : p.agents()) {
    const ProxFunction d = ProxFunction::for_set(a.set());
    if (std::abs(d.value(d.center())) > 1e-12) prox_ok = false;
    for (int trial = 0; trial < 10; ++trial) {
      const Eigen::VectorXd x = sample_point(a.set());
      if (d.value(x) < -1e-12 || d.value(x) > d.upper_bound() + 1e-9) prox_ok = false;
    }
  }
  report("prox functions vanish at centers and respect upper bounds", prox_ok);

  const MultiplierSpace q = default_multiplier_space(p);
  bool proj_ok = true;
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd a = rng.normal_vector(q.dim());
    const Eigen::VectorXd b = rng.normal_vector(q.dim());
    const Eigen::VectorXd pa = q.project(a);
    if ((q.project(pa) - pa).norm() > 1e-12) proj_ok = false;
    if ((pa - q.project(b)).norm() > (a - b).norm() + 1e-12) proj_ok = false;
  }
  report("multiplier projection idempotent and nonexpansive", proj_ok);

  bool ball_only = true;
  for (const auto& a : p.agents()) ball_only = ball_only && a.set().is_ball();
  if (ball_only) {
    const DualOracle oracle(p);
    bool sandwich_ok = true;
    const double c = 0.1;
    for (int trial = 0; trial < 3; ++trial) {
      const Eigen::VectorXd lambda = q.project(rng.normal_vector(q.dim()));
      const DualEvaluation fc = oracle.evaluate(lambda, c);
      const DualEvaluation f0 = oracle.evaluate(lambda, 0.0);
      if (fc.value < f0.value - 1e-8) sandwich_ok = false;
      if (f0.value < fc.value - c * oracle.prox_bound_sum() - 1e-8) sandwich_ok = false;
    }
    report("smoothed dual sandwiches the plain dual at sampled multipliers", sandwich_ok);
  }

  std::cout << (failures == 0 ? "verify: all checks passed\n"
                              : "verify: " + std::to_string(failures) + " check(s) failed\n");
  return failures == 0 ? kExitOk : kExitError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Solver and benchmark tool for separable convex programs with linear coupling"};
  app.require_subcommand(1);

  // generate
  std::string family = "randomballqp";
  int m = 10;
  int agents = 2;
  int n_eq = 3;
  int n_ineq = 2;
  int subsystems = 3;
  int horizon = 5;
  std::uint64_t seed = 1;
  double radius = 1.0;
  std::string out_path;
  std::string optimum_out;
  auto* gen = app.add_subcommand("generate", "Generate a problem instance file");
  gen->add_option("--family", family, "randomballqp | kkt | mpc | netalloc");
  gen->add_option("--m", m, "per-agent dimension");
  gen->add_option("--agents,--M", agents, "number of agents");
  gen->add_option("--n-eq", n_eq, "equality coupling rows");
  gen->add_option("--n-ineq", n_ineq, "inequality coupling rows (netalloc)");
  gen->add_option("--subsystems", subsystems, "subsystems (mpc)");
  gen->add_option("--horizon", horizon, "prediction horizon (mpc)");
  gen->add_option("--seed", seed, "random seed");
  gen->add_option("--radius", radius, "ball radius");
  gen->add_option("--out", out_path, "output instance file")->required();
  gen->add_option("--optimum-out", optimum_out, "optimum sidecar path (kkt)");

  // solve
  std::string in_path;
  std::string method = "pcm";
  double eps = 1e-2;
  long max_iter = -1;
  std::string q_spec = "free";
  std::string variant = "argmax";
  bool fixed_k = false;
  bool exact_f0 = false;
  std::string step_rule;
  std::string trace_path;
  auto* solve = app.add_subcommand("solve", "Solve an instance file");
  solve->add_option("--in", in_path, "instance file")->required();
  solve->add_option("--method", method, "pcm | dsm");
  solve->add_option("--eps", eps, "target accuracy");
  solve->add_option("--max-iter", max_iter, "iteration cap (-1: a-priori bound)");
  solve->add_option("--q", q_spec, "multiplier geometry: free | ball:R | orthant");
  solve->add_option("--variant", variant, "pcm multiplier choice: argmax | xbar");
  solve->add_flag("--fixed-k", fixed_k, "run the full budget without early stopping");
  solve->add_flag("--exact-f0", exact_f0, "certify with exact plain-dual solves");
  solve->add_option("--step-rule", step_rule, "dsm step rule: constant[:S] | diminishing:S");
  solve->add_option("--trace", trace_path, "write per-iteration trace (jsonl)");

  // bench
  std::string grid_spec = "50,2,0.01";
  std::string bench_out;
  std::string trace_dir;
  long pcm_cap = 20000;
  int bench_n_eq = 5;
  std::uint64_t bench_seed = 1;
  auto* bench = app.add_subcommand("bench", "Run the PCM/DSM benchmark grid");
  bench->add_option("--grid", grid_spec, "cells m,M,eps separated by ';'");
  bench->add_option("--seed", bench_seed, "base seed");
  bench->add_option("--out", bench_out, "output CSV path (default: stdout)");
  bench->add_option("--n-eq", bench_n_eq, "equality rows per generated cell");
  bench->add_option("--pcm-cap", pcm_cap, "hard PCM iteration cap");
  bench->add_option("--trace-dir", trace_dir, "directory for per-cell traces");

  // verify
  std::string verify_in;
  auto* verify = app.add_subcommand("verify", "Run the invariant suite on an instance file");
  verify->add_option("--in", verify_in, "instance file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      return cmd_generate(family, m, agents, n_eq, n_ineq, subsystems, horizon, seed, radius,
                          out_path, optimum_out);
    }
    if (solve->parsed()) {
      return cmd_solve(in_path, method, eps, max_iter, q_spec, variant, fixed_k, exact_f0,
                       step_rule, trace_path);
    }
    if (bench->parsed()) {
      return cmd_bench(grid_spec, bench_seed, bench_out, bench_n_eq, pcm_cap, trace_dir);
    }
    if (verify->parsed()) return cmd_verify(verify_in);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
