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
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "proxcenter/errors.hpp"
#include "proxcenter/instances.hpp"
#include "proxcenter/problem.hpp"
#include "proxcenter/solver_common.hpp"

namespace proxcenter {

namespace detail {

inline nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

inline Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

inline Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, Eigen::Index expected_cols) {
  if (j.empty()) return Eigen::MatrixXd(0, expected_cols);
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(j[i].size()) != cols) {
      throw InvalidProblemError("instance file: ragged matrix rows");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
  }
  return m;
}

}  // namespace detail

inline nlohmann::json instance_to_json(const SeparableProblem& p) {
  nlohmann::json j;
  j["agents"] = nlohmann::json::array();
  for (const AgentBlock& a : p.agents()) {
    nlohmann::json ja;
    ja["H"] = detail::matrix_to_json(a.hessian());
    ja["g"] = detail::vector_to_json(a.linear());
    if (a.set().is_ball()) {
      ja["set"] = {{"ball",
                    {{"center", detail::vector_to_json(a.set().ball().center)},
                     {"radius", a.set().ball().radius}}}};
    } else {
      ja["set"] = {{"simplex", {{"dim", a.set().simplex().dimension}}}};
    }
    ja["C"] = detail::matrix_to_json(a.eq_coupling());
    ja["D"] = detail::matrix_to_json(a.ineq_coupling());
    j["agents"].push_back(std::move(ja));
  }
  j["gamma"] = detail::vector_to_json(p.eq_rhs());
  j["beta"] = detail::vector_to_json(p.ineq_rhs());
  return j;
}

inline SeparableProblem instance_from_json(const nlohmann::json& j) {
  const Eigen::VectorXd gamma = detail::vector_from_json(j.at("gamma"));
  const Eigen::VectorXd beta = detail::vector_from_json(j.at("beta"));
  std::vector<AgentBlock> agents;
  for (const auto& ja : j.at("agents")) {
    const auto& jset = ja.at("set");
    FeasibleSet set = [&]() -> FeasibleSet {
      if (jset.contains("ball")) {
        return FeasibleSet::ball(detail::vector_from_json(jset["ball"].at("center")),
                                 jset["ball"].at("radius").get<double>());
      }
      if (jset.contains("simplex")) {
        return FeasibleSet::simplex(jset["simplex"].at("dim").get<int>());
      }
      throw InvalidProblemError("instance file: set must be a ball or a simplex");
    }();
    const int m = set.dimension();
    Eigen::MatrixXd H = detail::matrix_from_json(ja.at("H"), m);
    Eigen::VectorXd g = detail::vector_from_json(ja.at("g"));
    Eigen::MatrixXd C = detail::matrix_from_json(ja.at("C"), m);
    Eigen::MatrixXd D = detail::matrix_from_json(ja.at("D"), m);
    if (C.rows() != gamma.size()) {
      throw InvalidProblemError("instance file: C row count does not match gamma");
    }
    if (D.rows() != beta.size()) {
      throw InvalidProblemError("instance file: D row count does not match beta");
    }
    agents.emplace_back(std::move(H), std::move(g), std::move(set), std::move(C), std::move(D));
  }
  return SeparableProblem(std::move(agents), gamma, beta);
}

inline void save_instance(const std::string& path, const SeparableProblem& p) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << instance_to_json(p).dump(2) << '\n';
}

inline SeparableProblem load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::json j;
  in >> j;
  return instance_from_json(j);
}

inline nlohmann::json optimum_to_json(const KnownOptimum& opt) {
  nlohmann::json j;
  j["f_star"] = opt.f_star;
  j["x_star"] = nlohmann::json::array();
  for (const auto& x : opt.x_star) j["x_star"].push_back(detail::vector_to_json(x));
  j["lambda_star"] = detail::vector_to_json(opt.lambda_star);
  return j;
}

inline KnownOptimum optimum_from_json(const nlohmann::json& j) {
  KnownOptimum opt;
  opt.f_star = j.at("f_star").get<double>();
  for (const auto& jx : j.at("x_star")) opt.x_star.push_back(detail::vector_from_json(jx));
  opt.lambda_star = detail::vector_from_json(j.at("lambda_star"));
  return opt;
}

/// Line-delimited trace: one JSON object per iteration.
inline void write_trace(const std::string& path, const std::vector<TraceRecord>& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  for (const TraceRecord& r : trace) {
    nlohmann::json j;
    j["k"] = r.k;
    j["fc"] = r.fc;
    j["gap_surrogate"] = r.gap_surrogate;
    j["eq_violation"] = r.eq_violation;
    j["ineq_violation"] = r.ineq_violation;
    j["wall_time"] = r.wall_time;
    out << j.dump() << '\n';
  }
}

}  // namespace proxcenter
