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

// Independent test oracles. These deliberately avoid the library's solver
// code paths: brute-force scalar loops, grid searches, a projected-gradient
// minimizer with its own simplex projection, and Eigen's Jacobi SVD.

#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace oracles {

/// Objective summed with plain scalar loops, one term at a time.
inline double scalar_loop_objective(const std::vector<Eigen::MatrixXd>& H,
                                    const std::vector<Eigen::VectorXd>& g,
                                    const std::vector<Eigen::VectorXd>& x) {
  double total = 0.0;
  for (std::size_t a = 0; a < H.size(); ++a) {
    for (Eigen::Index i = 0; i < H[a].rows(); ++i) {
      for (Eigen::Index j = 0; j < H[a].cols(); ++j) {
        total += 0.5 * x[a][i] * H[a](i, j) * x[a][j];
      }
      total += g[a][i] * x[a][i];
    }
  }
  return total;
}

/// Dense residual via elementwise loops.
inline Eigen::VectorXd scalar_loop_residual(const std::vector<Eigen::MatrixXd>& C,
                                            const std::vector<Eigen::VectorXd>& x,
                                            const Eigen::VectorXd& rhs) {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(rhs.size());
  for (std::size_t a = 0; a < C.size(); ++a) {
    for (Eigen::Index i = 0; i < C[a].rows(); ++i) {
      for (Eigen::Index j = 0; j < C[a].cols(); ++j) r[i] += C[a](i, j) * x[a][j];
    }
  }
  for (Eigen::Index i = 0; i < rhs.size(); ++i) r[i] -= rhs[i];
  return r;
}

/// Entropy prox value by a plain scalar loop.
inline double scalar_loop_entropy(const Eigen::VectorXd& x) {
  double s = std::log(static_cast<double>(x.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0) s += x[i] * std::log(x[i]);
  }
  return s;
}

struct GridSearchResult {
  Eigen::Vector2d minimizer;
  double objective;
  double cell;  ///< grid spacing
};

/// Dense grid search for min 0.5 x'Hx + g'x + (c/2)||x - x0||^2 over a 2-D
/// disk, at the given per-axis resolution.
inline GridSearchResult disk_grid_search(const Eigen::Matrix2d& H, const Eigen::Vector2d& g,
                                         const Eigen::Vector2d& x0, double R, double c,
                                         int resolution = 2001) {
  GridSearchResult best{x0, std::numeric_limits<double>::infinity(),
                        2.0 * R / (resolution - 1)};
  for (int i = 0; i < resolution; ++i) {
    const double u = x0[0] - R + best.cell * i;
    for (int j = 0; j < resolution; ++j) {
      const double v = x0[1] - R + best.cell * j;
      const double du = u - x0[0];
      const double dv = v - x0[1];
      if (du * du + dv * dv > R * R) continue;
      const double quad = 0.5 * (H(0, 0) * u * u + (H(0, 1) + H(1, 0)) * u * v +
                                 H(1, 1) * v * v);
      const double val = quad + g[0] * u + g[1] * v + 0.5 * c * (du * du + dv * dv);
      if (val < best.objective) {
        best.objective = val;
        best.minimizer << u, v;
      }
    }
  }
  return best;
}

/// Euclidean simplex projection, written independently of the library's.
inline Eigen::VectorXd simplex_projection(const Eigen::VectorXd& y) {
  const Eigen::Index m = y.size();
  std::vector<double> u(y.data(), y.data() + m);
  std::sort(u.begin(), u.end());
  double sum = 0.0;
  for (double v : u) sum += v;
  double tau = (sum - 1.0) / static_cast<double>(m);
  double partial = sum;
  for (Eigen::Index i = 0; i < m - 1; ++i) {
    if (tau >= u[i]) {
      partial -= u[i];
      tau = (partial - 1.0) / static_cast<double>(m - 1 - i);
    } else {
      break;
    }
  }
  Eigen::VectorXd out(m);
  for (Eigen::Index i = 0; i < m; ++i) out[i] = std::max(y[i] - tau, 0.0);
  return out;
}

/// Projected gradient with backtracking on
/// f(x) = 0.5 x'Hx + g'x + c (log m + sum x log x) over the simplex, run to
/// the requested stationarity. Backtracking handles the entropy gradient,
/// whose Lipschitz constant blows up near the boundary.
inline Eigen::VectorXd simplex_projected_gradient(const Eigen::MatrixXd& H,
                                                  const Eigen::VectorXd& g, double c,
                                                  double stationarity_tol = 1e-10,
                                                  long max_iter = 2000000) {
  const Eigen::Index m = g.size();
  Eigen::VectorXd x = Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
  auto value = [&](const Eigen::VectorXd& z) {
    double v = 0.5 * z.dot(H * z) + g.dot(z) + c * std::log(static_cast<double>(m));
    for (Eigen::Index i = 0; i < m; ++i) {
      if (z[i] > 0.0) v += c * z[i] * std::log(z[i]);
    }
    return v;
  };
  auto grad = [&](const Eigen::VectorXd& z) {
    Eigen::VectorXd gr = H * z + g;
    for (Eigen::Index i = 0; i < m; ++i) gr[i] += c * (std::log(std::max(z[i], 1e-300)) + 1.0);
    return gr;
  };
  double step = 1.0;
  for (long it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd gr = grad(x);
    const double fx = value(x);
    Eigen::VectorXd next;
    for (int bt = 0; bt < 200; ++bt) {
      next = simplex_projection(x - step * gr);
      const Eigen::VectorXd d = next - x;
      if (value(next) <= fx + gr.dot(d) + 0.5 / step * d.squaredNorm() + 1e-15) break;
      step *= 0.5;
    }
    x = next;
    step = std::min(step * 1.25, 1.0);
    if ((x - simplex_projection(x - grad(x))).norm() <= stationarity_tol) break;
  }
  return x;
}

/// Largest singular value through Eigen's two-sided Jacobi SVD.
inline double jacobi_svd_norm(const Eigen::MatrixXd& M) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  return svd.singularValues().size() > 0 ? svd.singularValues()[0] : 0.0;
}

/// Central finite difference of a scalar function of a vector.
template <typename F>
Eigen::VectorXd central_difference(F&& f, const Eigen::VectorXd& x, double h = 1e-5) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Eigen::VectorXd xp = x;
    Eigen::VectorXd xm = x;
    xp[j] += h;
    xm[j] -= h;
    g[j] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

/// Deterministic mt19937-based sampling for test fixtures.
class TestRng {
 public:
  explicit TestRng(unsigned seed) : gen_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
  }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen_); }

  Eigen::VectorXd normal_vector(Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = normal();
    return v;
  }
  Eigen::MatrixXd normal_matrix(Eigen::Index r, Eigen::Index c) {
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
      for (Eigen::Index j = 0; j < c; ++j) m(i, j) = normal();
    }
    return m;
  }
  /// Random PSD matrix with the given rank.
  Eigen::MatrixXd psd_matrix(Eigen::Index n, Eigen::Index rank) {
    const Eigen::MatrixXd G = normal_matrix(rank, n);
    Eigen::MatrixXd H = G.transpose() * G;
    return 0.5 * (H + H.transpose());
  }
  /// Point inside the ball ||x - center|| <= R.
  Eigen::VectorXd ball_point(const Eigen::VectorXd& center, double R) {
    Eigen::VectorXd y = normal_vector(center.size());
    const double n = y.norm();
    if (n == 0.0) return center;
    return center + (R * std::pow(uniform(), 1.0 / center.size()) / n) * y;
  }
  /// Point on the simplex (normalized exponentials).
  Eigen::VectorXd simplex_point(Eigen::Index m) {
    Eigen::VectorXd w(m);
    for (Eigen::Index i = 0; i < m; ++i) w[i] = -std::log(1.0 - uniform(0.0, 0.999999));
    return w / w.sum();
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace oracles
