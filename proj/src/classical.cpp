// Copyright 2026 The qalloc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "qalloc/hybrid.hpp"

namespace qalloc {

namespace {

Eigen::VectorXd subvector(const Eigen::VectorXd& v, const std::vector<Eigen::Index>& idx) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out(static_cast<Eigen::Index>(k)) = v(idx[k]);
  return out;
}

// Bound multipliers z = g - A'lambda with lambda fitted on the free set.
Eigen::VectorXd bound_multipliers(const Eigen::MatrixXd& A, const Eigen::VectorXd& g,
                                  const std::vector<Eigen::Index>& free) {
  Eigen::MatrixXd At(static_cast<Eigen::Index>(free.size()), A.rows());
  for (std::size_t k = 0; k < free.size(); ++k) At.row(static_cast<Eigen::Index>(k)) = A.col(free[k]).transpose();
  const Eigen::VectorXd lambda = At.completeOrthogonalDecomposition().solve(subvector(g, free));
  return g - A.transpose() * lambda;
}

}  // namespace

ClassicalSolution classical_reference(const Eigen::VectorXd& mu, const Eigen::MatrixXd& cov, double p) {
  const Eigen::Index n = mu.size();
  if (n < 1 || cov.rows() != n || cov.cols() != n) throw std::invalid_argument("statistics shape mismatch");
  if (!mu.allFinite() || !cov.allFinite() || !std::isfinite(p)) throw std::invalid_argument("statistics must be finite");

  Eigen::Index lo = 0, hi = 0;
  const double mu_min = mu.minCoeff(&lo);
  const double mu_max = mu.maxCoeff(&hi);
  const double mu_scale = std::max(mu.cwiseAbs().maxCoeff(), std::abs(p));
  const double slack = 1e-12 * std::max(mu_scale, 1e-300);
  if (p < mu_min - slack || p > mu_max + slack) {
    throw std::domain_error("target return outside [min mu, max mu] is infeasible");
  }

  const double row_scale = mu_scale > 0.0 ? mu_scale : 1.0;
  Eigen::MatrixXd A(2, n);
  A.row(0) = mu.transpose() / row_scale;
  A.row(1).setOnes();
  Eigen::Vector2d b(p / row_scale, 1.0);

  const Eigen::MatrixXd C = 0.5 * (cov + cov.transpose());
  const double ridge = std::max(1e-10 * C.trace() / static_cast<double>(n), 1e-14);
  const Eigen::MatrixXd G = 2.0 * C + ridge * Eigen::MatrixXd::Identity(n, n);
  const double g_scale = std::max(G.cwiseAbs().maxCoeff(), 1e-300);

  // Vertex start on the segment between the lowest- and highest-mean assets.
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  if (mu_max - mu_min <= slack) {
    w(lo) = 1.0;
  } else {
    const double t = std::clamp((mu_max - p) / (mu_max - mu_min), 0.0, 1.0);
    w(lo) += t;
    w(hi) += 1.0 - t;
  }
  std::vector<bool> bound(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) bound[static_cast<std::size_t>(i)] = w(i) == 0.0;

  const int max_steps = 50 * static_cast<int>(n) + 100;
  for (int step = 0; step < max_steps; ++step) {
    std::vector<Eigen::Index> free, fixed;
    for (Eigen::Index i = 0; i < n; ++i) (bound[static_cast<std::size_t>(i)] ? fixed : free).push_back(i);
    const auto nf = static_cast<Eigen::Index>(free.size());
    const Eigen::VectorXd g = G * w;

    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(nf + 2, nf + 2);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nf + 2);
    for (Eigen::Index r = 0; r < nf; ++r) {
      for (Eigen::Index c = 0; c < nf; ++c) kkt(r, c) = G(free[r], free[c]);
      kkt(r, nf) = A(0, free[r]);
      kkt(r, nf + 1) = A(1, free[r]);
      kkt(nf, r) = A(0, free[r]);
      kkt(nf + 1, r) = A(1, free[r]);
      rhs(r) = -g(free[r]);
    }
    const Eigen::VectorXd sol = kkt.completeOrthogonalDecomposition().solve(rhs);
    const Eigen::VectorXd d = sol.head(nf);

    if (d.size() == 0 || d.cwiseAbs().maxCoeff() <= 1e-13 * (1.0 + w.cwiseAbs().maxCoeff())) {
      if (fixed.empty()) break;
      const Eigen::VectorXd z = bound_multipliers(A, g, free);
      Eigen::Index release = -1;
      double most_negative = -1e-11 * g_scale;
      for (Eigen::Index i : fixed) {
        if (z(i) < most_negative) {
          most_negative = z(i);
          release = i;
        }
      }
      if (release < 0) break;
      bound[static_cast<std::size_t>(release)] = false;
      continue;
    }

    double alpha = 1.0;
    Eigen::Index blocking = -1;
    for (Eigen::Index k = 0; k < nf; ++k) {
      if (d(k) < 0.0) {
        const double ratio = -w(free[k]) / d(k);
        if (ratio < alpha) {
          alpha = ratio;
          blocking = free[k];
        }
      }
    }
    for (Eigen::Index k = 0; k < nf; ++k) w(free[k]) += alpha * d(k);
    if (blocking >= 0) {
      w(blocking) = 0.0;
      bound[static_cast<std::size_t>(blocking)] = true;
    }
  }

  w = w.cwiseMax(0.0);
  ClassicalSolution out;
  out.weights = w;
  out.variance = w.dot(C * w);
  out.violation = std::max(std::abs(mu.dot(w) - p), std::abs(w.sum() - 1.0));

  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (w(i) > 0.0) support.push_back(i);
  }
  const Eigen::VectorXd g = 2.0 * C * w;
  const Eigen::VectorXd z = bound_multipliers(A, g, support);
  double residual = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    residual = std::max(residual, w(i) > 0.0 ? std::abs(z(i)) : std::max(0.0, -z(i)));
  }
  out.kkt_residual = residual;
  return out;
}

ClassicalSolution classical_reference(const ReturnsWindow& win, double p) {
  return classical_reference(mean_returns(win), covariance(win), p);
}

}  // namespace qalloc
