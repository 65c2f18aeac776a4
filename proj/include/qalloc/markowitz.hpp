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

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qalloc/ising.hpp"
#include "qalloc/portfolio.hpp"

namespace qalloc {

// Fixed-point weight encoding w_i = sum_{a=1..k} 2^-a x_{i,a}.
// Representable weights per asset: {0, 2^-k, ..., 1 - 2^-k}.
struct BinaryEncoding {
  int k = 5;

  void validate() const;
  double bit_weight(int a) const;  // 2^-a, a in 1..k
  std::size_t levels() const { return std::size_t{1} << k; }
  double resolution() const { return bit_weight(k); }
};

// Flat variable layout: (asset i, bit a) <-> i * k + (a - 1).
class VariableIndex {
 public:
  VariableIndex(std::size_t num_assets, BinaryEncoding enc);

  std::size_t size() const { return num_assets_ * static_cast<std::size_t>(k_); }
  Index flat(std::size_t asset, int bit) const;
  std::size_t asset(Index flat) const { return flat / static_cast<std::size_t>(k_); }
  int bit(Index flat) const { return static_cast<int>(flat % static_cast<std::size_t>(k_)) + 1; }

 private:
  std::size_t num_assets_;
  int k_;
};

// min lambda3 w'Cw + lambda1 (mu'w - p)^2 + lambda2 (1'w - 1)^2, constants dropped.
struct MarkowitzProblem {
  Eigen::VectorXd mu;
  Eigen::MatrixXd cov;
  double p = 0.0;
  std::optional<double> lambda1;  // defaults to p^-2
  double lambda2 = 1.0;
  double lambda3 = 1.0;

  // Throws std::domain_error when p == 0 and lambda1 is unset.
  double resolved_lambda1() const;
  void validate() const;
};

// min w'Cw - q mu'w + lambda2 (1'w - 1)^2, constant dropped.
struct AlternateProblem {
  Eigen::VectorXd mu;
  Eigen::MatrixXd cov;
  double q = 0.0;
  double lambda2 = 1.0;

  void validate() const;
};

struct ConstraintResiduals {
  double return_gap = 0.0;  // mu'w - p
  double budget_gap = 0.0;  // 1'w - 1
};

PortfolioWeights decode_weights(std::span<const std::uint8_t> x, const BinaryEncoding& enc,
                                std::size_t num_assets);

// Nearest representable level per asset, ties toward zero. Weights above
// the top level 1 - 2^-k clamp to it.
BitState encode_weights(const PortfolioWeights& w, const BinaryEncoding& enc);

Qubo build_markowitz_qubo(const MarkowitzProblem& prob, const BinaryEncoding& enc);
Qubo build_alternate_qubo(const AlternateProblem& prob, const BinaryEncoding& enc);

// Constants dropped from the Markowitz QUBO: -lambda1 p^2 - lambda2.
double penalty_floor(const MarkowitzProblem& prob);

ConstraintResiduals constraint_residuals(const PortfolioWeights& w, const Eigen::VectorXd& mu, double p);

// L1(w) - L2(w) = (lambda1 - q) mu'w - lambda1 p with
//   L1 = w'Cw + lambda1 (mu'w - p) + lambda2 (1'w - 1)
//   L2 = w'Cw + q mu'w + lambda2 (1'w - 1)
// Covariance and means come from `prob`.
double lagrangian_difference(const PortfolioWeights& w, const MarkowitzProblem& prob,
                             const AlternateProblem& alt);

// Sidecar record written next to a built .qubo file.
struct QuboManifest {
  std::string formulation = "markowitz";  // or "alternate"
  std::size_t num_assets = 0;
  int k = 5;
  double p = 0.0;
  double q = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 1.0;
  double lambda3 = 1.0;
  double penalty_floor = 0.0;
  std::vector<std::string> assets;

  std::size_t num_variables() const { return num_assets * static_cast<std::size_t>(k); }
  std::string to_json() const;
  static QuboManifest from_json(const std::string& text);
};

}  // namespace qalloc
