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

#include "qalloc/markowitz.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace qalloc {

namespace {

void check_statistics(const Eigen::VectorXd& mu, const Eigen::MatrixXd& cov) {
  if (mu.size() < 1) throw std::invalid_argument("need at least one asset");
  if (cov.rows() != mu.size() || cov.cols() != mu.size()) {
    throw std::invalid_argument("covariance shape does not match the mean vector");
  }
  if (!mu.allFinite() || !cov.allFinite()) throw std::invalid_argument("statistics must be finite");
}

void check_multiplier(double lambda, const char* name) {
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw std::invalid_argument(std::string(name) + " must be finite and non-negative");
  }
}

// Expands w'Qw + g'w with w = B x into QUBO terms.
Qubo weights_quadratic_to_qubo(const Eigen::MatrixXd& quad, const Eigen::VectorXd& lin,
                               const BinaryEncoding& enc) {
  const auto n = static_cast<std::size_t>(lin.size());
  const VariableIndex index(n, enc);
  Qubo q(index.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (int a = 1; a <= enc.k; ++a) {
      const Index u = index.flat(i, a);
      const double ca = enc.bit_weight(a);
      q.add_linear(u, lin(i) * ca + quad(i, i) * ca * ca);
      for (std::size_t j = i; j < n; ++j) {
        for (int b = (j == i ? a + 1 : 1); b <= enc.k; ++b) {
          const Index v = index.flat(j, b);
          q.add_quadratic(u, v, 2.0 * quad(i, j) * ca * enc.bit_weight(b));
        }
      }
    }
  }
  return q;
}

}  // namespace

void BinaryEncoding::validate() const {
  if (k < 1 || k > 16) throw std::invalid_argument("bits per asset must lie in 1..16");
}

double BinaryEncoding::bit_weight(int a) const {
  if (a < 1 || a > k) throw std::out_of_range("bit index must lie in 1..k");
  return std::ldexp(1.0, -a);
}

VariableIndex::VariableIndex(std::size_t num_assets, BinaryEncoding enc) : num_assets_(num_assets), k_(enc.k) {
  enc.validate();
}

Index VariableIndex::flat(std::size_t asset, int bit) const {
  if (asset >= num_assets_ || bit < 1 || bit > k_) throw std::out_of_range("(asset, bit) out of range");
  return static_cast<Index>(asset * static_cast<std::size_t>(k_) + static_cast<std::size_t>(bit - 1));
}

double MarkowitzProblem::resolved_lambda1() const {
  if (lambda1) return *lambda1;
  if (p == 0.0) throw std::domain_error("default lambda1 = p^-2 needs a nonzero target return");
  return 1.0 / (p * p);
}

void MarkowitzProblem::validate() const {
  check_statistics(mu, cov);
  if (!std::isfinite(p)) throw std::invalid_argument("target return must be finite");
  check_multiplier(resolved_lambda1(), "lambda1");
  check_multiplier(lambda2, "lambda2");
  check_multiplier(lambda3, "lambda3");
}

void AlternateProblem::validate() const {
  check_statistics(mu, cov);
  if (!std::isfinite(q)) throw std::invalid_argument("risk-appetite coefficient must be finite");
  check_multiplier(lambda2, "lambda2");
}

PortfolioWeights decode_weights(std::span<const std::uint8_t> x, const BinaryEncoding& enc,
                                std::size_t num_assets) {
  const VariableIndex index(num_assets, enc);
  if (x.size() != index.size()) {
    throw std::invalid_argument("state length " + std::to_string(x.size()) + " != assets * k = " +
                                std::to_string(index.size()));
  }
  PortfolioWeights w = PortfolioWeights::Zero(static_cast<Eigen::Index>(num_assets));
  for (std::size_t i = 0; i < num_assets; ++i) {
    for (int a = 1; a <= enc.k; ++a) {
      if (x[index.flat(i, a)]) w(static_cast<Eigen::Index>(i)) += enc.bit_weight(a);
    }
  }
  return w;
}

BitState encode_weights(const PortfolioWeights& w, const BinaryEncoding& enc) {
  enc.validate();
  const auto n = static_cast<std::size_t>(w.size());
  const VariableIndex index(n, enc);
  const auto top = static_cast<long long>(enc.levels()) - 1;
  BitState x(index.size(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = w(static_cast<Eigen::Index>(i));
    if (!(wi >= 0.0 && wi < 1.0)) throw std::domain_error("encodable weights lie in [0, 1)");
    // Round half toward zero.
    auto level = static_cast<long long>(std::ceil(std::ldexp(wi, enc.k) - 0.5));
    level = std::min(std::max(level, 0LL), top);
    for (int a = 1; a <= enc.k; ++a) {
      x[index.flat(i, a)] = static_cast<std::uint8_t>((level >> (enc.k - a)) & 1);
    }
  }
  return x;
}

Qubo build_markowitz_qubo(const MarkowitzProblem& prob, const BinaryEncoding& enc) {
  prob.validate();
  enc.validate();
  const auto n = prob.mu.size();
  const double lambda1 = prob.resolved_lambda1();
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  const Eigen::MatrixXd sym_cov = 0.5 * (prob.cov + prob.cov.transpose());

  const Eigen::MatrixXd quad = prob.lambda3 * sym_cov + lambda1 * prob.mu * prob.mu.transpose() +
                               prob.lambda2 * ones * ones.transpose();
  const Eigen::VectorXd lin = -2.0 * prob.p * lambda1 * prob.mu - 2.0 * prob.lambda2 * ones;
  return weights_quadratic_to_qubo(quad, lin, enc);
}

Qubo build_alternate_qubo(const AlternateProblem& prob, const BinaryEncoding& enc) {
  prob.validate();
  enc.validate();
  const auto n = prob.mu.size();
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  const Eigen::MatrixXd quad =
      0.5 * (prob.cov + prob.cov.transpose()) + prob.lambda2 * ones * ones.transpose();
  const Eigen::VectorXd lin = -prob.q * prob.mu - 2.0 * prob.lambda2 * ones;
  return weights_quadratic_to_qubo(quad, lin, enc);
}

double penalty_floor(const MarkowitzProblem& prob) {
  return -prob.resolved_lambda1() * prob.p * prob.p - prob.lambda2;
}

ConstraintResiduals constraint_residuals(const PortfolioWeights& w, const Eigen::VectorXd& mu, double p) {
  if (w.size() != mu.size()) throw std::invalid_argument("weight length does not match mean vector");
  return {mu.dot(w) - p, w.sum() - 1.0};
}

double lagrangian_difference(const PortfolioWeights& w, const MarkowitzProblem& prob,
                             const AlternateProblem& alt) {
  if (w.size() != prob.mu.size()) throw std::invalid_argument("weight length does not match mean vector");
  const double variance = w.dot(prob.cov * w);
  const double ret = prob.mu.dot(w);
  const double budget = w.sum() - 1.0;
  const double l1 = variance + prob.resolved_lambda1() * (ret - prob.p) + prob.lambda2 * budget;
  // return multiplier of L2 taken with the sign that makes q = lambda1 cancel
  const double l2 = variance + alt.q * ret + prob.lambda2 * budget;
  return l1 - l2;
}

std::string QuboManifest::to_json() const {
  nlohmann::ordered_json j;
  j["formulation"] = formulation;
  j["num_assets"] = num_assets;
  j["k"] = k;
  j["num_variables"] = num_variables();
  j["p"] = p;
  j["q"] = q;
  j["lambda1"] = lambda1;
  j["lambda2"] = lambda2;
  j["lambda3"] = lambda3;
  j["penalty_floor"] = penalty_floor;
  j["assets"] = assets;
  return j.dump(2) + "\n";
}

QuboManifest QuboManifest::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  QuboManifest m;
  m.formulation = j.at("formulation").get<std::string>();
  m.num_assets = j.at("num_assets").get<std::size_t>();
  m.k = j.at("k").get<int>();
  m.p = j.at("p").get<double>();
  m.q = j.value("q", 0.0);
  m.lambda1 = j.at("lambda1").get<double>();
  m.lambda2 = j.at("lambda2").get<double>();
  m.lambda3 = j.at("lambda3").get<double>();
  m.penalty_floor = j.at("penalty_floor").get<double>();
  m.assets = j.at("assets").get<std::vector<std::string>>();
  return m;
}

}  // namespace qalloc
