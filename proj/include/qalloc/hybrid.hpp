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

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qalloc/anneal.hpp"
#include "qalloc/markowitz.hpp"
#include "qalloc/portfolio.hpp"

namespace qalloc {

enum class InnerSolver { Exact, SimulatedAnnealing };

struct HybridConfig {
  RiskParams risk;
  double epsilon = 0.05;
  double delta0 = 0.05;
  double delta_min = 0.05 / 64.0;
  std::size_t max_iters = 50;
  InnerSolver solver = InnerSolver::Exact;
  BinaryEncoding encoding;
  double lambda2 = 1.0;
  double lambda3 = 1.0;
  SamplerConfig sampler;
  // Unset: AnnealSchedule::for_model on each QUBO.
  std::optional<AnnealSchedule> schedule;

  void validate() const;
};

enum class AllocationStatus { Converged, InfeasibleReturn, IterationCap };

std::string to_string(AllocationStatus status);

struct IterationRecord {
  double p = 0.0;          // target return used for this solve
  double delta = 0.0;      // momentum applied after this solve
  double es = 0.0;         // empirical shortfall of the solved weights
  double ratio = 0.0;      // |es| / |target shortfall|
  double variance = 0.0;   // w'Cw
  double energy = 0.0;     // best QUBO energy (constants excluded)
  PortfolioWeights weights;
};

struct AllocationResult {
  PortfolioWeights weights;
  AllocationStatus status = AllocationStatus::IterationCap;
  double target_es = 0.0;
  std::vector<IterationRecord> trace;
  std::size_t iterations = 0;
  // Trace index of the returned weights; unset for infeasible-return.
  std::optional<std::size_t> selected;
  // Target return of the selected iterate.
  std::optional<double> final_p() const;
};

// Shortfall-driven retargeting loop around Markowitz QUBO solves:
// 
//   p <- mean(mu); target <- (sigma_ref / sigma_ref_t) es_ref
//   repeat:
//     p > max(mu)            -> zero weights, InfeasibleReturn
//     w <- argmin QUBO(p); r <- |ES(w)| / |target|
//     r > 1 + eps            -> p <- p (1 - delta)
//     r < 1 - eps            -> p <- p (1 + delta)
//     otherwise              -> w, Converged
// 
// delta halves (down to delta_min) whenever r jumps across the band. After
// max_iters solves the iterate closest to the band is returned with
// IterationCap. Throws std::domain_error if the target shortfall is zero.
AllocationResult allocate(const ReturnsWindow& win, const ReferenceRisk& ref, const HybridConfig& cfg);

// Halves delta (floored at delta_min) when the last two ratios lie on
// opposite sides of [1 - epsilon, 1 + epsilon].
double adjust_momentum(double delta, std::span<const double> ratios, double epsilon, double delta_min);

// Per-iteration (variance, |ES|) relative to the first iteration.
std::vector<std::pair<double, double>> variance_es_trace(const AllocationResult& result);

struct ClassicalSolution {
  PortfolioWeights weights;
  double variance = 0.0;
  double kkt_residual = 0.0;
  double violation = 0.0;
};

// Continuous min w'Cw s.t. mu'w = p, 1'w = 1, w >= 0, solved by a primal
// active-set method. Throws std::domain_error when p is outside
// [min mu, max mu].
ClassicalSolution classical_reference(const Eigen::VectorXd& mu, const Eigen::MatrixXd& cov, double p);
ClassicalSolution classical_reference(const ReturnsWindow& win, double p);

struct BacktestSpec {
  Eigen::Index window = 100;
  Eigen::Index stride = 100;
  std::string reference_asset;
  Eigen::Index crisis_start = 0;
  Eigen::Index crisis_length = 0;  // 0: use each window as its own crisis window

  void validate(const ReturnsWindow& data) const;
};

struct BacktestRow {
  Eigen::Index start = 0;
  Eigen::Index end = 0;  // exclusive
  std::string start_date, end_date;
  AllocationResult allocation;
  double final_return = 0.0;  // sum of in-window portfolio returns
  std::optional<double> sharpe;
  std::optional<double> reference_return;
  std::optional<double> reference_sharpe;
  std::optional<double> normalized_return;
  double avg_abs_corr = 0.0;
};

// Reference risk of `reference_asset` for `window` given the crisis slice.
ReferenceRisk reference_risk(const ReturnsWindow& data, const ReturnsWindow& window,
                             const BacktestSpec& spec, const RiskParams& risk);

// Rolling windows of spec.window periods every spec.stride periods. Each
// window runs allocate(); the classical reference is solved at the final
// target return of that run.
std::vector<BacktestRow> backtest(const ReturnsWindow& data, const BacktestSpec& spec, const HybridConfig& cfg);

std::string backtest_json(const ReturnsWindow& data, const std::vector<BacktestRow>& rows);
std::string allocation_json(const ReturnsWindow& win, const AllocationResult& result);
void write_trace_csv(std::ostream& out, const AllocationResult& result);

}  // namespace qalloc
