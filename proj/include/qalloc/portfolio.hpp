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

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qalloc {

// Fractions of capital per asset. Non-negative; no short selling.
using PortfolioWeights = Eigen::VectorXd;

// T x n matrix of per-period simple returns with asset ids and optional
// period labels.
class ReturnsWindow {
 public:
  // Throws std::invalid_argument unless T >= 2, n >= 1, all entries finite,
  // one id per column and (if given) one date per row.
  ReturnsWindow(std::vector<std::string> assets, Eigen::MatrixXd returns,
                std::vector<std::string> dates = {});

  Eigen::Index periods() const { return returns_.rows(); }
  Eigen::Index num_assets() const { return returns_.cols(); }
  const Eigen::MatrixXd& returns() const { return returns_; }
  const std::vector<std::string>& assets() const { return assets_; }
  const std::vector<std::string>& dates() const { return dates_; }

  // Column index of an asset id; throws std::out_of_range if unknown.
  Eigen::Index asset_index(const std::string& id) const;

  // Rows [first, first + count).
  ReturnsWindow slice(Eigen::Index first, Eigen::Index count) const;

 private:
  std::vector<std::string> assets_;
  Eigen::MatrixXd returns_;
  std::vector<std::string> dates_;
};

// alpha is the tail fraction (0.05 = worst 5% of periods); the Gaussian
// closed form uses confidence = 1 - alpha.
struct RiskParams {
  double alpha = 0.05;

  double confidence() const { return 1.0 - alpha; }
  void validate() const;
};

struct ReferenceRisk {
  double sigma_ref = 0.0;    // reference-asset volatility in the crisis window
  double sigma_ref_t = 0.0;  // reference-asset volatility in window t
  double es_ref = 0.0;       // reference expected shortfall
};

Eigen::VectorXd mean_returns(const ReturnsWindow& win);

// Sample covariance, denominator T - 1.
Eigen::MatrixXd covariance(const ReturnsWindow& win);

// Pearson correlation; throws std::domain_error on a zero-variance column.
Eigen::MatrixXd correlation(const ReturnsWindow& win);

// Per-period portfolio returns R w.
Eigen::VectorXd portfolio_returns(const PortfolioWeights& w, const ReturnsWindow& win);

// Mean of the max(1, floor(alpha T)) lowest values of R w.
double empirical_expected_shortfall(const PortfolioWeights& w, const ReturnsWindow& win,
                                    const RiskParams& rp);

// Same tail average over an arbitrary return series.
double tail_mean(std::span<const double> series, double alpha);

// mu + sigma * phi(Phi^-1(c)) / (1 - c) with c = rp.confidence().
double gaussian_expected_shortfall(double mu, double sigma, const RiskParams& rp);

// sqrt(w' C w); quadratic forms down to -1e-12 clamp to zero, lower throws.
double portfolio_volatility(const PortfolioWeights& w, const Eigen::MatrixXd& cov);

// Sample standard deviation (denominator n - 1).
double sample_std(std::span<const double> series);

// mean / std of a return series; throws std::domain_error on zero std.
double sharpe_ratio(std::span<const double> series);

// (sigma_ref / sigma_ref_t) * es_ref
double target_shortfall(const ReferenceRisk& ref);

// Mean |corr(i, j)| over all pairs i < j.
double avg_abs_correlation(const ReturnsWindow& win);

// |sum w - 1| <= tol
bool budget_feasible(const PortfolioWeights& w, double tol);

}  // namespace qalloc
