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

#include "qalloc/portfolio.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>

namespace qalloc {

ReturnsWindow::ReturnsWindow(std::vector<std::string> assets, Eigen::MatrixXd returns,
                             std::vector<std::string> dates)
    : assets_(std::move(assets)), returns_(std::move(returns)), dates_(std::move(dates)) {
  if (returns_.rows() < 2) throw std::invalid_argument("returns window needs at least 2 periods");
  if (returns_.cols() < 1) throw std::invalid_argument("returns window needs at least 1 asset");
  if (static_cast<Eigen::Index>(assets_.size()) != returns_.cols()) {
    throw std::invalid_argument("asset id count does not match return columns");
  }
  if (!dates_.empty() && static_cast<Eigen::Index>(dates_.size()) != returns_.rows()) {
    throw std::invalid_argument("date count does not match return rows");
  }
  if (!returns_.allFinite()) throw std::invalid_argument("returns must be finite");
}

Eigen::Index ReturnsWindow::asset_index(const std::string& id) const {
  auto it = std::find(assets_.begin(), assets_.end(), id);
  if (it == assets_.end()) throw std::out_of_range("unknown asset '" + id + "'");
  return it - assets_.begin();
}

ReturnsWindow ReturnsWindow::slice(Eigen::Index first, Eigen::Index count) const {
  if (first < 0 || count < 0 || first + count > periods()) {
    throw std::out_of_range("slice outside the returns window");
  }
  std::vector<std::string> dates;
  if (!dates_.empty()) dates.assign(dates_.begin() + first, dates_.begin() + first + count);
  return ReturnsWindow(assets_, returns_.middleRows(first, count), std::move(dates));
}

void RiskParams::validate() const {
  if (!(alpha > 0.0 && alpha <= 0.5)) throw std::invalid_argument("alpha must lie in (0, 0.5]");
}

Eigen::VectorXd mean_returns(const ReturnsWindow& win) {
  return win.returns().colwise().mean().transpose();
}

Eigen::MatrixXd covariance(const ReturnsWindow& win) {
  const Eigen::MatrixXd centered = win.returns().rowwise() - win.returns().colwise().mean();
  Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(win.periods() - 1);
  // Symmetrize exactly; the product is symmetric only up to rounding.
  return 0.5 * (cov + cov.transpose());
}

Eigen::MatrixXd correlation(const ReturnsWindow& win) {
  const Eigen::MatrixXd cov = covariance(win);
  const Eigen::VectorXd sd = cov.diagonal().cwiseSqrt();
  if ((sd.array() <= 0.0).any()) throw std::domain_error("correlation undefined for a zero-variance column");
  Eigen::MatrixXd corr = cov.array() / (sd * sd.transpose()).array();
  corr.diagonal().setOnes();
  return corr;
}

Eigen::VectorXd portfolio_returns(const PortfolioWeights& w, const ReturnsWindow& win) {
  if (w.size() != win.num_assets()) throw std::invalid_argument("weight length does not match asset count");
  return win.returns() * w;
}

double tail_mean(std::span<const double> series, double alpha) {
  if (series.empty()) throw std::invalid_argument("tail mean of an empty series");
  const auto tail = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(alpha * series.size())));
  std::vector<double> sorted(series.begin(), series.end());
  std::partial_sort(sorted.begin(), sorted.begin() + tail, sorted.end());
  return std::accumulate(sorted.begin(), sorted.begin() + tail, 0.0) / static_cast<double>(tail);
}

double empirical_expected_shortfall(const PortfolioWeights& w, const ReturnsWindow& win,
                                    const RiskParams& rp) {
  rp.validate();
  const Eigen::VectorXd r = portfolio_returns(w, win);
  return tail_mean({r.data(), static_cast<std::size_t>(r.size())}, rp.alpha);
}

double gaussian_expected_shortfall(double mu, double sigma, const RiskParams& rp) {
  rp.validate();
  if (sigma < 0.0) throw std::invalid_argument("sigma must be non-negative");
  if (sigma == 0.0) return mu;
  const boost::math::normal_distribution<double> standard;
  const double c = rp.confidence();
  const double z = boost::math::quantile(standard, c);
  return mu + sigma * boost::math::pdf(standard, z) / (1.0 - c);
}

double portfolio_volatility(const PortfolioWeights& w, const Eigen::MatrixXd& cov) {
  if (w.size() != cov.rows() || cov.rows() != cov.cols()) {
    throw std::invalid_argument("weight length does not match covariance");
  }
  const double variance = w.dot(cov * w);
  if (variance < -1e-12) throw std::domain_error("negative portfolio variance; covariance is invalid");
  return std::sqrt(std::max(variance, 0.0));
}

double sample_std(std::span<const double> series) {
  if (series.size() < 2) throw std::invalid_argument("standard deviation needs at least 2 values");
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / series.size();
  double ss = 0.0;
  for (double v : series) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(series.size() - 1));
}

double sharpe_ratio(std::span<const double> series) {
  const double sd = sample_std(series);
  if (sd == 0.0) throw std::domain_error("Sharpe ratio undefined for zero standard deviation");
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / series.size();
  return mean / sd;
}

double target_shortfall(const ReferenceRisk& ref) {
  if (!(ref.sigma_ref > 0.0) || !(ref.sigma_ref_t > 0.0)) {
    throw std::invalid_argument("reference volatilities must be positive");
  }
  return ref.sigma_ref / ref.sigma_ref_t * ref.es_ref;
}

double avg_abs_correlation(const ReturnsWindow& win) {
  if (win.num_assets() < 2) throw std::invalid_argument("average correlation needs at least 2 assets");
  const Eigen::MatrixXd corr = correlation(win);
  double total = 0.0;
  std::size_t pairs = 0;
  for (Eigen::Index i = 0; i < corr.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < corr.cols(); ++j) {
      total += std::abs(corr(i, j));
      ++pairs;
    }
  }
  return total / static_cast<double>(pairs);
}

bool budget_feasible(const PortfolioWeights& w, double tol) { return std::abs(w.sum() - 1.0) <= tol; }

}  // namespace qalloc
