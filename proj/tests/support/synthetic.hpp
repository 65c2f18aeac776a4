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

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qalloc/portfolio.hpp"
#include "qalloc/random.hpp"

namespace qalloc::testing {

struct MarketShape {
  double mean_lo = 0.0002;  // per-period drift range
  double mean_hi = 0.0020;
  double vol_lo = 0.006;  // idiosyncratic volatility range
  double vol_hi = 0.020;
  double factor_vol = 0.008;
  double beta_lo = 0.3;
  double beta_hi = 1.2;
  // Column 0 becomes a broad index: beta 1, small idiosyncratic noise.
  bool index_column = false;
  double index_vol = 0.002;
  // Drift rising with beta, mu_i = base + beta_i * premium, instead of mean_lo..mean_hi.
  bool capm = false;
  double capm_base = 0.0002;
  double capm_premium = 0.0012;
};

class Gaussian {
 public:
  explicit Gaussian(std::uint64_t seed) : rng_(seed) {}
  double uniform() { return uniform01(rng_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() {
    // Box-Muller, so streams do not depend on the standard library's normal
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

 private:
  std::mt19937_64 rng_;
};

// One-factor Gaussian market: r_ti = mu_i + beta_i f_t + sigma_i e_ti.
inline ReturnsWindow synthetic_market(Eigen::Index n, Eigen::Index T, std::uint64_t seed,
                                      const MarketShape& shape = {}) {
  Gaussian g(seed);
  Eigen::VectorXd mu(n), beta(n), vol(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    mu(i) = g.uniform(shape.mean_lo, shape.mean_hi);
    beta(i) = g.uniform(shape.beta_lo, shape.beta_hi);
    vol(i) = g.uniform(shape.vol_lo, shape.vol_hi);
  }
  if (shape.index_column) {
    beta(0) = 1.0;
    vol(0) = shape.index_vol;
  }
  if (shape.capm) mu = shape.capm_base + shape.capm_premium * beta.array();
  Eigen::MatrixXd R(T, n);
  for (Eigen::Index t = 0; t < T; ++t) {
    const double f = shape.factor_vol * g.normal();
    for (Eigen::Index i = 0; i < n; ++i) R(t, i) = mu(i) + beta(i) * f + vol(i) * g.normal();
  }
  std::vector<std::string> ids, dates;
  for (Eigen::Index i = 0; i < n; ++i) ids.push_back(shape.index_column && i == 0 ? "IDX" : "A" + std::to_string(i));
  for (Eigen::Index t = 0; t < T; ++t) dates.push_back("d" + std::to_string(t));
  return ReturnsWindow(std::move(ids), std::move(R), std::move(dates));
}

}  // namespace qalloc::testing
