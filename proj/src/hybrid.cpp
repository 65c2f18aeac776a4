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

#include "qalloc/hybrid.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "json.hpp"
#include "parallel.hpp"

namespace qalloc {

namespace {

struct InnerResult {
  BitState state;
  double energy = 0.0;
};

InnerResult solve_inner(const Qubo& q, const HybridConfig& cfg, std::size_t iteration) {
  if (cfg.solver == InnerSolver::Exact) {
    auto sol = exact_solve(q);
    return {std::move(sol.state), sol.energy};
  }
  SamplerConfig sampler = cfg.sampler;
  sampler.seed = derive_seed(cfg.sampler.seed, iteration);
  const AnnealSchedule sched = cfg.schedule.value_or(AnnealSchedule::for_model(q));
  const SampleSet samples = sampler.spin_reversal_transforms >= 1
                                ? sample_with_gauges(qubo_to_ising(q), sampler, sched)
                                : simulated_anneal(q, sched, sampler);
  return {samples.best().state, samples.best().energy};
}

int band_side(double ratio, double epsilon) {
  if (ratio > 1.0 + epsilon) return 1;
  if (ratio < 1.0 - epsilon) return -1;
  return 0;
}

double series_sum(const Eigen::VectorXd& v) { return v.sum(); }

std::optional<double> maybe_sharpe(const Eigen::VectorXd& series) {
  std::span<const double> view(series.data(), static_cast<std::size_t>(series.size()));
  if (sample_std(view) == 0.0) return std::nullopt;
  return sharpe_ratio(view);
}

nlohmann::ordered_json weights_json(const std::vector<std::string>& assets, const PortfolioWeights& w) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < assets.size(); ++i) j[assets[i]] = w(static_cast<Eigen::Index>(i));
  return j;
}

nlohmann::ordered_json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

void HybridConfig::validate() const {
  risk.validate();
  encoding.validate();
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
  if (!(delta_min > 0.0 && delta_min <= delta0 && delta0 < 1.0)) {
    throw std::invalid_argument("momentum needs 0 < delta_min <= delta0 < 1");
  }
  if (max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
}

std::optional<double> AllocationResult::final_p() const {
  if (!selected) return std::nullopt;
  return trace.at(*selected).p;
}

std::string to_string(AllocationStatus status) {
  switch (status) {
    case AllocationStatus::Converged: return "converged";
    case AllocationStatus::InfeasibleReturn: return "infeasible-return";
    case AllocationStatus::IterationCap: return "iteration-cap";
  }
  return "unknown";
}

double adjust_momentum(double delta, std::span<const double> ratios, double epsilon, double delta_min) {
  if (ratios.size() < 2) return delta;
  const int previous = band_side(ratios[ratios.size() - 2], epsilon);
  const int current = band_side(ratios.back(), epsilon);
  if (previous * current < 0) return std::max(delta / 2.0, delta_min);
  return delta;
}

AllocationResult allocate(const ReturnsWindow& win, const ReferenceRisk& ref, const HybridConfig& cfg) {
  cfg.validate();
  const Eigen::VectorXd mu = mean_returns(win);
  const Eigen::MatrixXd cov = covariance(win);
  const double max_mu = mu.maxCoeff();

  AllocationResult result;
  result.target_es = target_shortfall(ref);
  if (result.target_es == 0.0) throw std::domain_error("target shortfall is zero; shortfall ratio undefined");

  double p = mu.mean();
  double delta = cfg.delta0;
  std::vector<double> ratios;

  for (std::size_t iter = 0; iter < cfg.max_iters; ++iter) {
    if (p > max_mu) {
      result.status = AllocationStatus::InfeasibleReturn;
      result.weights = PortfolioWeights::Zero(mu.size());
      return result;
    }
    MarkowitzProblem prob{mu, cov, p, std::nullopt, cfg.lambda2, cfg.lambda3};
    const Qubo q = build_markowitz_qubo(prob, cfg.encoding);
    const InnerResult inner = solve_inner(q, cfg, iter);

    IterationRecord rec;
    rec.p = p;
    rec.weights = decode_weights(inner.state, cfg.encoding, static_cast<std::size_t>(mu.size()));
    rec.energy = inner.energy;
    rec.variance = rec.weights.dot(cov * rec.weights);
    rec.es = empirical_expected_shortfall(rec.weights, win, cfg.risk);
    rec.ratio = std::abs(rec.es) / std::abs(result.target_es);
    ratios.push_back(rec.ratio);
    delta = adjust_momentum(delta, ratios, cfg.epsilon, cfg.delta_min);
    rec.delta = delta;
    result.trace.push_back(rec);
    result.iterations = result.trace.size();

    switch (band_side(rec.ratio, cfg.epsilon)) {
      case 1:
        p *= 1.0 - delta;
        break;
      case -1:
        p *= 1.0 + delta;
        break;
      default:
        result.status = AllocationStatus::Converged;
        result.weights = rec.weights;
        result.selected = result.trace.size() - 1;
        return result;
    }
  }

  // Cap reached: keep the iterate whose ratio came closest to 1.
  std::size_t best = 0;
  for (std::size_t i = 1; i < result.trace.size(); ++i) {
    if (std::abs(result.trace[i].ratio - 1.0) < std::abs(result.trace[best].ratio - 1.0)) best = i;
  }
  result.status = AllocationStatus::IterationCap;
  result.weights = result.trace[best].weights;
  result.selected = best;
  return result;
}

std::vector<std::pair<double, double>> variance_es_trace(const AllocationResult& result) {
  if (result.trace.empty()) throw std::invalid_argument("trace is empty");
  auto relative = [](double value, double first) {
    if (first == 0.0) return value == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    return value / first;
  };
  const double var0 = result.trace.front().variance;
  const double es0 = std::abs(result.trace.front().es);
  std::vector<std::pair<double, double>> out;
  for (const auto& rec : result.trace) out.emplace_back(relative(rec.variance, var0), relative(std::abs(rec.es), es0));
  return out;
}

void BacktestSpec::validate(const ReturnsWindow& data) const {
  if (window < 2) throw std::invalid_argument("backtest window must be at least 2 periods");
  if (stride < 1) throw std::invalid_argument("backtest stride must be at least 1");
  if (data.periods() < window) {
    throw std::invalid_argument("backtest needs at least " + std::to_string(window) + " periods, data has " +
                                std::to_string(data.periods()));
  }
  if (crisis_length == 1 || crisis_length < 0 || crisis_start < 0 || crisis_start + crisis_length > data.periods()) {
    throw std::invalid_argument("crisis window must hold at least 2 periods inside the data");
  }
}

ReferenceRisk reference_risk(const ReturnsWindow& data, const ReturnsWindow& window, const BacktestSpec& spec,
                             const RiskParams& risk) {
  const Eigen::Index col = spec.reference_asset.empty() ? 0 : data.asset_index(spec.reference_asset);
  const Eigen::VectorXd crisis = spec.crisis_length > 0
                                     ? Eigen::VectorXd(data.returns().col(col).segment(spec.crisis_start, spec.crisis_length))
                                     : Eigen::VectorXd(window.returns().col(col));
  const Eigen::VectorXd current = window.returns().col(col);
  auto view = [](const Eigen::VectorXd& v) { return std::span<const double>(v.data(), static_cast<std::size_t>(v.size())); };
  ReferenceRisk ref;
  ref.sigma_ref = sample_std(view(crisis));
  ref.sigma_ref_t = sample_std(view(current));
  ref.es_ref = tail_mean(view(crisis), risk.alpha);
  return ref;
}

std::vector<BacktestRow> backtest(const ReturnsWindow& data, const BacktestSpec& spec, const HybridConfig& cfg) {
  spec.validate(data);
  cfg.validate();
  std::vector<Eigen::Index> starts;
  for (Eigen::Index s = 0; s + spec.window <= data.periods(); s += spec.stride) starts.push_back(s);

  std::vector<BacktestRow> rows(starts.size());
  HybridConfig window_cfg = cfg;
  if (starts.size() > 1) window_cfg.sampler.threads = 1;

  detail::parallel_for(starts.size(), cfg.sampler.threads, [&](std::size_t k) {
    BacktestRow& row = rows[k];
    row.start = starts[k];
    row.end = starts[k] + spec.window;
    const ReturnsWindow win = data.slice(row.start, spec.window);
    if (!win.dates().empty()) {
      row.start_date = win.dates().front();
      row.end_date = win.dates().back();
    }
    row.allocation = allocate(win, reference_risk(data, win, spec, cfg.risk), window_cfg);
    const Eigen::VectorXd series = portfolio_returns(row.allocation.weights, win);
    row.final_return = series_sum(series);
    row.sharpe = maybe_sharpe(series);
    row.avg_abs_corr = win.num_assets() >= 2 ? avg_abs_correlation(win) : 1.0;

    if (const auto p = row.allocation.final_p()) {
      try {
        const auto reference = classical_reference(win, *p);
        const Eigen::VectorXd ref_series = portfolio_returns(reference.weights, win);
        row.reference_return = series_sum(ref_series);
        row.reference_sharpe = maybe_sharpe(ref_series);
        if (*row.reference_return != 0.0) row.normalized_return = row.final_return / *row.reference_return;
      } catch (const std::domain_error&) {
        // Target outside the feasible mean range: no continuous reference.
      }
    }
  });
  return rows;
}

std::string allocation_json(const ReturnsWindow& win, const AllocationResult& result) {
  nlohmann::ordered_json j;
  j["status"] = to_string(result.status);
  j["iterations"] = result.iterations;
  j["target_es"] = result.target_es;
  j["final_p"] = optional_json(result.final_p());
  j["weights"] = weights_json(win.assets(), result.weights);
  j["budget"] = result.weights.sum();
  j["trace"] = nlohmann::ordered_json::array();
  for (const auto& rec : result.trace) {
    j["trace"].push_back({{"p", rec.p},
                          {"delta", rec.delta},
                          {"es", rec.es},
                          {"ratio", rec.ratio},
                          {"variance", rec.variance},
                          {"energy", rec.energy}});
  }
  return j.dump(2) + "\n";
}

std::string backtest_json(const ReturnsWindow& data, const std::vector<BacktestRow>& rows) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    nlohmann::ordered_json j;
    j["start"] = row.start;
    j["end"] = row.end;
    if (!row.start_date.empty()) {
      j["start_date"] = row.start_date;
      j["end_date"] = row.end_date;
    }
    j["status"] = to_string(row.allocation.status);
    j["weights"] = weights_json(data.assets(), row.allocation.weights);
    j["final_return"] = row.final_return;
    j["sharpe"] = optional_json(row.sharpe);
    j["reference_return"] = optional_json(row.reference_return);
    j["reference_sharpe"] = optional_json(row.reference_sharpe);
    j["normalized_return"] = optional_json(row.normalized_return);
    j["avg_abs_corr"] = row.avg_abs_corr;
    j["iterations"] = row.allocation.iterations;
    j["final_p"] = optional_json(row.allocation.final_p());
    out.push_back(std::move(j));
  }
  return out.dump(2) + "\n";
}

void write_trace_csv(std::ostream& out, const AllocationResult& result) {
  const auto old_precision = out.precision(17);
  out << "iteration,p,delta,es,ratio,variance,energy,variance_ratio,es_ratio\n";
  const auto relative = result.trace.empty() ? std::vector<std::pair<double, double>>{} : variance_es_trace(result);
  for (std::size_t i = 0; i < result.trace.size(); ++i) {
    const auto& rec = result.trace[i];
    out << i + 1 << ',' << rec.p << ',' << rec.delta << ',' << rec.es << ',' << rec.ratio << ',' << rec.variance
        << ',' << rec.energy << ',' << relative[i].first << ',' << relative[i].second << '\n';
  }
  out.precision(old_precision);
}

}  // namespace qalloc
