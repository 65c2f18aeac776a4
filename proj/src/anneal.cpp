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

#include "qalloc/anneal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

#include "parallel.hpp"

namespace qalloc {

namespace {

// Adjacency in compressed rows; each interaction appears in both rows.
struct SparseModel {
  std::vector<double> h;
  std::vector<std::size_t> row;
  std::vector<Index> col;
  std::vector<double> weight;

  explicit SparseModel(const Qubo& q) : h(q.linear()), row(q.num_variables() + 1, 0) {
    for (const auto& [pair, bias] : q.quadratic()) {
      ++row[pair.first + 1];
      ++row[pair.second + 1];
    }
    for (std::size_t i = 0; i < h.size(); ++i) row[i + 1] += row[i];
    col.resize(row.back());
    weight.resize(row.back());
    std::vector<std::size_t> fill(row.begin(), row.end() - 1);
    for (const auto& [pair, bias] : q.quadratic()) {
      col[fill[pair.first]] = pair.second;
      weight[fill[pair.first]++] = bias;
      col[fill[pair.second]] = pair.first;
      weight[fill[pair.second]++] = bias;
    }
  }
};

Qubo perturbed(const Qubo& q, const NoiseModel& noise, std::uint64_t seed) {
  const auto scaled = scale_to_hardware_range(qubo_to_ising(q));
  IsingModel noisy = inject_ice_noise(scaled.model, noise, seed);
  noisy.scale(scaled.scale);
  return ising_to_qubo(noisy);
}

BitState anneal_one(const SparseModel& model, const std::vector<double>& betas, std::mt19937_64& rng,
                    const Qubo* verify_against, std::uint64_t verify_seed) {
  const std::size_t n = model.h.size();
  BitState x(n);
  for (auto& b : x) b = static_cast<std::uint8_t>(rng() >> 63);

  std::vector<double> field(model.h);
  for (std::size_t i = 0; i < n; ++i) {
    if (!x[i]) continue;
    for (std::size_t e = model.row[i]; e < model.row[i + 1]; ++e) field[model.col[e]] += model.weight[e];
  }

  std::mt19937_64 verify_rng(verify_seed);
  double energy = verify_against ? qubo_energy(*verify_against, x) : 0.0;

  for (double beta : betas) {
    for (std::size_t i = 0; i < n; ++i) {
      const double delta = x[i] ? -field[i] : field[i];
      if (delta > 0.0) {
        const double exponent = beta * delta;
        if (exponent > 40.0 || uniform01(rng) >= std::exp(-exponent)) continue;
      }
      x[i] ^= 1;
      const double sign = x[i] ? 1.0 : -1.0;
      for (std::size_t e = model.row[i]; e < model.row[i + 1]; ++e) {
        field[model.col[e]] += sign * model.weight[e];
      }
      if (verify_against) {
        energy += delta;
        if ((verify_rng() & 63) == 0) {
          const double full = qubo_energy(*verify_against, x);
          if (std::abs(full - energy) > 1e-9 * (1.0 + std::abs(full))) {
            throw std::logic_error("incremental energy drifted from full recomputation");
          }
        }
      }
    }
  }
  return x;
}

// Runs chains [first_chain, first_chain + count) on `model`.
std::vector<BitState> anneal_chains(const Qubo& model, const AnnealSchedule& sched, const SamplerConfig& cfg,
                                    std::size_t first_chain, std::size_t count) {
  std::vector<BitState> states(count);
  if (count == 0) return states;
  const auto betas = sched.betas();
  const std::optional<SparseModel> shared =
      cfg.noise ? std::nullopt : std::optional<SparseModel>(SparseModel(model));

  detail::parallel_for(count, cfg.threads, [&](std::size_t c) {
    const std::uint64_t chain = first_chain + c;
    const std::uint64_t seed = derive_seed(cfg.seed, chain);
    std::mt19937_64 rng(seed);
    if (cfg.noise) {
      const Qubo noisy = perturbed(model, *cfg.noise, derive_seed(seed, 1));
      const SparseModel local(noisy);
      states[c] = anneal_one(local, betas, rng, cfg.verify_incremental ? &noisy : nullptr, derive_seed(seed, 2));
    } else {
      states[c] = anneal_one(*shared, betas, rng, cfg.verify_incremental ? &model : nullptr, derive_seed(seed, 2));
    }
  });
  return states;
}

}  // namespace

void AnnealSchedule::validate() const {
  if (sweeps < 1) throw std::invalid_argument("anneal schedule needs at least one sweep");
  if (!(beta_start > 0.0) || !(beta_start <= beta_end) || !std::isfinite(beta_end)) {
    throw std::invalid_argument("anneal schedule needs 0 < beta_start <= beta_end");
  }
}

std::vector<double> AnnealSchedule::betas() const {
  validate();
  std::vector<double> out(sweeps);
  if (sweeps == 1) {
    out[0] = beta_end;
    return out;
  }
  const double ratio = beta_end / beta_start;
  for (std::size_t s = 0; s < sweeps; ++s) {
    out[s] = beta_start * std::pow(ratio, static_cast<double>(s) / static_cast<double>(sweeps - 1));
  }
  return out;
}

AnnealSchedule AnnealSchedule::for_model(const Qubo& q, std::size_t sweeps) {
  const std::size_t n = q.num_variables();
  std::vector<double> reach(n, 0.0);
  double smallest = 0.0;
  auto note = [&](double bias) {
    const double a = std::abs(bias);
    if (a > 0.0) smallest = smallest == 0.0 ? a : std::min(smallest, a);
  };
  for (std::size_t i = 0; i < n; ++i) {
    reach[i] = std::abs(q.linear()[i]);
    note(q.linear()[i]);
  }
  for (const auto& [pair, bias] : q.quadratic()) {
    reach[pair.first] += std::abs(bias);
    reach[pair.second] += std::abs(bias);
    note(bias);
  }
  const double largest = n ? *std::max_element(reach.begin(), reach.end()) : 0.0;
  AnnealSchedule sched;
  sched.sweeps = sweeps;
  if (largest == 0.0) return sched;  // flat landscape; any ladder will do
  sched.beta_start = std::log(2.0) / largest;
  sched.beta_end = std::max(sched.beta_start, std::log(100.0) / smallest);
  return sched;
}

void SamplerConfig::validate() const {
  if (num_samples < 1) throw std::invalid_argument("need at least one sample");
  if (noise && (!(noise->sigma_h >= 0.0) || !(noise->sigma_j >= 0.0))) {
    throw std::invalid_argument("noise standard deviations must be non-negative");
  }
}

SampleSet::SampleSet(std::vector<SampleRecord> records) : records_(std::move(records)) {
  std::sort(records_.begin(), records_.end(), [](const SampleRecord& a, const SampleRecord& b) {
    if (a.energy != b.energy) return a.energy < b.energy;
    return a.state < b.state;
  });
}

SampleSet SampleSet::from_states(const Qubo& model, const std::vector<BitState>& states) {
  std::map<BitState, std::size_t> counts;
  for (const auto& s : states) ++counts[s];
  std::vector<SampleRecord> records;
  records.reserve(counts.size());
  for (auto& [state, count] : counts) records.push_back({state, qubo_energy(model, state), count});
  return SampleSet(std::move(records));
}

std::size_t SampleSet::total_count() const {
  std::size_t total = 0;
  for (const auto& r : records_) total += r.count;
  return total;
}

const SampleRecord& SampleSet::best() const {
  if (records_.empty()) throw std::logic_error("empty sample set has no best record");
  return records_.front();
}

SampleSet simulated_anneal(const Qubo& q, const AnnealSchedule& sched, const SamplerConfig& cfg) {
  cfg.validate();
  if (q.num_variables() == 0) throw std::invalid_argument("cannot anneal an empty model");
  return SampleSet::from_states(q, anneal_chains(q, sched, cfg, 0, cfg.num_samples));
}

SampleSet sample_with_gauges(const IsingModel& m, const SamplerConfig& cfg, const AnnealSchedule& sched) {
  cfg.validate();
  if (cfg.spin_reversal_transforms < 1) throw std::invalid_argument("need at least one gauge");
  if (m.num_variables() == 0) throw std::invalid_argument("cannot anneal an empty model");
  const std::size_t n = m.num_variables();
  const std::size_t gauges = cfg.spin_reversal_transforms;
  const Qubo clean = ising_to_qubo(m);

  std::vector<BitState> all;
  all.reserve(cfg.num_samples);
  std::size_t next_chain = 0;
  std::mt19937_64 mask_rng(derive_seed(cfg.seed, 0xfeedULL));
  for (std::size_t g = 0; g < gauges; ++g) {
    SpinState mask(n, 1);
    if (g > 0) {
      for (auto& v : mask) v = static_cast<std::int8_t>((mask_rng() >> 63) ? -1 : 1);
    }
    const std::size_t share = cfg.num_samples / gauges + (g < cfg.num_samples % gauges ? 1 : 0);
    if (share == 0) continue;
    const Qubo gauged = g == 0 ? clean : ising_to_qubo(apply_gauge(m, mask));
    for (auto& state : anneal_chains(gauged, sched, cfg, next_chain, share)) {
      for (std::size_t i = 0; i < n; ++i) {
        if (mask[i] < 0) state[i] ^= 1;
      }
      all.push_back(std::move(state));
    }
    next_chain += share;
  }
  return SampleSet::from_states(clean, all);
}

IsingModel inject_ice_noise(const IsingModel& m, const NoiseModel& noise, std::uint64_t seed) {
  if (!(noise.sigma_h >= 0.0) || !(noise.sigma_j >= 0.0)) {
    throw std::invalid_argument("noise standard deviations must be non-negative");
  }
  IsingModel out = m;
  std::mt19937_64 rng(splitmix64(seed));
  std::normal_distribution<double> gauss(0.0, 1.0);
  if (noise.sigma_h > 0.0) {
    for (Index i = 0; i < out.num_variables(); ++i) out.add_linear(i, noise.sigma_h * gauss(rng));
  }
  if (noise.sigma_j > 0.0) {
    for (const auto& [pair, bias] : m.quadratic()) {
      out.add_quadratic(pair.first, pair.second, noise.sigma_j * gauss(rng));
    }
  }
  return out;
}

Histogram energy_histogram(const SampleSet& ss, std::size_t bins) {
  if (ss.empty()) throw std::invalid_argument("histogram needs at least one sample");
  if (bins < 1) throw std::invalid_argument("histogram needs at least one bin");
  Histogram hist;
  hist.energy_min = ss.records().front().energy;
  hist.energy_max = ss.records().front().energy;
  for (const auto& r : ss.records()) {
    hist.energy_min = std::min(hist.energy_min, r.energy);
    hist.energy_max = std::max(hist.energy_max, r.energy);
  }
  hist.counts.assign(bins, 0);
  const double width = 2.0 / static_cast<double>(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    hist.bin_low.push_back(-1.0 + width * static_cast<double>(b));
    hist.bin_high.push_back(b + 1 == bins ? 1.0 : -1.0 + width * static_cast<double>(b + 1));
  }
  const double span = hist.energy_max - hist.energy_min;
  for (const auto& r : ss.records()) {
    const double scaled = span > 0.0 ? -1.0 + 2.0 * (r.energy - hist.energy_min) / span : -1.0;
    auto bin = static_cast<std::size_t>(std::floor((scaled + 1.0) / width));
    hist.counts[std::min(bin, bins - 1)] += r.count;
  }
  return hist;
}

double energy_ratio(double e, double e_ref) {
  if (!(e_ref < 0.0)) throw std::domain_error("energy ratio needs a negative reference energy");
  return e / e_ref;
}

std::string bitstring(std::span<const std::uint8_t> x) {
  std::string s(x.size(), '0');
  for (std::size_t i = 0; i < x.size(); ++i) s[i] = x[i] ? '1' : '0';
  return s;
}

void write_samples_csv(std::ostream& out, const SampleSet& ss) {
  const auto old_precision = out.precision(17);
  out << "state,energy,count\n";
  for (const auto& r : ss.records()) out << bitstring(r.state) << ',' << r.energy << ',' << r.count << '\n';
  out.precision(old_precision);
}

void write_histogram_csv(std::ostream& out, const Histogram& hist) {
  const auto old_precision = out.precision(17);
  out << "bin_low,bin_high,count\n";
  for (std::size_t b = 0; b < hist.counts.size(); ++b) {
    out << hist.bin_low[b] << ',' << hist.bin_high[b] << ',' << hist.counts[b] << '\n';
  }
  out.precision(old_precision);
}

}  // namespace qalloc
