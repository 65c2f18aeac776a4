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

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qalloc/ising.hpp"
#include "qalloc/random.hpp"

namespace qalloc {

// Geometric inverse-temperature ladder over `sweeps` Metropolis sweeps.
struct AnnealSchedule {
  std::size_t sweeps = 1000;
  double beta_start = 0.1;
  double beta_end = 10.0;

  void validate() const;
  std::vector<double> betas() const;

  // Ladder scaled to the model's coefficients: the hot end accepts the
  // largest single-flip uphill move with probability 1/2, the cold end
  // accepts the smallest nonzero one with probability 1/100.
  static AnnealSchedule for_model(const Qubo& q, std::size_t sweeps = 1000);
};

// Static integrated-control-error draw, applied to hardware-scaled
// coefficients: h_i + N(0, sigma_h), J_ij + N(0, sigma_j).
struct NoiseModel {
  double sigma_h = 0.0;
  double sigma_j = 0.0;
};

struct SamplerConfig {
  std::size_t num_samples = 1000;
  std::uint64_t seed = kDefaultSeed;
  std::size_t spin_reversal_transforms = 100;
  std::optional<NoiseModel> noise;
  unsigned threads = 0;  // 0 = hardware concurrency
  // Cross-check the incremental energy against a full recomputation on a
  // random subset of accepted flips; throws std::logic_error on mismatch.
  bool verify_incremental = false;

  void validate() const;
};

struct SampleRecord {
  BitState state;
  double energy = 0.0;
  std::size_t count = 0;
};

// Distinct states with their clean-model energies and multiplicities,
// ordered by (energy, state).
class SampleSet {
 public:
  SampleSet() = default;
  // Takes records as given (merging is the caller's job); sorts them.
  explicit SampleSet(std::vector<SampleRecord> records);

  // Aggregates raw samples and evaluates each distinct state on `model`.
  static SampleSet from_states(const Qubo& model, const std::vector<BitState>& states);

  const std::vector<SampleRecord>& records() const { return records_; }
  std::size_t total_count() const;
  bool empty() const { return records_.empty(); }
  const SampleRecord& best() const;

 private:
  std::vector<SampleRecord> records_;
};

struct ExactSolution {
  BitState state;
  double energy = 0.0;
};

inline constexpr std::size_t kMaxExactVariables = 30;

// Independent Metropolis chains from random initial states; energies are
// evaluated on the unperturbed `q`. Chain c draws from
// mt19937_64(derive_seed(cfg.seed, c)).
SampleSet simulated_anneal(const Qubo& q, const AnnealSchedule& sched, const SamplerConfig& cfg);

// Splits cfg.num_samples evenly over cfg.spin_reversal_transforms gauges.
// Gauge 0 is the identity; the rest are random masks drawn from the seed.
// States are un-flipped before aggregation and returned as bits
// x = (1 + s) / 2 with energies of the clean model.
SampleSet sample_with_gauges(const IsingModel& m, const SamplerConfig& cfg, const AnnealSchedule& sched);

// Global minimum over all 2^n states. Among states whose energies agree to
// 1e-12 relative, the lexicographically smallest wins. Throws
// std::length_error above kMaxExactVariables.
ExactSolution exact_solve(const Qubo& q);

IsingModel inject_ice_noise(const IsingModel& m, const NoiseModel& noise, std::uint64_t seed);

struct Histogram {
  double energy_min = 0.0;
  double energy_max = 0.0;
  std::vector<double> bin_low;   // in rescaled (-1, 1) units
  std::vector<double> bin_high;
  std::vector<std::size_t> counts;
};

// Energies min-max rescaled to [-1, 1] and counted into equal-width bins.
Histogram energy_histogram(const SampleSet& ss, std::size_t bins = 50);

// e / e_ref; throws std::domain_error unless e_ref < 0.
double energy_ratio(double e, double e_ref);

std::string bitstring(std::span<const std::uint8_t> x);

// CSV columns: state,energy,count
void write_samples_csv(std::ostream& out, const SampleSet& ss);
// CSV columns: bin_low,bin_high,count
void write_histogram_csv(std::ostream& out, const Histogram& hist);

}  // namespace qalloc
