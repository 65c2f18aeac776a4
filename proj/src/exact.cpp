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

// Exhaustive QUBO minimization.
//
// State integers map variable i to bit (n - 1 - i), so increasing integer
// order is lexicographic order on the state vector. The low m bits ("inner")
// are tabulated once: their self-energy Qin[s] does not depend on the outer
// bits, which only shift the inner linear terms. For each outer assignment
// the remaining work per state is two table lookups and two additions.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "qalloc/anneal.hpp"

namespace qalloc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct DenseModel {
  std::size_t n;
  std::vector<double> h;
  std::vector<double> J;  // symmetric, zero diagonal
  double offset;

  explicit DenseModel(const Qubo& q)
      : n(q.num_variables()), h(q.linear()), J(n * n, 0.0), offset(q.offset()) {
    for (const auto& [pair, bias] : q.quadratic()) {
      J[pair.first * n + pair.second] += bias;
      J[pair.second * n + pair.first] += bias;
    }
  }
  double coupling(std::size_t u, std::size_t v) const { return J[u * n + v]; }
};

// A state replaces the incumbent only if it is lower by more than this.
double improve_below(double best) {
  return std::isinf(best) ? best : best - 1e-12 * std::max(1.0, std::abs(best));
}

// Steepest single-flip descent from a few starts. Only used as a pruning
// bound, never as a candidate, so it cannot affect tie-breaking.
double descent_bound(const DenseModel& m) {
  const std::size_t n = m.n;
  std::mt19937_64 rng(0x5eedULL);
  double best = kInf;
  for (int start = 0; start < 18; ++start) {
    std::vector<std::uint8_t> x(n, 0);
    if (start == 1) std::fill(x.begin(), x.end(), 1);
    if (start > 1) {
      for (auto& b : x) b = static_cast<std::uint8_t>(rng() >> 63);
    }
    std::vector<double> field(m.h);
    double energy = m.offset;
    for (std::size_t i = 0; i < n; ++i) {
      if (!x[i]) continue;
      energy += m.h[i];
      for (std::size_t j = 0; j < i; ++j) {
        if (x[j]) energy += m.coupling(i, j);
      }
      for (std::size_t j = 0; j < n; ++j) field[j] += m.coupling(i, j);
    }
    while (true) {
      std::size_t pick = n;
      double gain = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double delta = x[i] ? -field[i] : field[i];
        if (delta < gain) {
          gain = delta;
          pick = i;
        }
      }
      if (pick == n) break;
      x[pick] ^= 1;
      energy += gain;
      const double sign = x[pick] ? 1.0 : -1.0;
      for (std::size_t j = 0; j < n; ++j) field[j] += sign * m.coupling(pick, j);
    }
    best = std::min(best, energy);
  }
  return best;
}

}  // namespace

ExactSolution exact_solve(const Qubo& q) {
  const std::size_t n = q.num_variables();
  if (n > kMaxExactVariables) {
    throw std::length_error("exact solve enumerates at most " + std::to_string(kMaxExactVariables) +
                            " variables, model has " + std::to_string(n));
  }
  if (n == 0) return {{}, q.offset()};

  const DenseModel model(q);
  auto var_of_bit = [n](std::size_t bit) { return n - 1 - bit; };

  const std::size_t inner = std::min<std::size_t>(n, 16);
  const std::size_t lo_bits = std::min<std::size_t>(inner, 8);
  const std::size_t mid_bits = inner - lo_bits;
  const std::size_t outer_bits = n - inner;
  const std::size_t lo_size = std::size_t{1} << lo_bits;
  const std::size_t mid_size = std::size_t{1} << mid_bits;

  // Self-energy of every inner assignment, built incrementally by lowest set bit.
  std::vector<double> inner_energy(std::size_t{1} << inner, 0.0);
  for (std::size_t s = 1; s < inner_energy.size(); ++s) {
    const auto bit = static_cast<std::size_t>(__builtin_ctzll(s));
    const std::size_t rest = s & (s - 1);
    const std::size_t v = var_of_bit(bit);
    double e = inner_energy[rest] + model.h[v];
    for (std::size_t t = rest; t; t &= t - 1) {
      e += model.coupling(v, var_of_bit(static_cast<std::size_t>(__builtin_ctzll(t))));
    }
    inner_energy[s] = e;
  }
  std::vector<double> row_min(mid_size, kInf);
  for (std::size_t mid = 0; mid < mid_size; ++mid) {
    const double* row = &inner_energy[mid << lo_bits];
    row_min[mid] = *std::min_element(row, row + lo_size);
  }
  const double inner_min = *std::min_element(row_min.begin(), row_min.end());

  const double bound = descent_bound(model);
  const double prune_above = bound + 1e-9 * (1.0 + std::abs(bound));

  double best = kInf;
  std::uint64_t best_state = 0;
  std::vector<double> shift(inner), lo_table(lo_size), mid_table(mid_size);

  for (std::uint64_t outer = 0; outer < (std::uint64_t{1} << outer_bits); ++outer) {
    double base = model.offset;
    for (std::size_t t = 0; t < outer_bits; ++t) {
      if (!((outer >> t) & 1)) continue;
      const std::size_t v = var_of_bit(inner + t);
      base += model.h[v];
      for (std::size_t t2 = t + 1; t2 < outer_bits; ++t2) {
        if ((outer >> t2) & 1) base += model.coupling(v, var_of_bit(inner + t2));
      }
    }
    double lo_negative = 0.0, all_negative = 0.0;
    for (std::size_t b = 0; b < inner; ++b) {
      const std::size_t v = var_of_bit(b);
      double s = 0.0;
      for (std::size_t t = 0; t < outer_bits; ++t) {
        if ((outer >> t) & 1) s += model.coupling(v, var_of_bit(inner + t));
      }
      shift[b] = s;
      all_negative += std::min(0.0, s);
      if (b < lo_bits) lo_negative += std::min(0.0, s);
    }
    const double outer_floor = base + inner_min + all_negative;
    if (outer_floor > prune_above || outer_floor >= improve_below(best)) continue;

    lo_table[0] = 0.0;
    for (std::size_t s = 1; s < lo_size; ++s) {
      lo_table[s] = lo_table[s & (s - 1)] + shift[static_cast<std::size_t>(__builtin_ctzll(s))];
    }
    mid_table[0] = 0.0;
    for (std::size_t s = 1; s < mid_size; ++s) {
      mid_table[s] = mid_table[s & (s - 1)] + shift[lo_bits + static_cast<std::size_t>(__builtin_ctzll(s))];
    }

    for (std::size_t mid = 0; mid < mid_size; ++mid) {
      const double row_base = base + mid_table[mid];
      const double row_floor = row_base + row_min[mid] + lo_negative;
      if (row_floor > prune_above || row_floor >= improve_below(best)) continue;
      const double* row = &inner_energy[mid << lo_bits];

      double row_best = kInf;
      if (lo_size >= 8) {
        double acc[8];
        std::fill(acc, acc + 8, kInf);
        for (std::size_t s = 0; s < lo_size; s += 8) {
          for (std::size_t l = 0; l < 8; ++l) {
            const double v = row[s + l] + lo_table[s + l];
            acc[l] = v < acc[l] ? v : acc[l];
          }
        }
        for (double a : acc) row_best = std::min(row_best, a);
      } else {
        for (std::size_t s = 0; s < lo_size; ++s) row_best = std::min(row_best, row[s] + lo_table[s]);
      }
      if (!(row_best + row_base < improve_below(best))) continue;

      for (std::size_t s = 0; s < lo_size; ++s) {
        const double e = row[s] + lo_table[s] + row_base;
        if (e < improve_below(best)) {
          best = e;
          best_state = (outer << inner) | (static_cast<std::uint64_t>(mid) << lo_bits) | s;
        }
      }
    }
  }

  ExactSolution out;
  out.state.resize(n);
  for (std::size_t b = 0; b < n; ++b) out.state[var_of_bit(b)] = static_cast<std::uint8_t>((best_state >> b) & 1);
  out.energy = qubo_energy(q, out.state);
  return out;
}

}  // namespace qalloc
