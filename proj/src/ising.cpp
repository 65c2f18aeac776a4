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

#include "qalloc/ising.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qalloc {

namespace {

void check_finite(double bias) {
  if (!std::isfinite(bias)) {
    throw std::invalid_argument("coefficient must be finite");
  }
}

void check_length(std::size_t state_size, std::size_t num_variables) {
  if (state_size != num_variables) {
    throw std::invalid_argument("state length " + std::to_string(state_size) +
                                " does not match model size " + std::to_string(num_variables));
  }
}

}  // namespace

template <class Vartype>
void QuadraticModel<Vartype>::check_index(Index v) const {
  if (v >= linear_.size()) {
    throw std::out_of_range("variable " + std::to_string(v) + " out of range for model of size " +
                            std::to_string(linear_.size()));
  }
}

template <class Vartype>
double QuadraticModel<Vartype>::linear(Index v) const {
  check_index(v);
  return linear_[v];
}

template <class Vartype>
double QuadraticModel<Vartype>::quadratic(Index u, Index v) const {
  check_index(u);
  check_index(v);
  if (u > v) std::swap(u, v);
  auto it = quadratic_.find({u, v});
  return it == quadratic_.end() ? 0.0 : it->second;
}

template <class Vartype>
void QuadraticModel<Vartype>::add_linear(Index v, double bias) {
  check_index(v);
  check_finite(bias);
  linear_[v] += bias;
}

template <class Vartype>
void QuadraticModel<Vartype>::add_quadratic(Index u, Index v, double bias) {
  check_index(u);
  check_index(v);
  check_finite(bias);
  if (u == v) {
    if constexpr (std::is_same_v<Vartype, BinaryVartype>) {
      linear_[u] += bias;
    } else {
      offset_ += bias;
    }
    return;
  }
  if (u > v) std::swap(u, v);
  quadratic_[{u, v}] += bias;
}

template <class Vartype>
void QuadraticModel<Vartype>::add_offset(double bias) {
  check_finite(bias);
  offset_ += bias;
}

template <class Vartype>
void QuadraticModel<Vartype>::set_offset(double offset) {
  check_finite(offset);
  offset_ = offset;
}

template <class Vartype>
void QuadraticModel<Vartype>::scale(double factor) {
  check_finite(factor);
  for (auto& bias : linear_) bias *= factor;
  for (auto& [pair, bias] : quadratic_) bias *= factor;
  offset_ *= factor;
}

template class QuadraticModel<BinaryVartype>;
template class QuadraticModel<SpinVartype>;

double qubo_energy(const Qubo& q, std::span<const std::uint8_t> x) {
  check_length(x.size(), q.num_variables());
  double energy = q.offset();
  const auto& h = q.linear();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 1) throw std::invalid_argument("binary state entries must be 0 or 1");
    if (x[i]) energy += h[i];
  }
  for (const auto& [pair, bias] : q.quadratic()) {
    if (x[pair.first] && x[pair.second]) energy += bias;
  }
  return energy;
}

double ising_energy(const IsingModel& m, std::span<const std::int8_t> s) {
  check_length(s.size(), m.num_variables());
  double energy = m.offset();
  const auto& h = m.linear();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != 1 && s[i] != -1) throw std::invalid_argument("spin entries must be -1 or +1");
    energy += h[i] * s[i];
  }
  for (const auto& [pair, bias] : m.quadratic()) {
    energy += bias * s[pair.first] * s[pair.second];
  }
  return energy;
}

// x = (1 + s) / 2
IsingModel qubo_to_ising(const Qubo& q) {
  IsingModel m(q.num_variables());
  double offset = q.offset();
  for (Index i = 0; i < q.num_variables(); ++i) {
    const double h = q.linear()[i];
    if (h == 0.0) continue;
    m.add_linear(i, 0.5 * h);
    offset += 0.5 * h;
  }
  for (const auto& [pair, bias] : q.quadratic()) {
    const double quarter = 0.25 * bias;
    m.add_quadratic(pair.first, pair.second, quarter);
    m.add_linear(pair.first, quarter);
    m.add_linear(pair.second, quarter);
    offset += quarter;
  }
  m.set_offset(offset);
  return m;
}

// s = 2x - 1
Qubo ising_to_qubo(const IsingModel& m) {
  Qubo q(m.num_variables());
  double offset = m.offset();
  for (Index i = 0; i < m.num_variables(); ++i) {
    const double h = m.linear()[i];
    if (h == 0.0) continue;
    q.add_linear(i, 2.0 * h);
    offset -= h;
  }
  for (const auto& [pair, bias] : m.quadratic()) {
    q.add_quadratic(pair.first, pair.second, 4.0 * bias);
    q.add_linear(pair.first, -2.0 * bias);
    q.add_linear(pair.second, -2.0 * bias);
    offset += bias;
  }
  q.set_offset(offset);
  return q;
}

SpinState to_spins(std::span<const std::uint8_t> x) {
  SpinState s(x.size());
  std::transform(x.begin(), x.end(), s.begin(), [](std::uint8_t b) {
    if (b > 1) throw std::invalid_argument("binary state entries must be 0 or 1");
    return static_cast<std::int8_t>(b ? 1 : -1);
  });
  return s;
}

BitState to_bits(std::span<const std::int8_t> s) {
  BitState x(s.size());
  std::transform(s.begin(), s.end(), x.begin(), [](std::int8_t v) {
    if (v != 1 && v != -1) throw std::invalid_argument("spin entries must be -1 or +1");
    return static_cast<std::uint8_t>(v > 0 ? 1 : 0);
  });
  return x;
}

Qubo penalize_constraints(const Qubo& objective, const LinearConstraintSet& cons, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("penalty weight must be finite and non-negative");
  }
  const auto n = static_cast<Eigen::Index>(objective.num_variables());
  if (cons.A.cols() != n || cons.A.rows() != cons.b.size()) {
    throw std::invalid_argument("constraint dimensions do not match the objective");
  }
  if (!cons.A.allFinite() || !cons.b.allFinite()) {
    throw std::invalid_argument("constraint coefficients must be finite");
  }
  Qubo q = objective;
  for (Eigen::Index r = 0; r < cons.A.rows(); ++r) {
    const double b = cons.b(r);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double a = cons.A(r, i);
      if (a == 0.0) continue;
      q.add_linear(static_cast<Index>(i), lambda * (a * a - 2.0 * b * a));
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double aj = cons.A(r, j);
        if (aj == 0.0) continue;
        q.add_quadratic(static_cast<Index>(i), static_cast<Index>(j), 2.0 * lambda * a * aj);
      }
    }
    q.add_offset(lambda * b * b);
  }
  return q;
}

ScaledIsing scale_to_hardware_range(const IsingModel& m) {
  double largest = 1.0;
  for (double h : m.linear()) largest = std::max(largest, std::abs(h));
  for (const auto& [pair, bias] : m.quadratic()) largest = std::max(largest, std::abs(bias));

  ScaledIsing out{m, largest};
  if (largest == 1.0) return out;
  const double offset = m.offset();
  out.model.scale(1.0 / largest);
  out.model.set_offset(offset);
  return out;
}

double dynamic_range(const IsingModel& m) {
  double largest = 0.0;
  double smallest = 0.0;
  for (const auto& [pair, bias] : m.quadratic()) {
    const double a = std::abs(bias);
    if (a == 0.0) continue;
    largest = std::max(largest, a);
    smallest = smallest == 0.0 ? a : std::min(smallest, a);
  }
  if (largest == 0.0) throw std::domain_error("dynamic range needs at least one nonzero coupling");
  return largest / smallest;
}

IsingModel apply_gauge(const IsingModel& m, std::span<const std::int8_t> gauge) {
  check_length(gauge.size(), m.num_variables());
  IsingModel out(m.num_variables());
  for (Index i = 0; i < m.num_variables(); ++i) {
    if (gauge[i] != 1 && gauge[i] != -1) throw std::invalid_argument("gauge entries must be -1 or +1");
    out.add_linear(i, gauge[i] * m.linear()[i]);
  }
  for (const auto& [pair, bias] : m.quadratic()) {
    out.add_quadratic(pair.first, pair.second, gauge[pair.first] * gauge[pair.second] * bias);
  }
  out.set_offset(m.offset());
  return out;
}

}  // namespace qalloc
