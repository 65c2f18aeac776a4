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

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qalloc {

using Index = std::uint32_t;
using BitState = std::vector<std::uint8_t>;
using SpinState = std::vector<std::int8_t>;

struct BinaryVartype {};
struct SpinVartype {};

// Quadratic form over n variables with an explicit constant offset.
// 
// Interactions are stored once per unordered pair with u < v. Diagonal
// entries passed to add_quadratic fold into the linear term (x*x == x for
// binary variables, s*s == 1 for spins folds into the offset).
template <class Vartype>
class QuadraticModel {
 public:
  using Pair = std::pair<Index, Index>;

  QuadraticModel() = default;
  explicit QuadraticModel(std::size_t num_variables) : linear_(num_variables, 0.0) {}

  std::size_t num_variables() const { return linear_.size(); }
  std::size_t num_interactions() const { return quadratic_.size(); }

  double linear(Index v) const;
  const std::vector<double>& linear() const { return linear_; }

  // Coefficient of the (u, v) interaction in either order, 0 if absent.
  double quadratic(Index u, Index v) const;
  const std::map<Pair, double>& quadratic() const { return quadratic_; }

  double offset() const { return offset_; }

  void add_linear(Index v, double bias);
  void add_quadratic(Index u, Index v, double bias);
  void add_offset(double bias);
  void set_offset(double offset);

  // Multiplies every coefficient and the offset by `factor`.
  void scale(double factor);

  bool operator==(const QuadraticModel&) const = default;

 private:
  void check_index(Index v) const;

  std::vector<double> linear_;
  std::map<Pair, double> quadratic_;
  double offset_ = 0.0;
};

// QUBO over x in {0,1}^n: offset + sum h_i x_i + sum J_ij x_i x_j.
using Qubo = QuadraticModel<BinaryVartype>;
// Ising model over s in {-1,+1}^n: offset + sum h_i s_i + sum J_ij s_i s_j.
using IsingModel = QuadraticModel<SpinVartype>;

extern template class QuadraticModel<BinaryVartype>;
extern template class QuadraticModel<SpinVartype>;

// Rows of A x = b over binary variables.
struct LinearConstraintSet {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
};

struct ScaledIsing {
  IsingModel model;
  double scale = 1.0;
};

double qubo_energy(const Qubo& q, std::span<const std::uint8_t> x);
double ising_energy(const IsingModel& m, std::span<const std::int8_t> s);

Qubo ising_to_qubo(const IsingModel& m);
IsingModel qubo_to_ising(const Qubo& q);

SpinState to_spins(std::span<const std::uint8_t> x);
BitState to_bits(std::span<const std::int8_t> s);

// Returns objective + lambda * ||A x - b||^2 expanded into QUBO terms.
Qubo penalize_constraints(const Qubo& objective, const LinearConstraintSet& cons, double lambda);

// Divides every h and J (not the offset) by max(max|h|, max|J|, 1).
ScaledIsing scale_to_hardware_range(const IsingModel& m);

// max|J| / min nonzero |J|. Throws std::domain_error without nonzero couplings.
double dynamic_range(const IsingModel& m);

// Spin-reversal transform: h_i -> g_i h_i, J_ij -> g_i g_j J_ij for g in {-1,+1}^n.
// The transformed model evaluated at g*s has the energy of the original at s.
IsingModel apply_gauge(const IsingModel& m, std::span<const std::int8_t> gauge);

}  // namespace qalloc
