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
#include <utility>
#include <vector>

namespace qalloc {

using Qubit = std::uint32_t;

enum class TopologyKind { Chimera, Pegasus };

// Annealer hardware graph. Qubit ids follow the usual linear indexing:
//   chimera: ((row * M + col) * 2 + shore) * 4 + k, shore 0 vertical, 1 horizontal
//   pegasus: u * 12 * P * (P - 1) + w * 12 * (P - 1) + k * (P - 1) + z
// Defective qubits keep their ids but lose all couplers.
class HardwareTopology {
 public:
  TopologyKind kind() const { return kind_; }
  int size() const { return size_; }
  std::size_t num_qubits() const { return adjacency_.size(); }
  std::size_t num_active() const;
  std::size_t num_edges() const;
  std::size_t max_degree() const;
  bool active(Qubit q) const { return q < active_.size() && active_[q]; }
  bool has_edge(Qubit a, Qubit b) const;
  const std::vector<Qubit>& neighbors(Qubit q) const { return adjacency_.at(q); }
  std::vector<std::pair<Qubit, Qubit>> edges() const;
  std::string name() const;

  // Chimera only.
  Qubit chimera_qubit(int row, int col, int shore, int k) const;

  // Copy with round(fraction * num_qubits) uniformly chosen qubits removed.
  HardwareTopology with_defects(double fraction, std::uint64_t seed) const;

 private:
  friend HardwareTopology build_chimera(int M);
  friend HardwareTopology build_pegasus(int P);

  HardwareTopology(TopologyKind kind, int size, std::size_t qubits);
  void add_edge(Qubit a, Qubit b);
  void finalize();

  TopologyKind kind_;
  int size_;
  std::vector<std::vector<Qubit>> adjacency_;
  std::vector<bool> active_;
};

// 8M^2 qubits. Throws std::invalid_argument for M < 1.
HardwareTopology build_chimera(int M);
// 24P(P - 1) qubits, no fabric trimming. Throws std::invalid_argument for P < 2.
HardwareTopology build_pegasus(int P);

// chains[v] = physical qubits representing logical variable v.
struct Embedding {
  std::vector<std::vector<Qubit>> chains;

  // {"0": [q, ...], "1": [...], ...}
  std::string to_json() const;
  static Embedding from_json(const std::string& text);
};

struct ValidationReport {
  bool valid = true;
  std::vector<std::string> diagnostics;
};

struct ChainStats {
  std::size_t min = 0;
  std::size_t max = 0;
  double mean = 0.0;
  std::size_t total_qubits = 0;
};

struct ChainLengthRange {
  std::size_t min = 0;
  std::size_t max = 0;
  bool estimated = false;
};

struct CapacityReport {
  std::size_t full_yield = 0;
  std::size_t min = 0;
  std::size_t max = 0;
  bool estimated = false;
};

// Triangle clique embedding of K_K on Chimera with uniform chain length
// L + 1, L = ceil(K / 4) on a full-yield graph. On defective graphs the
// placement and lane choice are searched and L may grow.
// Throws std::invalid_argument when no placement exists.
Embedding clique_embed_chimera(std::size_t K, const HardwareTopology& topo);

// Checks chains are nonempty, on active qubits, disjoint, connected, and
// that every pair of the K logical variables shares a physical coupler.
ValidationReport validate_embedding(const HardwareTopology& topo, const Embedding& emb, std::size_t K);

// Largest clique with a native embedding: 4M on chimera(M), 12(P - 1) on
// pegasus(P). Defective chimera graphs are searched constructively.
std::size_t clique_capacity(const HardwareTopology& topo);

// Capacity over `trials` seeded defect draws. Chimera is re-embedded and
// validated per draw; Pegasus is a chain-survival estimate.
CapacityReport clique_capacity(const HardwareTopology& topo, double defect_fraction, std::uint64_t seed,
                               std::size_t trials = 10);

// Pegasus clique chain lengths: measured values for K = 8, 16, 24;
// ceil(K / 12) + 1 (flagged estimated) otherwise. K must lie in 1..180.
ChainLengthRange pegasus_clique_chain_length(std::size_t K);

ChainStats chain_stats(const Embedding& emb);

// One "u v" line per coupler, u < v, ascending.
void write_edge_list(std::ostream& out, const HardwareTopology& topo);

}  // namespace qalloc
