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

#include "qalloc/hardware.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "qalloc/random.hpp"

namespace qalloc {

HardwareTopology::HardwareTopology(TopologyKind kind, int size, std::size_t qubits)
    : kind_(kind), size_(size), adjacency_(qubits), active_(qubits, true) {}

void HardwareTopology::add_edge(Qubit a, Qubit b) {
  if (a == b) throw std::logic_error("self-loop in topology");
  adjacency_[a].push_back(b);
  adjacency_[b].push_back(a);
}

void HardwareTopology::finalize() {
  for (auto& nb : adjacency_) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
}

HardwareTopology build_chimera(int M) {
  if (M < 1) throw std::invalid_argument("chimera size must be >= 1");
  const auto n = static_cast<std::size_t>(8) * M * M;
  HardwareTopology t(TopologyKind::Chimera, M, n);
  for (int i = 0; i < M; ++i) {
    for (int j = 0; j < M; ++j) {
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) t.add_edge(t.chimera_qubit(i, j, 0, a), t.chimera_qubit(i, j, 1, b));
      for (int k = 0; k < 4; ++k) {
        if (i + 1 < M) t.add_edge(t.chimera_qubit(i, j, 0, k), t.chimera_qubit(i + 1, j, 0, k));
        if (j + 1 < M) t.add_edge(t.chimera_qubit(i, j, 1, k), t.chimera_qubit(i, j + 1, 1, k));
      }
    }
  }
  t.finalize();
  return t;
}

HardwareTopology build_pegasus(int P) {
  if (P < 2) throw std::invalid_argument("pegasus size must be >= 2");
  static constexpr std::array<int, 12> off0{2, 2, 2, 2, 10, 10, 10, 10, 6, 6, 6, 6};
  static constexpr std::array<int, 12> off1{6, 6, 6, 6, 2, 2, 2, 2, 10, 10, 10, 10};
  const int m1 = P - 1;
  const auto n = static_cast<std::size_t>(24) * P * m1;
  HardwareTopology t(TopologyKind::Pegasus, P, n);
  auto q = [&](int u, int w, int k, int z) {
    return static_cast<Qubit>(((u * P + w) * 12 + k) * m1 + z);
  };
  for (int u = 0; u < 2; ++u)
    for (int w = 0; w < P; ++w)
      for (int k = 0; k < 12; ++k)
        for (int z = 0; z < m1; ++z) {
          if (z + 1 < m1) t.add_edge(q(u, w, k, z), q(u, w, k, z + 1));
          if (k % 2 == 0) t.add_edge(q(u, w, k, z), q(u, w, k + 1, z));
        }
  for (int w = 0; w < P; ++w)
    for (int kk = 0; kk < 12; ++kk) {
      const int k_lo = w ? 0 : off1[kk];
      const int k_hi = w < m1 ? 12 : off1[kk];
      for (int k = k_lo; k < k_hi; ++k)
        for (int z = 0; z < m1; ++z)
          t.add_edge(q(0, w, k, z), q(1, z + (kk < off0[k] ? 1 : 0), kk, w - (k < off1[kk] ? 1 : 0)));
    }
  t.finalize();
  return t;
}

Qubit HardwareTopology::chimera_qubit(int row, int col, int shore, int k) const {
  if (kind_ != TopologyKind::Chimera) throw std::logic_error("chimera_qubit on non-chimera topology");
  if (row < 0 || row >= size_ || col < 0 || col >= size_ || shore < 0 || shore > 1 || k < 0 || k > 3) {
    throw std::out_of_range("chimera coordinate outside the lattice");
  }
  return static_cast<Qubit>(((row * size_ + col) * 2 + shore) * 4 + k);
}

std::size_t HardwareTopology::num_active() const {
  return static_cast<std::size_t>(std::count(active_.begin(), active_.end(), true));
}

std::size_t HardwareTopology::num_edges() const {
  std::size_t d = 0;
  for (const auto& nb : adjacency_) d += nb.size();
  return d / 2;
}

std::size_t HardwareTopology::max_degree() const {
  std::size_t d = 0;
  for (const auto& nb : adjacency_) d = std::max(d, nb.size());
  return d;
}

bool HardwareTopology::has_edge(Qubit a, Qubit b) const {
  if (a >= adjacency_.size() || b >= adjacency_.size()) return false;
  const auto& nb = adjacency_[a];
  return std::binary_search(nb.begin(), nb.end(), b);
}

std::vector<std::pair<Qubit, Qubit>> HardwareTopology::edges() const {
  std::vector<std::pair<Qubit, Qubit>> out;
  out.reserve(num_edges());
  for (Qubit a = 0; a < adjacency_.size(); ++a)
    for (Qubit b : adjacency_[a])
      if (a < b) out.emplace_back(a, b);
  return out;
}

std::string HardwareTopology::name() const {
  return (kind_ == TopologyKind::Chimera ? "chimera(" : "pegasus(") + std::to_string(size_) + ")";
}

HardwareTopology HardwareTopology::with_defects(double fraction, std::uint64_t seed) const {
  if (!(fraction >= 0.0 && fraction < 1.0)) throw std::invalid_argument("defect fraction must lie in [0, 1)");
  HardwareTopology out = *this;
  const std::size_t n = num_qubits();
  const auto remove = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  std::vector<Qubit> order(n);
  std::iota(order.begin(), order.end(), Qubit{0});
  std::mt19937_64 rng(seed);
  // partial Fisher-Yates; the first `remove` entries are the casualties
  for (std::size_t i = 0; i < remove; ++i) {
    auto j = i + static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n - i));
    j = std::min(j, n - 1);
    std::swap(order[i], order[j]);
    const Qubit dead = order[i];
    out.active_[dead] = false;
    for (Qubit nb : out.adjacency_[dead]) {
      auto& list = out.adjacency_[nb];
      list.erase(std::lower_bound(list.begin(), list.end(), dead));
    }
    out.adjacency_[dead].clear();
  }
  return out;
}

std::string Embedding::to_json() const {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (std::size_t v = 0; v < chains.size(); ++v) j[std::to_string(v)] = chains[v];
  return j.dump();
}

Embedding Embedding::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (!j.is_object()) throw std::runtime_error("embedding JSON must be an object");
  std::map<std::size_t, std::vector<Qubit>> by_var;
  for (const auto& [key, val] : j.items()) {
    std::size_t pos = 0;
    const unsigned long v = std::stoul(key, &pos);
    if (pos != key.size()) throw std::runtime_error("bad embedding key: " + key);
    by_var[v] = val.get<std::vector<Qubit>>();
  }
  Embedding e;
  e.chains.resize(by_var.empty() ? 0 : by_var.rbegin()->first + 1);
  for (auto& [v, chain] : by_var) e.chains[v] = std::move(chain);
  return e;
}

namespace {

// Triangle layout in an L x L block of chimera cells. Group g owns
// horizontal lanes in row g (cols 0..g) and vertical lanes in column g
// (rows g..L-1); the two halves meet inside cell (g, g). Any two groups
// g < h cross in cell (h, g).
struct Layout {
  int M, L, r0, c0, sym;

  Qubit qubit(const HardwareTopology& t, int r, int c, int shore, int k) const {
    if (sym & 1) r = L - 1 - r;
    if (sym & 2) c = L - 1 - c;
    if (sym & 4) {
      std::swap(r, c);
      shore = 1 - shore;
    }
    return t.chimera_qubit(r0 + r, c0 + c, shore, k);
  }

  std::vector<std::pair<int, int>> lanes(const HardwareTopology& t, int g) const {
    std::vector<int> h, v;
    for (int a = 0; a < 4; ++a) {
      bool ok = true;
      for (int c = 0; c <= g && ok; ++c) ok = t.active(qubit(t, g, c, 1, a));
      if (ok) h.push_back(a);
      ok = true;
      for (int r = g; r < L && ok; ++r) ok = t.active(qubit(t, r, g, 0, a));
      if (ok) v.push_back(a);
    }
    std::vector<std::pair<int, int>> out;
    for (std::size_t i = 0; i < std::min(h.size(), v.size()); ++i) out.emplace_back(h[i], v[i]);
    return out;
  }

  std::size_t capacity(const HardwareTopology& t) const {
    std::size_t cap = 0;
    for (int g = 0; g < L; ++g) cap += lanes(t, g).size();
    return cap;
  }

  Embedding embed(const HardwareTopology& t, std::size_t K) const {
    Embedding e;
    for (int g = 0; g < L && e.chains.size() < K; ++g) {
      for (auto [a, b] : lanes(t, g)) {
        if (e.chains.size() == K) break;
        std::vector<Qubit> chain;
        for (int c = 0; c <= g; ++c) chain.push_back(qubit(t, g, c, 1, a));
        for (int r = g; r < L; ++r) chain.push_back(qubit(t, r, g, 0, b));
        e.chains.push_back(std::move(chain));
      }
    }
    return e;
  }
};

template <class Fn>
void for_each_layout(int M, int L, Fn&& fn) {
  for (int sym = 0; sym < 8; ++sym)
    for (int r0 = 0; r0 + L <= M; ++r0)
      for (int c0 = 0; c0 + L <= M; ++c0)
        if (fn(Layout{M, L, r0, c0, sym})) return;
}

void require_chimera(const HardwareTopology& t) {
  if (t.kind() != TopologyKind::Chimera) throw std::invalid_argument("clique embedding is implemented for chimera only");
}

std::size_t full_capacity(const HardwareTopology& t) {
  return t.kind() == TopologyKind::Chimera ? 4 * static_cast<std::size_t>(t.size())
                                           : 12 * static_cast<std::size_t>(t.size() - 1);
}

}  // namespace

Embedding clique_embed_chimera(std::size_t K, const HardwareTopology& topo) {
  require_chimera(topo);
  const int M = topo.size();
  if (K == 0) return {};
  if (K > full_capacity(topo))
    throw std::invalid_argument("K = " + std::to_string(K) + " exceeds clique capacity " +
                                std::to_string(full_capacity(topo)) + " of " + topo.name());
  for (int L = static_cast<int>((K + 3) / 4); L <= M; ++L) {
    std::optional<Embedding> found;
    for_each_layout(M, L, [&](const Layout& lay) {
      if (lay.capacity(topo) < K) return false;
      found = lay.embed(topo, K);
      return true;
    });
    if (found) return *found;
  }
  throw std::invalid_argument("no clique embedding of K = " + std::to_string(K) + " on defective " + topo.name());
}

ValidationReport validate_embedding(const HardwareTopology& topo, const Embedding& emb, std::size_t K) {
  ValidationReport rep;
  auto fail = [&](std::string msg) {
    rep.valid = false;
    rep.diagnostics.push_back(std::move(msg));
  };
  if (emb.chains.size() != K)
    fail("expected " + std::to_string(K) + " chains, got " + std::to_string(emb.chains.size()));

  constexpr auto kFree = static_cast<std::size_t>(-1);
  std::vector<std::size_t> owner(topo.num_qubits(), kFree);
  for (std::size_t v = 0; v < emb.chains.size(); ++v) {
    const auto& chain = emb.chains[v];
    if (chain.empty()) fail("empty chain " + std::to_string(v));
    for (Qubit q : chain) {
      if (q >= topo.num_qubits()) {
        fail("chain " + std::to_string(v) + ": qubit " + std::to_string(q) + " not in topology");
        continue;
      }
      if (!topo.active(q)) fail("chain " + std::to_string(v) + ": qubit " + std::to_string(q) + " is inactive");
      if (owner[q] == v) {
        fail("chain " + std::to_string(v) + ": duplicate qubit " + std::to_string(q));
      } else if (owner[q] != kFree) {
        fail("overlap: qubit " + std::to_string(q) + " in chains " + std::to_string(owner[q]) + " and " +
             std::to_string(v));
      } else {
        owner[q] = v;
      }
    }
  }

  for (std::size_t v = 0; v < emb.chains.size(); ++v) {
    std::vector<Qubit> mine;
    for (Qubit q : emb.chains[v])
      if (q < owner.size() && owner[q] == v) mine.push_back(q);
    if (mine.empty()) continue;
    std::vector<Qubit> stack{mine.front()}, seen{mine.front()};
    std::vector<bool> visited(topo.num_qubits(), false);
    visited[mine.front()] = true;
    while (!stack.empty()) {
      const Qubit q = stack.back();
      stack.pop_back();
      for (Qubit nb : topo.neighbors(q))
        if (!visited[nb] && owner[nb] == v) {
          visited[nb] = true;
          stack.push_back(nb);
          seen.push_back(nb);
        }
    }
    if (seen.size() != mine.size())
      fail("disconnected chain " + std::to_string(v) + ": " + std::to_string(seen.size()) + " of " +
           std::to_string(mine.size()) + " qubits reachable");
  }

  const std::size_t n = std::min(K, emb.chains.size());
  std::vector<bool> covered(n * n, false);
  for (std::size_t v = 0; v < n; ++v)
    for (Qubit q : emb.chains[v]) {
      if (q >= owner.size() || owner[q] != v) continue;
      for (Qubit nb : topo.neighbors(q)) {
        const std::size_t w = owner[nb];
        if (w != kFree && w != v && w < n) covered[v * n + w] = covered[w * n + v] = true;
      }
    }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (!covered[a * n + b]) fail("missing edge (" + std::to_string(a) + ", " + std::to_string(b) + ")");
  return rep;
}

std::size_t clique_capacity(const HardwareTopology& topo) {
  if (topo.kind() == TopologyKind::Pegasus || topo.num_active() == topo.num_qubits()) return full_capacity(topo);
  std::size_t best = 0;
  for (int L = 1; L <= topo.size(); ++L)
    for_each_layout(topo.size(), L, [&](const Layout& lay) {
      best = std::max(best, std::min(lay.capacity(topo), static_cast<std::size_t>(4 * L)));
      return false;
    });
  return best;
}

CapacityReport clique_capacity(const HardwareTopology& topo, double defect_fraction, std::uint64_t seed,
                               std::size_t trials) {
  if (trials == 0) throw std::invalid_argument("trials must be >= 1");
  CapacityReport rep;
  rep.full_yield = full_capacity(topo);
  if (topo.kind() == TopologyKind::Pegasus) {
    if (!(defect_fraction >= 0.0 && defect_fraction < 1.0))
      throw std::invalid_argument("defect fraction must lie in [0, 1)");
    // every chain of the full-size clique must survive intact
    const auto chain = pegasus_clique_chain_length(rep.full_yield).max;
    const double survive = std::pow(1.0 - defect_fraction, static_cast<double>(chain));
    rep.min = rep.max = static_cast<std::size_t>(std::floor(static_cast<double>(rep.full_yield) * survive));
    rep.estimated = true;
    return rep;
  }
  rep.min = rep.full_yield;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto damaged = topo.with_defects(defect_fraction, derive_seed(seed, t));
    const std::size_t cap = clique_capacity(damaged);
    if (cap > 0 && !validate_embedding(damaged, clique_embed_chimera(cap, damaged), cap).valid)
      throw std::logic_error("defect capacity embedding failed validation");
    rep.min = std::min(rep.min, cap);
    rep.max = std::max(rep.max, cap);
  }
  return rep;
}

ChainLengthRange pegasus_clique_chain_length(std::size_t K) {
  if (K == 0 || K > 180) throw std::invalid_argument("pegasus clique size must lie in 1..180");
  switch (K) {
    case 8: return {2, 2, false};
    case 16: return {2, 3, false};
    case 24: return {3, 4, false};
    default: break;
  }
  const std::size_t len = (K + 11) / 12 + 1;
  return {len, len, true};
}

ChainStats chain_stats(const Embedding& emb) {
  if (emb.chains.empty()) throw std::invalid_argument("chain_stats of an empty embedding");
  ChainStats s;
  s.min = emb.chains.front().size();
  for (const auto& c : emb.chains) {
    s.min = std::min(s.min, c.size());
    s.max = std::max(s.max, c.size());
    s.total_qubits += c.size();
  }
  s.mean = static_cast<double>(s.total_qubits) / static_cast<double>(emb.chains.size());
  return s;
}

void write_edge_list(std::ostream& out, const HardwareTopology& topo) {
  for (auto [a, b] : topo.edges()) out << a << ' ' << b << '\n';
}

}  // namespace qalloc
