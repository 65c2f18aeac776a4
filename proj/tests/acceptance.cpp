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

// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qalloc/anneal.hpp"
#include "qalloc/hardware.hpp"
#include "qalloc/hybrid.hpp"
#include "qalloc/markowitz.hpp"
#include "qalloc/returns_csv.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace qalloc;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream note;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) note << "first failure: " << what << "; ";
    pass = pass && ok;
  }
};

bool close_rel(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::max(std::abs(a), std::abs(b))); }

std::span<const double> view(const Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

// 1: QUBO -> Ising -> QUBO keeps every state's energy.
void conversion_exactness(Outcome& out) {
  std::mt19937_64 rng(101);
  std::size_t states = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t n = 1 + rep % 14;
    const auto raw = testing::random_raw_model(n, rng);
    const Qubo q = testing::to_model<Qubo>(raw);
    const IsingModel m = qubo_to_ising(q);
    const Qubo back = ising_to_qubo(m);
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) {
      const auto xi = testing::bits_of(s, n);
      const BitState x(xi.begin(), xi.end());
      const double ref = testing::raw_energy(raw, xi);
      const double e_ising = ising_energy(m, to_spins(x));
      const double e_back = qubo_energy(back, x);
      ++states;
      if (!close_rel(e_ising, ref, 1e-12) || !close_rel(e_back, ref, 1e-12)) {
        out.require(false, "model " + std::to_string(rep) + " state " + std::to_string(s));
        return;
      }
    }
  }
  out.note << states << " states";
}

// 2: exactly feasible dyadic portfolios sit on the -2 floor.
void penalty_floor_check(Outcome& out) {
  std::mt19937_64 rng(202);
  double worst = 0.0;
  double min_gap = std::numeric_limits<double>::infinity();
  for (int rep = 0; rep < 100; ++rep) {
    const Eigen::Index n = 2 + rep % 5;
    const int k = 3 + rep % 4;
    const long levels = 1L << k;
    // integer levels, each at most 2^k - 1, summing to 2^k
    std::vector<long> m(static_cast<std::size_t>(n), 0);
    for (long unit = 0; unit < levels; ++unit) {
      std::size_t i;
      do i = static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(n));
      while (m[i] == levels - 1);
      ++m[i];
    }
    Eigen::VectorXd w(n), mu(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      w(i) = std::ldexp(static_cast<double>(m[static_cast<std::size_t>(i)]), -k);
      mu(i) = 0.0002 + 0.002 * uniform01(rng);
    }
    const Eigen::MatrixXd C = testing::random_covariance(n, rng, 1e-4);
    const MarkowitzProblem prob{mu, C, mu.dot(w)};
    const BinaryEncoding enc{k};
    const Qubo q = build_markowitz_qubo(prob, enc);
    BitState x = encode_weights(w, enc);
    out.require(decode_weights(x, enc, static_cast<std::size_t>(n)) == w, "encoding of a dyadic point");
    const double floor_gap = qubo_energy(q, x) - prob.lambda3 * w.dot(C * w);
    worst = std::max(worst, std::abs(floor_gap + 2.0));
    out.require(std::abs(floor_gap + 2.0) <= 1e-9, "feasible point off the floor");

    x[rng() % x.size()] ^= 1;
    const PortfolioWeights v = decode_weights(x, enc, static_cast<std::size_t>(n));
    const double gap = qubo_energy(q, x) - prob.lambda3 * v.dot(C * v) + 2.0;
    min_gap = std::min(min_gap, gap);
    out.require(gap > 0.0, "perturbed point not above the floor");
  }
  out.note << "max |E - var + 2| = " << worst << ", min perturbed excess = " << min_gap;
}

// 3: QUBO coefficients against term-by-term scalar evaluation.
void formulation_agreement(Outcome& out) {
  std::mt19937_64 rng(303);
  std::size_t states = 0;
  double worst = 0.0;
  for (Eigen::Index n = 1; n <= 3; ++n)
    for (int k = 1; k <= 4; ++k)
      for (int rep = 0; rep < 3; ++rep) {
        Eigen::VectorXd mu(n);
        for (auto& v : mu) v = 0.0002 + 0.002 * uniform01(rng);
        const MarkowitzProblem prob{mu, testing::random_covariance(n, rng, 1e-4), mu.mean(), std::nullopt,
                                    0.5 + uniform01(rng), 0.5 + uniform01(rng)};
        const Qubo q = build_markowitz_qubo(prob, BinaryEncoding{k});
        const std::size_t nv = static_cast<std::size_t>(n) * static_cast<std::size_t>(k);
        for (std::uint64_t s = 0; s < (std::uint64_t{1} << nv); ++s) {
          const auto xi = testing::bits_of(s, nv);
          const auto w = testing::decode_scalar(xi, static_cast<std::size_t>(n), k);
          const double ref = testing::markowitz_scalar(w, mu, prob.cov, prob.p, prob.resolved_lambda1(), prob.lambda2,
                                                       prob.lambda3);
          const double e = qubo_energy(q, BitState(xi.begin(), xi.end()));
          worst = std::max(worst, std::abs(e - ref) / std::max(1.0, std::abs(ref)));
          ++states;
        }
      }
  out.require(worst <= 1e-10, "scalar mismatch");
  out.note << states << " states, max rel err " << worst;
}

// 4: with q = lambda1 the two Lagrangians differ by the constant -lambda1 p.
void lagrangian_equivalence(Outcome& out) {
  std::mt19937_64 rng(404);
  const Eigen::Index n = 5;
  Eigen::VectorXd mu(n);
  for (auto& v : mu) v = 0.5 + uniform01(rng);
  const Eigen::MatrixXd C = testing::random_covariance(n, rng);
  const MarkowitzProblem prob{mu, C, 0.8};
  const double l1 = prob.resolved_lambda1();
  const AlternateProblem alt{mu, C, l1, prob.lambda2};
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int rep = 0; rep < 100; ++rep) {
    Eigen::VectorXd w(n);
    for (auto& v : w) v = uniform01(rng);
    const double d = lagrangian_difference(w, prob, alt);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  out.require(hi - lo < 1e-12, "spread");
  out.require(std::abs(lo + l1 * prob.p) < 1e-12, "constant differs from -lambda1 p");
  out.note << "spread " << hi - lo << ", value " << lo << " vs " << -l1 * prob.p;
}

// 5: best of 1000 annealing samples against exhaustive search on 30 variables.
void solver_quality(Outcome& out) {
  int on_par = 0, strict = 0;
  double worst = 1.0;
  for (std::uint64_t inst = 0; inst < 10; ++inst) {
    const auto win = testing::synthetic_market(6, 100, 1000 + inst);
    const Eigen::VectorXd mu = mean_returns(win);
    const MarkowitzProblem prob{mu, covariance(win), 0.5 * (mu.minCoeff() + mu.maxCoeff())};
    const Qubo q = build_markowitz_qubo(prob, BinaryEncoding{});
    const double exact = exact_solve(q).energy;
    SamplerConfig cfg;
    cfg.seed = inst;
    const auto ss = sample_with_gauges(qubo_to_ising(q), cfg, AnnealSchedule{});
    const double ratio = energy_ratio(ss.best().energy, exact);
    worst = std::min(worst, ratio);
    out.require(ratio >= 0.99, "instance " + std::to_string(inst) + " below 99%");
    // ratios counted as percentages rounded to two decimals
    if (std::round(ratio * 10000.0) >= 10000.0) ++on_par;
    if (ss.best().energy <= exact) ++strict;
  }
  out.require(on_par >= 5, "fewer than 5 instances at 100.00%");
  out.note << std::fixed << std::setprecision(4) << "worst ratio " << 100.0 * worst << "%, " << on_par
           << "/10 at 100.00%, " << strict << "/10 bit-exact ground state";
}

ReferenceRisk basket_reference(const ReturnsWindow& win) {
  const Eigen::VectorXd eq = Eigen::VectorXd::Constant(win.num_assets(), 1.0 / static_cast<double>(win.num_assets()));
  const Eigen::VectorXd basket = win.returns() * eq;
  const double s = sample_std(view(basket));
  return {s, s, tail_mean(view(basket), 0.05)};
}

// 6: hybrid loop convergence on 20 seeded six-asset windows.
void hybrid_convergence(Outcome& out) {
  int converged = 0;
  std::size_t most_iters = 0;
  const HybridConfig cfg;
  for (std::uint64_t t = 0; t < 20; ++t) {
    const auto win = testing::synthetic_market(6, 100, 5000 + t);
    const auto res = allocate(win, basket_reference(win), cfg);
    if (res.status == AllocationStatus::Converged) {
      ++converged;
      most_iters = std::max(most_iters, res.iterations);
      out.require(std::abs(res.trace.back().ratio - 1.0) <= cfg.epsilon, "converged outside the band");
      out.require(res.iterations <= 50, "more than 50 iterations");
    }
  }
  out.require(converged >= 18, "fewer than 90% converged");

  const auto win = testing::synthetic_market(6, 100, 5100);
  const auto infeasible = allocate(win, ReferenceRisk{1.0, 1.0, -10.0}, cfg);
  out.require(infeasible.status == AllocationStatus::InfeasibleReturn, "infeasible construction status");
  out.require(infeasible.weights.size() == 6 && infeasible.weights.isZero(0.0), "infeasible weights not zero");
  out.note << converged << "/20 converged, at most " << most_iters << " iterations; infeasible case returns "
           << to_string(infeasible.status);
}

// 7: discrete allocations against the continuous optimum, window by window.
void normalized_performance(Outcome& out) {
  testing::MarketShape shape;
  shape.index_column = true;
  shape.capm = true;
  shape.beta_lo = 0.5;
  shape.beta_hi = 1.6;
  BacktestSpec spec;
  spec.window = 100;
  spec.stride = 100;
  spec.reference_asset = "IDX";
  double worst_norm = std::numeric_limits<double>::infinity(), worst_sharpe = 0.0;
  int windows = 0;
  for (std::uint64_t s = 0; s < 3; ++s) {
    const auto data = testing::synthetic_market(6, 500, 9000 + s, shape);
    for (const auto& row : backtest(data, spec, HybridConfig{})) {
      ++windows;
      const std::string id = "seed " + std::to_string(s) + " window " + std::to_string(row.start);
      if (!row.normalized_return || !row.sharpe || !row.reference_sharpe) {
        out.require(false, id + " has no reference");
        continue;
      }
      worst_norm = std::min(worst_norm, *row.normalized_return);
      const double dev = std::abs(*row.sharpe / *row.reference_sharpe - 1.0);
      worst_sharpe = std::max(worst_sharpe, dev);
      out.require(*row.normalized_return >= 0.8, id + " normalized return below 80%");
      out.require(dev <= 0.2, id + " Sharpe off by more than 20%");
    }
  }
  out.note << windows << " windows, min normalized " << worst_norm << ", max Sharpe deviation " << worst_sharpe;
}

// 8: Gaussian shortfall multiplier against numeric integration.
void gaussian_constant(Outcome& out) {
  const double z = testing::normal_quantile_bisect(0.95);
  const double oracle = testing::normal_pdf(z) / 0.05;
  const double lib = gaussian_expected_shortfall(0.0, 1.0, RiskParams{0.05});
  out.require(std::abs(lib - 2.0627) <= 1e-3, "library constant");
  out.require(std::abs(oracle - 2.0627) <= 1e-3, "oracle constant");
  out.require(std::abs(lib - oracle) <= 1e-6, "library vs oracle");
  out.require(gaussian_expected_shortfall(0.0123, 0.0, RiskParams{}) == 0.0123, "sigma = 0");
  out.note << std::setprecision(8) << "library " << lib << ", oracle " << oracle;
}

// 9: embedding numbers.
void embedding_numbers(Outcome& out) {
  const auto c16 = build_chimera(16);
  const auto p16 = build_pegasus(16);
  std::ostringstream lens;
  for (auto [K, len] : {std::pair<std::size_t, std::size_t>{8, 3}, {16, 5}, {24, 7}}) {
    const auto emb = clique_embed_chimera(K, c16);
    const auto st = chain_stats(emb);
    out.require(validate_embedding(c16, emb, K).valid, "embedding invalid");
    out.require(st.min == len && st.max == len, "chain length for K=" + std::to_string(K));
    lens << st.max << " ";
  }
  out.require(c16.num_qubits() == 2048 && p16.num_qubits() == 5760, "qubit counts");
  out.require(clique_capacity(c16) == 64, "chimera capacity");
  out.require(clique_capacity(p16) == 180, "pegasus capacity");
  const auto k30 = clique_embed_chimera(30, c16);
  out.require(validate_embedding(c16, k30, 30).valid && chain_stats(k30).total_qubits == 270, "K=30 qubits");
  const std::vector<std::pair<std::size_t, std::pair<std::size_t, std::size_t>>> table{
      {8, {2, 2}}, {16, {2, 3}}, {24, {3, 4}}};
  for (const auto& [K, range] : table) {
    const auto r = pegasus_clique_chain_length(K);
    out.require(r.min == range.first && r.max == range.second && !r.estimated, "pegasus lookup");
  }
  out.note << "chain lengths " << lens.str() << "| capacities 64, 180 | K=30 uses " << chain_stats(k30).total_qubits;
}

// 10: 50-bin histogram of rescaled energies.
void histogram_contract(Outcome& out) {
  std::mt19937_64 rng(1010);
  const Qubo q = testing::to_model<Qubo>(testing::random_raw_model(16, rng));
  SamplerConfig cfg;
  cfg.num_samples = 2000;
  cfg.spin_reversal_transforms = 10;
  const auto ss = sample_with_gauges(qubo_to_ising(q), cfg, AnnealSchedule{20, 0.1, 1.0});
  const auto h = energy_histogram(ss);
  out.require(h.counts.size() == 50 && h.bin_low.size() == 50 && h.bin_high.size() == 50, "bin count");
  std::size_t total = 0;
  for (auto c : h.counts) total += c;
  out.require(total == ss.total_count() && total == 2000, "counts do not sum to the sample total");
  out.require(h.bin_low.front() == -1.0 && h.bin_high.back() == 1.0, "range is not (-1, 1)");
  for (std::size_t b = 0; b < 50; ++b) {
    out.require(std::abs(h.bin_high[b] - h.bin_low[b] - 0.04) < 1e-12, "unequal bins");
    if (b > 0) out.require(h.bin_low[b] == h.bin_high[b - 1], "bins not contiguous");
  }
  // recount independently
  std::vector<std::size_t> mine(50, 0);
  const double lo = ss.records().front().energy, hi = ss.records().back().energy;
  for (const auto& r : ss.records()) {
    const double scaled = -1.0 + 2.0 * (r.energy - lo) / (hi - lo);
    out.require(scaled >= -1.0 && scaled <= 1.0, "rescaled energy outside [-1, 1]");
    std::size_t b = 0;
    while (b + 1 < 50 && scaled >= h.bin_high[b]) ++b;
    mine[b] += r.count;
  }
  out.require(mine == h.counts, "independent recount differs");
  out.note << ss.records().size() << " distinct states in 50 bins, total " << total;
}

// 11: every CLI command twice at a fixed seed, byte-compared.
std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    files[entry.path().filename().string()] = ss.str();
  }
  return files;
}

void cli_determinism(Outcome& out) {
  const fs::path root = fs::temp_directory_path() / ("qalloc_accept_" + std::to_string(::getpid()));
  fs::remove_all(root);
  fs::create_directories(root / "in");
  write_returns(root / "in" / "r.csv", testing::synthetic_market(4, 80, 1111));
  {
    std::ofstream prices(root / "in" / "p.csv");
    prices << "date,X,Y\n2020-01-01,100,50\n2020-01-02,101,49.5\n2020-01-03,99.5,50.25\n2020-01-04,100.25,51\n";
  }
  const std::string in = (root / "in").string() + "/";
  const std::string hyb = " --k 3 --max-iters 5";
  const std::string sa = " --samples 40 --sweeps 200 --gauges 4";
  const std::vector<std::pair<std::string, std::vector<std::string>>> commands{
      {"ingest", {"ingest " + in + "r.csv --out ingest.csv", "ingest " + in + "p.csv --prices"}},
      {"build", {"build " + in + "r.csv --k 3 --p 0.0012 --out m.qubo",
                 "build " + in + "r.csv --k 3 --formulation alternate --q 2 --out a.qubo"}},
      {"solve", {"build " + in + "r.csv --k 3 --p 0.0012 --out m.qubo", "solve m.qubo --solver exact --out exact.json",
                 "solve m.qubo --solver sa" + sa + " --sigma-j 0.01 --out sa.json", "solve m.qubo --solver sa" + sa}},
      {"allocate", {"allocate " + in + "r.csv" + hyb + " --out alloc.json",
                    "allocate " + in + "r.csv" + hyb + " --solver sa" + sa + " --out alloc_sa.json"}},
      {"backtest", {"backtest " + in + "r.csv --window 40 --stride 20" + hyb + " --out bt.json",
                    "backtest " + in + "r.csv --window 40 --stride 40" + hyb + " --solver sa" + sa + " --format csv"}},
      {"embed", {"embed --topology chimera --size 4 --K 12 --defects 0.05 --trials 3 --edges edges.txt --out e.json",
                 "embed --topology pegasus --size 4 --K 16 --format csv"}},
      {"bench", {"bench " + in + "r.csv --window 40 --stride 40" + hyb + sa + " --out bench.csv"}},
  };
  std::size_t files_compared = 0;
  for (const auto& [name, steps] : commands) {
    std::map<std::string, std::string> runs[2];
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path work = root / "work";
      fs::remove_all(work);
      fs::create_directories(work);
      for (std::size_t i = 0; i < steps.size(); ++i) {
        const std::string cmd = "cd '" + work.string() + "' && '" + QALLOC_CLI + "' --seed 99 " + steps[i] +
                                " > stdout" + std::to_string(i) + ".txt 2> stderr" + std::to_string(i) + ".txt";
        const int status = std::system(cmd.c_str());
        const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        out.require(code == 0 || code == 2 || code == 3, name + " exited with " + std::to_string(code));
        runs[rep]["exit" + std::to_string(i)] = std::to_string(code);
      }
      for (auto& [file, bytes] : snapshot(work)) runs[rep][file] = std::move(bytes);
    }
    out.require(runs[0] == runs[1], name + " output differs between runs");
    files_compared += runs[0].size();
  }
  fs::remove_all(root);
  out.note << commands.size() << " commands, " << files_compared << " outputs byte-identical";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"conversion exactness", conversion_exactness},
      {"penalty floor", penalty_floor_check},
      {"QUBO vs scalar objective", formulation_agreement},
      {"Lagrangian equivalence", lagrangian_equivalence},
      {"solver quality", solver_quality},
      {"hybrid convergence", hybrid_convergence},
      {"normalized performance", normalized_performance},
      {"Gaussian ES constant", gaussian_constant},
      {"embedding numbers", embedding_numbers},
      {"histogram contract", histogram_contract},
      {"CLI determinism", cli_determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome out;
    const auto start = std::chrono::steady_clock::now();
    try {
      criteria[i].second(out);
    } catch (const std::exception& e) {
      out.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!out.pass) ++failures;
    std::cout << (out.pass ? "[PASS] " : "[FAIL] ") << std::setw(2) << i + 1 << " " << criteria[i].first << " ("
              << std::fixed << std::setprecision(1) << secs << " s) " << std::defaultfloat << out.note.str()
              << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
