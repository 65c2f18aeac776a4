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

// qalloc: command-line front end.
//
// Exit codes: 0 ok / converged, 2 infeasible-return, 3 iteration-cap,
// 64 usage error, 1 any other failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qalloc/anneal.hpp"
#include "qalloc/hardware.hpp"
#include "qalloc/hybrid.hpp"
#include "qalloc/markowitz.hpp"
#include "qalloc/qubo_io.hpp"
#include "qalloc/returns_csv.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace qalloc;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kInfeasible = 2;
constexpr int kIterationCap = 3;
constexpr int kUsage = 64;

struct Globals {
  std::uint64_t seed = kDefaultSeed;
  std::string out;
  std::string format = "json";
};

struct SamplerOptions {
  std::size_t samples = 1000;
  std::size_t sweeps = 1000;
  double beta_start = 0.1;
  double beta_end = 10.0;
  bool auto_beta = false;
  std::size_t gauges = 100;
  double sigma_h = 0.0;
  double sigma_j = 0.0;
  unsigned threads = 0;

  SamplerConfig config(std::uint64_t seed) const {
    SamplerConfig cfg;
    cfg.num_samples = samples;
    cfg.seed = seed;
    cfg.spin_reversal_transforms = gauges;
    cfg.threads = threads;
    if (sigma_h > 0.0 || sigma_j > 0.0) cfg.noise = NoiseModel{sigma_h, sigma_j};
    cfg.validate();
    return cfg;
  }
  AnnealSchedule schedule(const Qubo& q) const {
    if (auto_beta) return AnnealSchedule::for_model(q, sweeps);
    AnnealSchedule s{sweeps, beta_start, beta_end};
    s.validate();
    return s;
  }
  std::optional<AnnealSchedule> fixed_schedule() const {
    if (auto_beta) return std::nullopt;
    return AnnealSchedule{sweeps, beta_start, beta_end};
  }
};

struct HybridOptions {
  std::string reference;
  Eigen::Index crisis_start = 0;
  Eigen::Index crisis_length = 0;
  double alpha = 0.05;
  double epsilon = 0.05;
  double delta0 = 0.05;
  double delta_min = 0.05 / 64.0;
  std::size_t max_iters = 50;
  std::string solver = "exact";
  int k = 5;
  double lambda2 = 1.0;
  double lambda3 = 1.0;
  bool prices = false;

  HybridConfig config(const SamplerOptions& so, std::uint64_t seed) const {
    HybridConfig cfg;
    cfg.risk.alpha = alpha;
    cfg.epsilon = epsilon;
    cfg.delta0 = delta0;
    cfg.delta_min = delta_min;
    cfg.max_iters = max_iters;
    cfg.solver = solver == "sa" ? InnerSolver::SimulatedAnnealing : InnerSolver::Exact;
    cfg.encoding.k = k;
    cfg.lambda2 = lambda2;
    cfg.lambda3 = lambda3;
    cfg.sampler = so.config(seed);
    cfg.schedule = so.fixed_schedule();
    cfg.validate();
    return cfg;
  }
};

void add_sampler_options(CLI::App* cmd, SamplerOptions& so) {
  cmd->add_option("--samples", so.samples, "Annealing samples")->capture_default_str();
  cmd->add_option("--sweeps", so.sweeps, "Sweeps per sample")->capture_default_str();
  cmd->add_option("--beta-start", so.beta_start, "Hot inverse temperature")->capture_default_str();
  cmd->add_option("--beta-end", so.beta_end, "Cold inverse temperature")->capture_default_str();
  cmd->add_flag("--auto-beta", so.auto_beta, "Scale the beta ladder to the model coefficients");
  cmd->add_option("--gauges", so.gauges, "Spin-reversal transforms (0 = plain annealing)")->capture_default_str();
  cmd->add_option("--sigma-h", so.sigma_h, "ICE noise std on scaled fields")->capture_default_str();
  cmd->add_option("--sigma-j", so.sigma_j, "ICE noise std on scaled couplings")->capture_default_str();
  cmd->add_option("--threads", so.threads, "Worker threads (0 = all cores)")->capture_default_str();
}

void add_hybrid_options(CLI::App* cmd, HybridOptions& ho) {
  cmd->add_option("--reference", ho.reference, "Reference asset id (default: first column)");
  cmd->add_option("--crisis-start", ho.crisis_start, "First row of the crisis window")->capture_default_str();
  cmd->add_option("--crisis-length", ho.crisis_length, "Crisis window rows (0 = current window)")
      ->capture_default_str();
  cmd->add_option("--alpha", ho.alpha, "Shortfall tail fraction")->capture_default_str();
  cmd->add_option("--epsilon", ho.epsilon, "Acceptance band half-width")->capture_default_str();
  cmd->add_option("--delta0", ho.delta0, "Initial momentum")->capture_default_str();
  cmd->add_option("--delta-min", ho.delta_min, "Momentum floor")->capture_default_str();
  cmd->add_option("--max-iters", ho.max_iters, "Iteration cap")->capture_default_str();
  cmd->add_option("--solver", ho.solver, "Inner solver")->check(CLI::IsMember({"exact", "sa"}))->capture_default_str();
  cmd->add_option("--k", ho.k, "Bits per weight")->capture_default_str();
  cmd->add_option("--lambda2", ho.lambda2, "Budget penalty")->capture_default_str();
  cmd->add_option("--lambda3", ho.lambda3, "Variance weight")->capture_default_str();
  cmd->add_flag("--prices", ho.prices, "Input holds prices, not returns");
}

// "dir/name.json" + ".hist.csv" -> "dir/name.hist.csv"
fs::path sibling(const std::string& out, const std::string& suffix) {
  fs::path p(out);
  return p.parent_path() / (p.stem().string() + suffix);
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  return f;
}

void emit(const Globals& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    return;
  }
  auto f = open_out(g.out);
  f << text;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string csv_line(const std::vector<std::string>& cells) {
  std::string s;
  for (std::size_t i = 0; i < cells.size(); ++i) s += (i ? "," : "") + cells[i];
  return s + "\n";
}

int status_code(AllocationStatus s) {
  switch (s) {
    case AllocationStatus::Converged: return kOk;
    case AllocationStatus::InfeasibleReturn: return kInfeasible;
    case AllocationStatus::IterationCap: return kIterationCap;
  }
  return kFailure;
}

// ---- ingest ----

struct IngestArgs {
  std::string input;
  bool prices = false;
};

int run_ingest(const Globals& g, const IngestArgs& a) {
  const auto win = load_returns(fs::path(a.input), ReturnsCsvOptions{a.prices});
  std::ostringstream os;
  write_returns(os, win);
  emit(g, os.str());
  return kOk;
}

// ---- build ----

struct BuildArgs {
  std::string input;
  bool prices = false;
  std::string formulation = "markowitz";
  std::optional<double> p, q, lambda1;
  double lambda2 = 1.0;
  double lambda3 = 1.0;
  int k = 5;
};

int run_build(const Globals& g, const BuildArgs& a) {
  if (g.out.empty()) throw CLI::ValidationError("build", "--out is required (path of the .qubo file)");
  const auto win = load_returns(fs::path(a.input), ReturnsCsvOptions{a.prices});
  const BinaryEncoding enc{a.k};
  enc.validate();
  QuboManifest man;
  man.formulation = a.formulation;
  man.num_assets = static_cast<std::size_t>(win.num_assets());
  man.k = a.k;
  man.assets = win.assets();
  Qubo q;
  if (a.formulation == "markowitz") {
    if (!a.p) throw CLI::ValidationError("build", "--p is required for the markowitz formulation");
    MarkowitzProblem prob{mean_returns(win), covariance(win), *a.p, a.lambda1, a.lambda2, a.lambda3};
    q = build_markowitz_qubo(prob, enc);
    man.p = *a.p;
    man.lambda1 = prob.resolved_lambda1();
    man.lambda2 = a.lambda2;
    man.lambda3 = a.lambda3;
    man.penalty_floor = penalty_floor(prob);
  } else {
    if (!a.q) throw CLI::ValidationError("build", "--q is required for the alternate formulation");
    AlternateProblem prob{mean_returns(win), covariance(win), *a.q, a.lambda2};
    q = build_alternate_qubo(prob, enc);
    man.q = *a.q;
    man.lambda1 = 0.0;
    man.lambda2 = a.lambda2;
    man.lambda3 = 1.0;
    man.penalty_floor = -a.lambda2;
  }
  write_qubo(fs::path(g.out), q);
  auto mf = open_out(sibling(g.out, ".manifest.json"));
  mf << man.to_json() << '\n';
  return kOk;
}

// ---- solve ----

struct SolveArgs {
  std::string input;
  std::string solver = "exact";
  std::string manifest;
  SamplerOptions sampler;
};

int run_solve(const Globals& g, const SolveArgs& a) {
  const Qubo q = read_qubo(fs::path(a.input));
  std::optional<QuboManifest> man;
  fs::path man_path = a.manifest.empty() ? sibling(a.input, ".manifest.json") : fs::path(a.manifest);
  if (!a.manifest.empty() || fs::exists(man_path)) {
    std::ifstream f(man_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read manifest " + man_path.string());
    std::stringstream ss;
    ss << f.rdbuf();
    man = QuboManifest::from_json(ss.str());
    if (man->num_variables() != q.num_variables())
      throw std::runtime_error("manifest describes " + std::to_string(man->num_variables()) +
                               " variables, qubo has " + std::to_string(q.num_variables()));
  }

  SampleSet samples;
  if (a.solver == "exact") {
    auto sol = exact_solve(q);
    samples = SampleSet({SampleRecord{sol.state, sol.energy, 1}});
  } else {
    const SamplerConfig cfg = a.sampler.config(g.seed);
    const AnnealSchedule sched = a.sampler.schedule(q);
    samples = cfg.spin_reversal_transforms >= 1 ? sample_with_gauges(qubo_to_ising(q), cfg, sched)
                                                 : simulated_anneal(q, sched, cfg);
  }
  const SampleRecord& best = samples.best();

  json j;
  j["solver"] = a.solver;
  j["num_variables"] = q.num_variables();
  if (a.solver == "sa") j["seed"] = g.seed;
  j["num_samples"] = samples.total_count();
  j["distinct_states"] = samples.records().size();
  j["best_state"] = bitstring(best.state);
  j["energy"] = best.energy;
  std::optional<PortfolioWeights> w;
  if (man) {
    w = decode_weights(best.state, BinaryEncoding{man->k}, man->num_assets);
    j["formulation"] = man->formulation;
    j["penalty_floor"] = man->penalty_floor;
    j["energy_above_floor"] = best.energy - man->penalty_floor;
    json wj = json::object();
    for (std::size_t i = 0; i < man->assets.size(); ++i) wj[man->assets[i]] = (*w)(static_cast<Eigen::Index>(i));
    j["weights"] = wj;
    j["weight_sum"] = w->sum();
  }

  if (g.format == "csv") {
    std::string text = csv_line({"solver", "num_variables", "num_samples", "best_state", "energy", "penalty_floor"});
    text += csv_line({a.solver, std::to_string(q.num_variables()), std::to_string(samples.total_count()),
                      bitstring(best.state), fmt(best.energy), man ? fmt(man->penalty_floor) : ""});
    emit(g, text);
  } else {
    emit(g, j.dump(2) + "\n");
  }
  if (!g.out.empty()) {
    auto hf = open_out(sibling(g.out, ".hist.csv"));
    write_histogram_csv(hf, energy_histogram(samples));
    auto sf = open_out(sibling(g.out, ".samples.csv"));
    write_samples_csv(sf, samples);
  }
  return kOk;
}

// ---- allocate / backtest ----

struct AllocateArgs {
  std::string input;
  HybridOptions hybrid;
  SamplerOptions sampler;
};

int run_allocate(const Globals& g, const AllocateArgs& a) {
  const auto data = load_returns(fs::path(a.input), ReturnsCsvOptions{a.hybrid.prices});
  const HybridConfig cfg = a.hybrid.config(a.sampler, g.seed);
  BacktestSpec spec;
  spec.window = data.periods();
  spec.reference_asset = a.hybrid.reference;
  spec.crisis_start = a.hybrid.crisis_start;
  spec.crisis_length = a.hybrid.crisis_length;
  spec.validate(data);
  const AllocationResult res = allocate(data, reference_risk(data, data, spec, cfg.risk), cfg);

  if (g.format == "csv") {
    std::string text = csv_line({"asset", "weight"});
    for (Eigen::Index i = 0; i < data.num_assets(); ++i)
      text += csv_line({data.assets()[static_cast<std::size_t>(i)], fmt(res.weights(i))});
    emit(g, text);
  } else {
    emit(g, allocation_json(data, res) + "\n");
  }
  if (!g.out.empty()) {
    auto tf = open_out(sibling(g.out, ".trace.csv"));
    write_trace_csv(tf, res);
  }
  return status_code(res.status);
}

struct BacktestArgs {
  std::string input;
  Eigen::Index window = 100;
  Eigen::Index stride = 100;
  HybridOptions hybrid;
  SamplerOptions sampler;
};

BacktestSpec make_spec(const BacktestArgs& a) {
  BacktestSpec spec;
  spec.window = a.window;
  spec.stride = a.stride;
  spec.reference_asset = a.hybrid.reference;
  spec.crisis_start = a.hybrid.crisis_start;
  spec.crisis_length = a.hybrid.crisis_length;
  return spec;
}

int worst_status(const std::vector<BacktestRow>& rows) {
  int code = kOk;
  for (const auto& r : rows) {
    const int c = status_code(r.allocation.status);
    if (c == kInfeasible) return kInfeasible;
    if (c == kIterationCap) code = kIterationCap;
  }
  return code;
}

int run_backtest(const Globals& g, const BacktestArgs& a) {
  const auto data = load_returns(fs::path(a.input), ReturnsCsvOptions{a.hybrid.prices});
  const HybridConfig cfg = a.hybrid.config(a.sampler, g.seed);
  const auto rows = backtest(data, make_spec(a), cfg);

  if (g.format == "csv") {
    std::string text = csv_line({"window", "start_date", "end_date", "status", "iterations", "final_return", "sharpe",
                                 "reference_return", "reference_sharpe", "normalized_return", "avg_abs_corr"});
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      text += csv_line({std::to_string(i), r.start_date, r.end_date, to_string(r.allocation.status),
                        std::to_string(r.allocation.iterations), fmt(r.final_return), fmt(r.sharpe),
                        fmt(r.reference_return), fmt(r.reference_sharpe), fmt(r.normalized_return),
                        fmt(r.avg_abs_corr)});
    }
    emit(g, text);
  } else {
    emit(g, backtest_json(data, rows) + "\n");
  }
  if (!g.out.empty()) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      auto tf = open_out(sibling(g.out, ".w" + std::to_string(i) + ".trace.csv"));
      write_trace_csv(tf, rows[i].allocation);
    }
  }
  return worst_status(rows);
}

// ---- embed ----

struct EmbedArgs {
  std::string topology = "chimera";
  int size = 16;
  std::optional<std::size_t> K;
  std::optional<double> defects;
  std::size_t trials = 10;
  std::string edges;
};

int run_embed(const Globals& g, const EmbedArgs& a) {
  const bool chimera = a.topology == "chimera";
  const HardwareTopology topo = chimera ? build_chimera(a.size) : build_pegasus(a.size);
  if (!a.edges.empty()) {
    auto ef = open_out(a.edges);
    write_edge_list(ef, topo);
  }

  json j;
  j["topology"] = topo.name();
  j["num_qubits"] = topo.num_qubits();
  j["num_couplers"] = topo.num_edges();
  j["max_degree"] = topo.max_degree();
  j["clique_capacity"] = clique_capacity(topo);
  if (a.defects) {
    const auto rep = clique_capacity(topo, *a.defects, g.seed, a.trials);
    j["defects"] = json{{"fraction", *a.defects}, {"trials", chimera ? a.trials : 0},
                        {"capacity_min", rep.min}, {"capacity_max", rep.max}, {"estimated", rep.estimated}};
  }
  std::string csv = csv_line({"variable", "qubit"});
  if (a.K) {
    const std::size_t K = *a.K;
    j["K"] = K;
    if (chimera) {
      const Embedding emb = clique_embed_chimera(K, topo);
      const auto rep = validate_embedding(topo, emb, K);
      j["valid"] = rep.valid;
      j["diagnostics"] = rep.diagnostics;
      if (K > 0) {
        const auto st = chain_stats(emb);
        j["chain_stats"] = json{{"min", st.min}, {"max", st.max}, {"mean", st.mean}, {"total_qubits", st.total_qubits}};
      }
      j["chains"] = json::parse(emb.to_json());
      for (std::size_t v = 0; v < emb.chains.size(); ++v)
        for (Qubit q : emb.chains[v]) csv += csv_line({std::to_string(v), std::to_string(q)});
    } else {
      const auto len = pegasus_clique_chain_length(K);
      j["chain_length"] = json{{"min", len.min}, {"max", len.max}, {"estimated", len.estimated}};
    }
  }
  emit(g, g.format == "csv" ? csv : j.dump(2) + "\n");
  return kOk;
}

// ---- bench ----

int run_bench(const Globals& g, const BacktestArgs& a) {
  const auto data = load_returns(fs::path(a.input), ReturnsCsvOptions{a.hybrid.prices});
  HybridOptions exact_opts = a.hybrid, sa_opts = a.hybrid;
  exact_opts.solver = "exact";
  sa_opts.solver = "sa";
  const HybridConfig exact_cfg = exact_opts.config(a.sampler, g.seed);
  const HybridConfig sa_cfg = sa_opts.config(a.sampler, g.seed);
  const BacktestSpec spec = make_spec(a);
  const auto exact_rows = backtest(data, spec, exact_cfg);
  const auto sa_rows = backtest(data, spec, sa_cfg);

  const std::vector<std::string> header{
      "window", "start_date", "end_date", "avg_abs_corr", "p", "exact_energy", "exact_energy_ratio",
      "sa_energy", "sa_energy_ratio", "exact_status", "exact_return", "exact_sharpe", "sa_status", "sa_return",
      "sa_sharpe", "classical_return", "classical_sharpe", "exact_normalized", "sa_normalized"};
  std::string csv = csv_line(header);
  json arr = json::array();
  for (std::size_t i = 0; i < exact_rows.size(); ++i) {
    const auto& ex = exact_rows[i];
    const auto& sa = sa_rows[i];
    std::optional<double> p, e_exact, r_exact, e_sa, r_sa, sa_norm;
    if (ex.allocation.selected) {
      // anneal the exact run's final QUBO and compare against its ground energy
      const auto win = data.slice(ex.start, ex.end - ex.start);
      p = ex.allocation.final_p();
      e_exact = ex.allocation.trace[*ex.allocation.selected].energy;
      const Qubo q = build_markowitz_qubo(
          MarkowitzProblem{mean_returns(win), covariance(win), *p, std::nullopt, exact_cfg.lambda2, exact_cfg.lambda3},
          exact_cfg.encoding);
      const SamplerConfig sc = a.sampler.config(derive_seed(g.seed, 0xbe7c0000ULL + i));
      const AnnealSchedule sched = a.sampler.schedule(q);
      const SampleSet ss = sc.spin_reversal_transforms >= 1 ? sample_with_gauges(qubo_to_ising(q), sc, sched)
                                                             : simulated_anneal(q, sched, sc);
      e_sa = ss.best().energy;
      if (*e_exact < 0.0) {
        r_exact = energy_ratio(*e_exact, *e_exact);
        r_sa = energy_ratio(*e_sa, *e_exact);
      }
    }
    if (ex.reference_return && *ex.reference_return != 0.0) sa_norm = sa.final_return / *ex.reference_return;
    const std::vector<std::string> cells{
        std::to_string(i), ex.start_date, ex.end_date, fmt(ex.avg_abs_corr), fmt(p), fmt(e_exact), fmt(r_exact),
        fmt(e_sa), fmt(r_sa), to_string(ex.allocation.status), fmt(ex.final_return), fmt(ex.sharpe),
        to_string(sa.allocation.status), fmt(sa.final_return), fmt(sa.sharpe), fmt(ex.reference_return),
        fmt(ex.reference_sharpe), fmt(ex.normalized_return), fmt(sa_norm)};
    csv += csv_line(cells);
    json row;
    row["window"] = i;
    row["start_date"] = ex.start_date;
    row["end_date"] = ex.end_date;
    row["avg_abs_corr"] = ex.avg_abs_corr;
    row["p"] = opt_json(p);
    row["exact_energy"] = opt_json(e_exact);
    row["exact_energy_ratio"] = opt_json(r_exact);
    row["sa_energy"] = opt_json(e_sa);
    row["sa_energy_ratio"] = opt_json(r_sa);
    row["exact_status"] = to_string(ex.allocation.status);
    row["exact_return"] = ex.final_return;
    row["exact_sharpe"] = opt_json(ex.sharpe);
    row["sa_status"] = to_string(sa.allocation.status);
    row["sa_return"] = sa.final_return;
    row["sa_sharpe"] = opt_json(sa.sharpe);
    row["classical_return"] = opt_json(ex.reference_return);
    row["classical_sharpe"] = opt_json(ex.reference_sharpe);
    row["exact_normalized"] = opt_json(ex.normalized_return);
    row["sa_normalized"] = opt_json(sa_norm);
    arr.push_back(row);
  }
  emit(g, g.format == "json" ? arr.dump(2) + "\n" : csv);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mean-variance portfolio allocation through QUBO solvers", "qalloc"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value file presetting any flag; command-line flags win");

  Globals g;
  app.add_option("--seed", g.seed, "Master seed")->capture_default_str();
  app.add_option("--out", g.out, "Output path (default: stdout, no side files)");
  app.add_option("--format", g.format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Validate and normalize a returns (or prices) CSV");
  c_ingest->add_option("input", ingest.input, "CSV file")->required()->check(CLI::ExistingFile);
  c_ingest->add_flag("--prices", ingest.prices, "Input holds prices; emit simple returns");

  BuildArgs build;
  auto* c_build = app.add_subcommand("build", "Build a QUBO and manifest from a returns CSV");
  c_build->add_option("input", build.input, "Returns CSV")->required()->check(CLI::ExistingFile);
  c_build->add_flag("--prices", build.prices, "Input holds prices, not returns");
  c_build->add_option("--formulation", build.formulation, "QUBO form")
      ->check(CLI::IsMember({"markowitz", "alternate"}))
      ->capture_default_str();
  c_build->add_option("--p", build.p, "Target return (markowitz)");
  c_build->add_option("--q", build.q, "Return weight (alternate)");
  c_build->add_option("--lambda1", build.lambda1, "Return penalty (default p^-2)");
  c_build->add_option("--lambda2", build.lambda2, "Budget penalty")->capture_default_str();
  c_build->add_option("--lambda3", build.lambda3, "Variance weight")->capture_default_str();
  c_build->add_option("--k", build.k, "Bits per weight")->capture_default_str();

  SolveArgs solve;
  auto* c_solve = app.add_subcommand("solve", "Minimize a .qubo file");
  c_solve->add_option("input", solve.input, ".qubo file")->required()->check(CLI::ExistingFile);
  c_solve->add_option("--solver", solve.solver, "exact or sa")
      ->check(CLI::IsMember({"exact", "sa"}))
      ->capture_default_str();
  c_solve->add_option("--manifest", solve.manifest, "Manifest JSON (default: sibling .manifest.json)");
  add_sampler_options(c_solve, solve.sampler);

  AllocateArgs alloc;
  auto* c_alloc = app.add_subcommand("allocate", "Run the shortfall-targeted hybrid loop on one window");
  c_alloc->add_option("input", alloc.input, "Returns CSV")->required()->check(CLI::ExistingFile);
  add_hybrid_options(c_alloc, alloc.hybrid);
  add_sampler_options(c_alloc, alloc.sampler);

  BacktestArgs bt;
  auto* c_bt = app.add_subcommand("backtest", "Allocate over rolling windows");
  c_bt->add_option("input", bt.input, "Returns CSV")->required()->check(CLI::ExistingFile);
  c_bt->add_option("--window", bt.window, "Periods per window")->capture_default_str();
  c_bt->add_option("--stride", bt.stride, "Periods between window starts")->capture_default_str();
  add_hybrid_options(c_bt, bt.hybrid);
  add_sampler_options(c_bt, bt.sampler);

  EmbedArgs emb;
  auto* c_embed = app.add_subcommand("embed", "Hardware graphs and clique embeddings");
  c_embed->add_option("--topology", emb.topology, "chimera or pegasus")
      ->check(CLI::IsMember({"chimera", "pegasus"}))
      ->capture_default_str();
  c_embed->add_option("--size", emb.size, "M (chimera) or P (pegasus)")->capture_default_str();
  c_embed->add_option("--K", emb.K, "Clique size to embed");
  c_embed->add_option("--defects", emb.defects, "Deleted-qubit fraction for the capacity scenario");
  c_embed->add_option("--trials", emb.trials, "Defect draws")->capture_default_str();
  c_embed->add_option("--edges", emb.edges, "Write the coupler edge list here");

  BacktestArgs bench;
  bench.hybrid.solver = "exact";
  auto* c_bench = app.add_subcommand("bench", "Exact vs annealing vs continuous reference per window");
  c_bench->add_option("input", bench.input, "Returns CSV")->required()->check(CLI::ExistingFile);
  c_bench->add_option("--window", bench.window, "Periods per window")->capture_default_str();
  c_bench->add_option("--stride", bench.stride, "Periods between window starts")->capture_default_str();
  add_hybrid_options(c_bench, bench.hybrid);
  add_sampler_options(c_bench, bench.sampler);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (c_ingest->parsed()) return run_ingest(g, ingest);
    if (c_build->parsed()) return run_build(g, build);
    if (c_solve->parsed()) return run_solve(g, solve);
    if (c_alloc->parsed()) return run_allocate(g, alloc);
    if (c_bt->parsed()) return run_backtest(g, bt);
    if (c_embed->parsed()) return run_embed(g, emb);
    if (c_bench->parsed()) {
      // the comparison table is CSV unless JSON was asked for explicitly
      if (app.get_option("--format")->count() == 0 && g.format == "json") g.format = "csv";
      return run_bench(g, bench);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "qalloc: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "qalloc: error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}
