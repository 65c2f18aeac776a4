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

#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qalloc/returns_csv.hpp"
#include "support/synthetic.hpp"

namespace fs = std::filesystem;

namespace {

struct Workspace {
  fs::path dir;
  Workspace() {
    dir = fs::temp_directory_path() / ("qalloc_cli_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    qalloc::write_returns(dir / "r.csv", qalloc::testing::synthetic_market(3, 60, 5));
  }
  ~Workspace() { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

int run(const std::string& args, const std::string& stdout_file = "/dev/null") {
  const std::string cmd = std::string(QALLOC_CLI) + " " + args + " >" + stdout_file + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t lines(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

}  // namespace

TEST_CASE("usage errors", "[cli]") {
  CHECK(run("") == 64);
  CHECK(run("nonsense") == 64);
  CHECK(run("--help") == 0);
  CHECK(run("embed --topology torus") == 64);
  CHECK(run("solve /definitely/missing.qubo") == 64);
}

TEST_CASE("build and solve", "[cli]") {
  Workspace ws;
  const auto qubo = ws.path("m.qubo");
  REQUIRE(run("build " + ws.path("r.csv") + " --p 0.001 --k 3 --out " + qubo) == 0);
  CHECK(fs::exists(ws.path("m.manifest.json")));
  REQUIRE(run("solve " + qubo + " --solver exact", ws.path("exact.json")) == 0);
  const auto exact = slurp(ws.path("exact.json"));
  CHECK(exact.find("\"penalty_floor\"") != std::string::npos);
  CHECK(exact.find("\"weights\"") != std::string::npos);

  REQUIRE(run("solve " + qubo + " --solver sa --samples 60 --sweeps 200 --gauges 3 --out " + ws.path("sa.json")) == 0);
  CHECK(lines(slurp(ws.path("sa.hist.csv"))) == 51);
  CHECK(fs::exists(ws.path("sa.samples.csv")));
  CHECK(run("solve " + qubo + " --solver sa --samples 0") == 1);
  CHECK(run("build " + ws.path("r.csv") + " --p 0.001") == 64);
}

TEST_CASE("allocate and backtest exit codes", "[cli]") {
  Workspace ws;
  const auto csv = ws.path("r.csv");
  const int code = run("allocate " + csv + " --k 3 --max-iters 4 --out " + ws.path("a.json"));
  CHECK((code == 0 || code == 2 || code == 3));
  CHECK(fs::exists(ws.path("a.trace.csv")));
  const auto report = slurp(ws.path("a.json"));
  if (code == 0) CHECK(report.find("\"converged\"") != std::string::npos);
  if (code == 3) CHECK(report.find("\"iteration-cap\"") != std::string::npos);

  CHECK(run("allocate " + csv + " --k 3 --max-iters 1 --epsilon 0.0001") == 3);
  CHECK(run("backtest " + csv + " --window 30 --stride 30 --k 3 --max-iters 1 --epsilon 0.0001 --format csv",
            ws.path("bt.csv")) == 3);
  CHECK(lines(slurp(ws.path("bt.csv"))) == 3);
  CHECK(run("backtest " + csv + " --window 100") == 1);
}

TEST_CASE("embed", "[cli]") {
  Workspace ws;
  REQUIRE(run("embed --topology chimera --size 16 --K 30", ws.path("e.json")) == 0);
  const auto text = slurp(ws.path("e.json"));
  CHECK(text.find("\"total_qubits\": 270") != std::string::npos);
  CHECK(text.find("\"valid\": true") != std::string::npos);
  CHECK(run("embed --topology chimera --size 2 --K 9") == 1);
  REQUIRE(run("embed --topology pegasus --size 16 --K 8", ws.path("p.json")) == 0);
  CHECK(slurp(ws.path("p.json")).find("\"num_qubits\": 5760") != std::string::npos);
}

TEST_CASE("config file", "[cli]") {
  Workspace ws;
  {
    std::ofstream cfg(ws.path("run.ini"));
    cfg << "seed=7\n[embed]\ntopology=chimera\nsize=2\nK=8\n";
  }
  REQUIRE(run("--config " + ws.path("run.ini") + " embed", ws.path("c.json")) == 0);
  CHECK(slurp(ws.path("c.json")).find("\"clique_capacity\": 8") != std::string::npos);
}
