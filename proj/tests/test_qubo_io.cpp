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

#include <filesystem>
#include <random>
#include <sstream>

#include "qalloc/qubo_io.hpp"
#include "support/oracles.hpp"

using namespace qalloc;

TEST_CASE("qubo file round trip", "[qubo_io]") {
  std::mt19937_64 rng(4);
  for (std::size_t n : {1u, 5u, 30u}) {
    auto raw = testing::random_raw_model(n, rng);
    for (auto& v : raw.h) v *= 1e-7 + uniform01(rng);  // awkward magnitudes
    const Qubo q = testing::to_model<Qubo>(raw);
    std::stringstream ss;
    write_qubo(ss, q);
    const Qubo back = read_qubo(ss);
    CHECK(back == q);  // bit-exact
  }
}

TEST_CASE("qubo file layout", "[qubo_io]") {
  Qubo q(3);
  q.add_linear(0, -1.5);
  q.add_quadratic(0, 2, 0.25);
  q.add_offset(2.0);
  std::stringstream ss;
  write_qubo(ss, q);
  const std::string text = ss.str();
  CHECK(text.find("c offset 2\n") != std::string::npos);
  CHECK(text.find("p qubo 0 3 3 1\n") != std::string::npos);
  CHECK(text.find("0 0 -1.5\n") != std::string::npos);
  CHECK(text.find("0 2 0.25\n") != std::string::npos);
}

TEST_CASE("qubo reader accepts foreign files", "[qubo_io]") {
  std::istringstream in(
      "c written elsewhere\n"
      "p qubo 0 4 2 1\n"
      "0 0 1.0\n"
      "3 3 -2\n"
      "3 0 0.5\n");
  const Qubo q = read_qubo(in);
  CHECK(q.num_variables() == 4);
  CHECK(q.linear(3) == -2.0);
  CHECK(q.quadratic(0, 3) == 0.5);
  CHECK(q.offset() == 0.0);
}

TEST_CASE("qubo reader rejects malformed input", "[qubo_io]") {
  auto bad = [](const std::string& text) {
    std::istringstream in(text);
    return read_qubo(in);
  };
  CHECK_THROWS(bad(""));
  CHECK_THROWS(bad("0 0 1\n"));                               // no header
  CHECK_THROWS(bad("p qubo 0 2 1 0\n0 0 x\n"));               // bad number
  CHECK_THROWS(bad("p qubo 0 2 2 0\n0 0 1\n"));               // count mismatch
  CHECK_THROWS(bad("p qubo 0 2 1 0\n5 5 1\n"));               // index out of range
  CHECK_THROWS(bad("p qubo 0 2 0 1\n0 1 1\n0 1 2\n"));        // extra coupler
  CHECK_THROWS(read_qubo(std::filesystem::path("/nonexistent/file.qubo")));
}
