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

#include "qalloc/qubo_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qalloc {

namespace {

[[noreturn]] void parse_error(std::size_t line_no, const std::string& what) {
  throw std::runtime_error("qubo line " + std::to_string(line_no) + ": " + what);
}

std::vector<std::string> tokenize(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> tokens;
  std::string tok;
  while (ss >> tok) tokens.push_back(tok);
  return tokens;
}

double to_double(const std::string& tok, std::size_t line_no) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
    parse_error(line_no, "bad number '" + tok + "'");
  }
  return v;
}

std::uint64_t to_count(const std::string& tok, std::size_t line_no) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    parse_error(line_no, "bad integer '" + tok + "'");
  }
  return v;
}

}  // namespace

void write_qubo(std::ostream& out, const Qubo& q) {
  const auto old_precision = out.precision(17);
  out << "c qalloc qubo\n";
  out << "c offset " << q.offset() << '\n';
  out << "p qubo 0 " << q.num_variables() << ' ' << q.num_variables() << ' '
      << q.num_interactions() << '\n';
  for (std::size_t i = 0; i < q.num_variables(); ++i) {
    out << i << ' ' << i << ' ' << q.linear()[i] << '\n';
  }
  for (const auto& [pair, bias] : q.quadratic()) {
    out << pair.first << ' ' << pair.second << ' ' << bias << '\n';
  }
  out.precision(old_precision);
}

void write_qubo(const std::filesystem::path& path, const Qubo& q) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_qubo(out, q);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

Qubo read_qubo(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  double offset = 0.0;
  std::uint64_t max_node = 0, num_nodes = 0, num_couplers = 0;
  std::uint64_t seen_nodes = 0, seen_couplers = 0;
  Qubo q;

  while (std::getline(in, line)) {
    ++line_no;
    auto tokens = tokenize(line);
    if (tokens.empty()) continue;
    if (tokens[0] == "c") {
      if (tokens.size() == 3 && tokens[1] == "offset") offset = to_double(tokens[2], line_no);
      continue;
    }
    if (tokens[0] == "p") {
      if (have_header) parse_error(line_no, "duplicate header");
      if (tokens.size() != 6 || tokens[1] != "qubo") {
        parse_error(line_no, "expected 'p qubo <topology> <maxNode> <nNodes> <nCouplers>'");
      }
      max_node = to_count(tokens[3], line_no);
      num_nodes = to_count(tokens[4], line_no);
      num_couplers = to_count(tokens[5], line_no);
      q = Qubo(max_node);
      have_header = true;
      continue;
    }
    if (!have_header) parse_error(line_no, "entry before header");
    if (tokens.size() != 3) parse_error(line_no, "expected 'i j value'");
    const auto i = to_count(tokens[0], line_no);
    const auto j = to_count(tokens[1], line_no);
    const double value = to_double(tokens[2], line_no);
    if (i >= max_node || j >= max_node) parse_error(line_no, "index exceeds maxNode");
    if (i == j) {
      ++seen_nodes;
      q.add_linear(static_cast<Index>(i), value);
    } else {
      ++seen_couplers;
      q.add_quadratic(static_cast<Index>(i), static_cast<Index>(j), value);
    }
  }
  if (!have_header) throw std::runtime_error("qubo: missing 'p qubo' header");
  if (seen_nodes != num_nodes || seen_couplers != num_couplers) {
    throw std::runtime_error("qubo: header declares " + std::to_string(num_nodes) + " nodes and " +
                             std::to_string(num_couplers) + " couplers, found " +
                             std::to_string(seen_nodes) + " and " + std::to_string(seen_couplers));
  }
  q.set_offset(offset);
  return q;
}

Qubo read_qubo(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_qubo(in);
}

}  // namespace qalloc
