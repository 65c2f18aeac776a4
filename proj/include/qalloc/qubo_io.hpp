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

#include <filesystem>
#include <iosfwd>

#include "qalloc/ising.hpp"

namespace qalloc {

// qbsolv-compatible text format:
//
//   c <comment>
//   c offset <value>
//   p qubo 0 <maxNode> <nNodes> <nCouplers>
//   i i <value>      (nNodes node lines)
//   i j <value>      (nCouplers coupler lines, i < j)
//
// Values are written with 17 significant digits so a write/read cycle is
// bit-exact.

void write_qubo(std::ostream& out, const Qubo& q);
void write_qubo(const std::filesystem::path& path, const Qubo& q);

// Throws std::runtime_error with a line number on malformed input.
Qubo read_qubo(std::istream& in);
Qubo read_qubo(const std::filesystem::path& path);

}  // namespace qalloc
