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

#include "qalloc/portfolio.hpp"

namespace qalloc {

struct ReturnsCsvOptions {
  // Cells hold price levels; convert to simple returns p_t / p_{t-1} - 1.
  bool prices = false;
};

// Layout: header row with an optional leading `date` column followed by one
// column per asset id; one row per period; comma separated, '.' decimals.
ReturnsWindow load_returns(std::istream& in, const ReturnsCsvOptions& options = {});
ReturnsWindow load_returns(const std::filesystem::path& path, const ReturnsCsvOptions& options = {});

// Writes the window in the same layout, 17 significant digits.
void write_returns(std::ostream& out, const ReturnsWindow& win);
void write_returns(const std::filesystem::path& path, const ReturnsWindow& win);

}  // namespace qalloc
