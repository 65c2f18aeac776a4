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

#include "qalloc/returns_csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qalloc {

namespace {

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r\"");
  if (begin == std::string::npos) return {};
  auto end = s.find_last_not_of(" \t\r\"");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

bool is_date_header(std::string cell) {
  std::transform(cell.begin(), cell.end(), cell.begin(), [](unsigned char c) { return std::tolower(c); });
  return cell == "date";
}

[[noreturn]] void csv_error(std::size_t line_no, const std::string& what) {
  throw std::runtime_error("returns csv line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

ReturnsWindow load_returns(std::istream& in, const ReturnsCsvOptions& options) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) header = split_row(line);
  }
  if (header.empty()) throw std::runtime_error("returns csv: empty input");

  const bool has_dates = is_date_header(header.front());
  std::vector<std::string> assets(header.begin() + (has_dates ? 1 : 0), header.end());
  if (assets.empty()) throw std::runtime_error("returns csv: no asset columns");
  for (const auto& id : assets) {
    if (id.empty()) throw std::runtime_error("returns csv: empty asset id in header");
  }

  std::vector<std::string> dates;
  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_row(line);
    if (cells.size() != header.size()) {
      csv_error(line_no, "expected " + std::to_string(header.size()) + " cells, found " +
                             std::to_string(cells.size()));
    }
    std::size_t first = 0;
    if (has_dates) {
      dates.push_back(cells[0]);
      first = 1;
    }
    for (std::size_t c = first; c < cells.size(); ++c) {
      const auto& cell = cells[c];
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
        csv_error(line_no, "bad number '" + cell + "'");
      }
      if (!std::isfinite(v)) csv_error(line_no, "non-finite value '" + cell + "'");
      values.push_back(v);
    }
    ++rows;
  }

  const auto n = static_cast<Eigen::Index>(assets.size());
  Eigen::MatrixXd data(static_cast<Eigen::Index>(rows), n);
  for (std::size_t r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) data(static_cast<Eigen::Index>(r), c) = values[r * n + c];
  }

  if (options.prices) {
    if (rows < 3) throw std::runtime_error("returns csv: need at least 3 price rows");
    Eigen::MatrixXd returns = data.bottomRows(data.rows() - 1).array() / data.topRows(data.rows() - 1).array() - 1.0;
    if (!returns.allFinite()) throw std::runtime_error("returns csv: price data produces non-finite returns");
    if (has_dates) dates.erase(dates.begin());
    data = std::move(returns);
  } else if (rows < 2) {
    throw std::runtime_error("returns csv: need at least 2 rows");
  }
  return ReturnsWindow(std::move(assets), std::move(data), std::move(dates));
}

ReturnsWindow load_returns(const std::filesystem::path& path, const ReturnsCsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return load_returns(in, options);
}

void write_returns(std::ostream& out, const ReturnsWindow& win) {
  const auto old_precision = out.precision(17);
  const bool has_dates = !win.dates().empty();
  if (has_dates) out << "date,";
  for (std::size_t c = 0; c < win.assets().size(); ++c) {
    out << (c ? "," : "") << win.assets()[c];
  }
  out << '\n';
  for (Eigen::Index r = 0; r < win.periods(); ++r) {
    if (has_dates) out << win.dates()[r] << ',';
    for (Eigen::Index c = 0; c < win.num_assets(); ++c) {
      out << (c ? "," : "") << win.returns()(r, c);
    }
    out << '\n';
  }
  out.precision(old_precision);
}

void write_returns(const std::filesystem::path& path, const ReturnsWindow& win) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_returns(out, win);
}

}  // namespace qalloc
