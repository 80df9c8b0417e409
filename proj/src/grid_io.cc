// Copyright 2026 The ONRAP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "onrap/grid_io.h"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "onrap/errors.h"

namespace onrap {
namespace {

// Reads the next non-empty, non-comment line. Returns false at EOF.
bool NextLine(std::istream& in, std::string& line, int& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    return true;
  }
  return false;
}

}  // namespace

std::string FormatDouble(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

void WriteGridSnapshot(std::ostream& out, const EgoGrid& grid) {
  const GridSpec& s = grid.spec();
  out << s.n_rows << ' ' << s.n_cols << ' ' << FormatDouble(s.cell_size)
      << ' ' << s.ego_row << ' ' << s.ego_col << '\n';
  for (int i = 0; i < s.n_rows; ++i) {
    for (int j = 0; j < s.n_cols; ++j) {
      if (j) out << ' ';
      out << FormatDouble(grid.at(i, j));
    }
    out << '\n';
  }
}

EgoGrid ReadGridSnapshot(std::istream& in) {
  std::string line;
  int line_no = 0;
  if (!NextLine(in, line, line_no)) {
    throw ConfigError("grid snapshot: missing header", {}, line_no + 1);
  }
  GridSpec spec;
  {
    std::istringstream header(line);
    std::string extra;
    if (!(header >> spec.n_rows >> spec.n_cols >> spec.cell_size >>
          spec.ego_row >> spec.ego_col) ||
        (header >> extra)) {
      throw ConfigError("grid snapshot: malformed header", {}, line_no);
    }
  }
  try {
    spec.Validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("grid snapshot: ") + e.what(), {}, line_no);
  }
  EgoGrid grid(spec);
  for (int i = 0; i < spec.n_rows; ++i) {
    if (!NextLine(in, line, line_no)) {
      throw ConfigError("grid snapshot: expected " +
                            std::to_string(spec.n_rows) + " rows",
                        {}, line_no + 1);
    }
    std::istringstream row(line);
    for (int j = 0; j < spec.n_cols; ++j) {
      double v = 0;
      if (!(row >> v) || !(v >= 0.0 && v <= 1.0)) {
        throw ConfigError("grid snapshot: bad occupancy value in column " +
                              std::to_string(j),
                          {}, line_no);
      }
      grid.set(i, j, v);
    }
    std::string extra;
    if (row >> extra) {
      throw ConfigError("grid snapshot: too many values", {}, line_no);
    }
  }
  return grid;
}

void SaveGridSnapshot(const std::string& path, const EgoGrid& grid) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  WriteGridSnapshot(out, grid);
}

EgoGrid LoadGridSnapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open grid snapshot " + path);
  return ReadGridSnapshot(in);
}

}  // namespace onrap
