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

// Grid snapshot text format:
//
//   <n_rows> <n_cols> <cell_size> <ego_row> <ego_col>
//   <n_cols space-separated occupancy values>   (n_rows lines)
//
// Lines starting with '#' are ignored on read. Values are written in the
// shortest form that round-trips exactly.

#ifndef ONRAP_GRID_IO_H_
#define ONRAP_GRID_IO_H_

#include <iosfwd>
#include <string>

#include "onrap/occupancy.h"

namespace onrap {

void WriteGridSnapshot(std::ostream& out, const EgoGrid& grid);
/// Throws ConfigError (with a 1-based line number) on malformed input.
EgoGrid ReadGridSnapshot(std::istream& in);

void SaveGridSnapshot(const std::string& path, const EgoGrid& grid);
EgoGrid LoadGridSnapshot(const std::string& path);

/// Shortest round-trip decimal form of `v`.
std::string FormatDouble(double v);

}  // namespace onrap

#endif  // ONRAP_GRID_IO_H_
