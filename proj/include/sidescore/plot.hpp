// Copyright 2026 The sidescore Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SIDESCORE_PLOT_HPP_
#define SIDESCORE_PLOT_HPP_

#include <string>
#include <vector>

#include "sidescore/types.hpp"

namespace sidescore {

/// Comma-separated numeric table with a header row.
struct Table {
  std::vector<std::string> header;
  MatrixXd values;

  /// Column index by name, or -1.
  Index column(const std::string& name) const;
};

Table read_table(const std::string& path);
void write_table(const std::string& path, const Table& table);

struct ScatterStyle {
  int width = 640;
  int height = 640;
  int margin = 24;
  int point_radius = 2;
};

/// Scatter plot of the two columns of `xy` as an RGB PNG. Integer-valued
/// colour columns with at most 20 distinct values use a categorical
/// palette, anything else a continuous dark-to-bright ramp.
void write_scatter_png(const std::string& path, const MatrixXd& xy, const std::vector<double>& colour,
                       const ScatterStyle& style = {});

}  // namespace sidescore

#endif  // SIDESCORE_PLOT_HPP_
