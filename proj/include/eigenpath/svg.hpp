// Copyright 2026 The Eigenpath Authors
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

// Static SVG line charts. Every chart is written together with a sidecar CSV
// (same stem, .csv) holding exactly the numbers that were drawn.

#ifndef EIGENPATH_SVG_HPP_
#define EIGENPATH_SVG_HPP_

#include <filesystem>
#include <string>
#include <vector>

namespace eigenpath {

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  // Optional shaded band; empty or the same length as y.
  std::vector<double> y_low;
  std::vector<double> y_high;
};

struct PlotPanel {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  std::vector<PlotSeries> series;
};

// Keeps at most max_points points, always including the first and last.
std::vector<std::size_t> thin_indices(std::size_t n, std::size_t max_points);

// Lays panels out side by side. Non-positive values are clipped to the
// smallest positive value on log axes.
void write_chart(const std::filesystem::path& svg_path, const std::vector<PlotPanel>& panels);

}  // namespace eigenpath

#endif  // EIGENPATH_SVG_HPP_
