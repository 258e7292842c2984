// Copyright 2026 The scalerecon Authors.
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

#pragma once

// Text, CSV and SVG renderings of evaluation results.

#include <string>
#include <vector>

#include "scalerecon/eval/metrics.hpp"

namespace scalerecon::eval {

/// Aligned plain-text table, one row per report.
std::string format_table(const std::vector<EvalReport>& reports);

/// One header line plus one row per report.
std::string to_csv(const std::vector<EvalReport>& reports);

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Line chart with linear axes and a legend. Non-finite points are skipped.
std::string svg_line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                           const std::vector<Series>& series);

/// Reports for each view count in `views` (max_frames set accordingly).
std::vector<EvalReport> views_sweep(const model::UniScaleModel& net, const std::vector<NamedScene>& scenes,
                                    const EvalConfig& base, const std::vector<int>& views);

/// rel (or tau when `tau` is set) against the number of views, one line per
/// prior configuration found in `reports`.
std::string views_chart(const std::vector<EvalReport>& reports, bool tau);

/// Grayscale rendering of a [H, W] depth map, near = bright. Zeros are drawn
/// as a background color.
std::string svg_depth_image(const std::vector<double>& depth, int width, int height, const std::string& title);

}  // namespace scalerecon::eval
