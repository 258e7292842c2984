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

#include "scalerecon/eval/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

namespace scalerecon::eval {

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Round step for about five ticks over [lo, hi].
double tick_step(double lo, double hi) {
  const double raw = (hi - lo) / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10.0 * mag;
}

std::string tick_label(double v) {
  std::ostringstream os;
  os << std::setprecision(4) << (std::abs(v) < 1e-12 ? 0.0 : v);
  return os.str();
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2",
                                    "#7f7f7f"};

}  // namespace

std::string format_table(const std::vector<EvalReport>& reports) {
  std::vector<std::vector<std::string>> rows{{"mode", "priors", "views", "scenes", "rel", "tau", "S/S_gt mean",
                                              "S/S_gt min", "S/S_gt max"}};
  for (const auto& r : reports) {
    const bool s = r.scale_count > 0;
    rows.push_back({mode_name(r.config.mode), r.config.prior_label(),
                    r.config.max_frames > 0 ? std::to_string(r.config.max_frames) : "all",
                    std::to_string(r.scenes.size()), fixed(r.mean_rel, 2), fixed(r.mean_tau, 1),
                    s ? fixed(r.scale_ratio_mean, 3) : "-", s ? fixed(r.scale_ratio_min, 3) : "-",
                    s ? fixed(r.scale_ratio_max, 3) : "-"});
  }
  std::vector<std::size_t> width(rows[0].size(), 0);
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream os;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t c = 0; c < rows[i].size(); ++c) {
      if (c > 0) os << "  ";
      // Text columns left-aligned, numbers right-aligned.
      if (c < 2) {
        os << std::left << std::setw(static_cast<int>(width[c])) << rows[i][c];
      } else {
        os << std::right << std::setw(static_cast<int>(width[c])) << rows[i][c];
      }
    }
    os << '\n';
    if (i == 0) {
      std::size_t total = 0;
      for (auto w : width) total += w;
      os << std::string(total + 2 * (width.size() - 1), '-') << '\n';
    }
  }
  return os.str();
}

std::string to_csv(const std::vector<EvalReport>& reports) {
  std::ostringstream os;
  os << "mode,priors,use_pose,use_intrinsics,views,scenes,rel,tau,scale_count,scale_ratio_mean,scale_ratio_min,"
        "scale_ratio_max\n";
  os << std::setprecision(17);
  for (const auto& r : reports) {
    os << mode_name(r.config.mode) << ',' << r.config.prior_label() << ',' << r.config.use_pose << ','
       << r.config.use_intrinsics << ',' << r.config.max_frames << ',' << r.scenes.size() << ',' << r.mean_rel << ','
       << r.mean_tau << ',' << r.scale_count << ',' << r.scale_ratio_mean << ',' << r.scale_ratio_min << ','
       << r.scale_ratio_max << '\n';
  }
  return os.str();
}

std::string svg_line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                           const std::vector<Series>& series) {
  constexpr double W = 640, H = 400, left = 70, right = 170, top = 40, bottom = 55;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!(x0 <= x1)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  const double pw = W - left - right, ph = H - top - bottom;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };

  std::ostringstream os;
  os << std::setprecision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
     << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << left + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape_xml(title)
     << "</text>\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int axis = 0; axis < 2; ++axis) {
    const double lo = axis == 0 ? x0 : y0, hi = axis == 0 ? x1 : y1;
    const double step = tick_step(lo, hi);
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) {
      if (axis == 0) {
        os << "<line x1=\"" << px(v) << "\" y1=\"" << top + ph << "\" x2=\"" << px(v) << "\" y2=\"" << top + ph + 5
           << "\" stroke=\"black\"/>\n<text x=\"" << px(v) << "\" y=\"" << top + ph + 18
           << "\" text-anchor=\"middle\">" << tick_label(v) << "</text>\n";
      } else {
        os << "<line x1=\"" << left - 5 << "\" y1=\"" << py(v) << "\" x2=\"" << left << "\" y2=\"" << py(v)
           << "\" stroke=\"black\"/>\n<text x=\"" << left - 8 << "\" y=\"" << py(v) + 4
           << "\" text-anchor=\"end\">" << tick_label(v) << "</text>\n";
      }
    }
  }
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << escape_xml(x_label)
     << "</text>\n";
  os << "<text transform=\"translate(16," << top + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
     << escape_xml(y_label) << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      os << (first ? "" : " ") << px(s.x[i]) << ',' << py(s.y[i]);
      first = false;
    }
    os << "\"/>\n";
    const double ly = top + 14 + 18 * static_cast<double>(k);
    os << "<line x1=\"" << W - right + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << W - right + 32 << "\" y2=\""
       << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n<text x=\"" << W - right + 38 << "\" y=\""
       << ly << "\">" << escape_xml(s.name) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::vector<EvalReport> views_sweep(const model::UniScaleModel& net, const std::vector<NamedScene>& scenes,
                                    const EvalConfig& base, const std::vector<int>& views) {
  std::vector<EvalReport> out;
  for (int n : views) {
    if (n <= 0) throw EvalError("views_sweep: view counts must be positive");
    EvalConfig c = base;
    c.max_frames = n;
    out.push_back(evaluate(net, scenes, c));
  }
  return out;
}

std::string views_chart(const std::vector<EvalReport>& reports, bool tau) {
  std::map<std::string, Series> by_prior;
  std::string mode;
  for (const auto& r : reports) {
    Series& s = by_prior[r.config.prior_label()];
    s.name = r.config.prior_label();
    s.x.push_back(r.config.max_frames);
    s.y.push_back(tau ? r.mean_tau : r.mean_rel);
    mode = mode_name(r.config.mode);
  }
  std::vector<Series> series;
  for (auto& [name, s] : by_prior) series.push_back(std::move(s));
  const std::string metric = tau ? "tau (%)" : "rel (x100)";
  return svg_line_chart(metric + " vs views (" + mode + ")", "views", metric, series);
}

std::string svg_depth_image(const std::vector<double>& depth, int width, int height, const std::string& title) {
  if (width <= 0 || height <= 0 || depth.size() != static_cast<std::size_t>(width) * height) {
    throw EvalError("svg_depth_image: depth size does not match the extents");
  }
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double d : depth) {
    if (d > 0.0 && std::isfinite(d)) lo = std::min(lo, d), hi = std::max(hi, d);
  }
  if (!(lo <= hi)) lo = 0.0, hi = 1.0;
  const double range = hi - lo > 0.0 ? hi - lo : 1.0;
  constexpr int cell = 4, header = 20;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width * cell << "\" height=\""
     << height * cell + header << "\" font-family=\"sans-serif\" font-size=\"11\" shape-rendering=\"crispEdges\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"2\" y=\"14\">" << escape_xml(title) << " [" << tick_label(lo) << ", " << tick_label(hi)
     << "]</text>\n";
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double d = depth[static_cast<std::size_t>(y) * width + x];
      std::string fill = "#3060c0";
      if (d > 0.0 && std::isfinite(d)) {
        const int g = static_cast<int>(std::lround(255.0 * (1.0 - (d - lo) / range)));
        char buf[8];
        std::snprintf(buf, sizeof buf, "#%02x%02x%02x", g, g, g);
        fill = buf;
      }
      os << "<rect x=\"" << x * cell << "\" y=\"" << y * cell + header << "\" width=\"" << cell << "\" height=\""
         << cell << "\" fill=\"" << fill << "\"/>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace scalerecon::eval
