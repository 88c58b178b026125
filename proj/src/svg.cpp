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

#include "eigenpath/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "eigenpath/csv.hpp"

namespace eigenpath {
namespace {

constexpr double kPanelWidth = 480.0;
constexpr double kPanelHeight = 360.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 50.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  bool log = false;

  double transform(double v) const {
    return log ? std::log10(std::max(v, lo)) : v;
  }
  double tlo() const { return log ? std::log10(lo) : lo; }
  double thi() const { return log ? std::log10(hi) : hi; }
};

Axis fit_axis(const std::vector<const std::vector<double>*>& columns, bool log) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  double min_positive = std::numeric_limits<double>::infinity();
  for (const auto* col : columns) {
    for (double v : *col) {
      if (!std::isfinite(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      if (v > 0.0) min_positive = std::min(min_positive, v);
    }
  }
  Axis axis;
  axis.log = log;
  if (log) {
    if (!std::isfinite(min_positive)) min_positive = 1.0;
    lo = min_positive;
    hi = std::max(hi, lo);
    if (hi <= lo) hi = lo * 10.0;
  } else {
    if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
    if (hi <= lo) hi = lo + 1.0;
  }
  axis.lo = lo;
  axis.hi = hi;
  return axis;
}

}  // namespace

std::vector<std::size_t> thin_indices(std::size_t n, std::size_t max_points) {
  std::vector<std::size_t> out;
  if (n == 0) return out;
  if (n <= max_points || max_points < 2) {
    for (std::size_t i = 0; i < n; ++i) out.push_back(i);
    return out;
  }
  const std::size_t stride = (n - 1 + max_points - 2) / (max_points - 1);
  for (std::size_t i = 0; i < n - 1; i += stride) out.push_back(i);
  out.push_back(n - 1);
  return out;
}

void write_chart(const std::filesystem::path& svg_path, const std::vector<PlotPanel>& panels) {
  std::ofstream svg(svg_path);
  if (!svg) throw std::runtime_error("cannot write " + svg_path.string());
  std::filesystem::path csv_path = svg_path;
  csv_path.replace_extension(".csv");
  std::ofstream sidecar(csv_path);
  if (!sidecar) throw std::runtime_error("cannot write " + csv_path.string());
  CsvWriter csv(sidecar, {"panel", "series", "x", "y", "y_low", "y_high"});

  const double width = kPanelWidth * static_cast<double>(std::max<std::size_t>(panels.size(), 1));
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width) << "\" height=\""
      << fmt(kPanelHeight) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (std::size_t p = 0; p < panels.size(); ++p) {
    const PlotPanel& panel = panels[p];
    std::vector<const std::vector<double>*> xs, ys;
    for (const auto& s : panel.series) {
      xs.push_back(&s.x);
      ys.push_back(&s.y);
      if (!s.y_low.empty()) ys.push_back(&s.y_low);
      if (!s.y_high.empty()) ys.push_back(&s.y_high);
    }
    const Axis ax = fit_axis(xs, false);
    const Axis ay = fit_axis(ys, panel.log_y);
    const double x0 = kPanelWidth * static_cast<double>(p) + kMarginLeft;
    const double x1 = kPanelWidth * static_cast<double>(p + 1) - kMarginRight;
    const double y0 = kPanelHeight - kMarginBottom;
    const double y1 = kMarginTop;
    auto px = [&](double v) {
      return x0 + (ax.transform(v) - ax.tlo()) / (ax.thi() - ax.tlo()) * (x1 - x0);
    };
    auto py = [&](double v) {
      return y0 - (ay.transform(v) - ay.tlo()) / (ay.thi() - ay.tlo()) * (y0 - y1);
    };

    svg << "<g>\n";
    svg << "<text x=\"" << fmt((x0 + x1) / 2) << "\" y=\"" << fmt(y1 - 15)
        << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(panel.title) << "</text>\n";
    svg << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(y0) << "\" x2=\"" << fmt(x1)
        << "\" y2=\"" << fmt(y0) << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(y0) << "\" x2=\"" << fmt(x0)
        << "\" y2=\"" << fmt(y1) << "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
      const double fx = ax.tlo() + (ax.thi() - ax.tlo()) * t / 4.0;
      const double fy = ay.tlo() + (ay.thi() - ay.tlo()) * t / 4.0;
      const double vx = fx;
      const double vy = ay.log ? std::pow(10.0, fy) : fy;
      svg << "<text x=\"" << fmt(px(vx)) << "\" y=\"" << fmt(y0 + 15)
          << "\" text-anchor=\"middle\">" << tick_label(vx) << "</text>\n";
      svg << "<text x=\"" << fmt(x0 - 5) << "\" y=\"" << fmt(py(vy) + 4)
          << "\" text-anchor=\"end\">" << tick_label(vy) << "</text>\n";
    }
    svg << "<text x=\"" << fmt((x0 + x1) / 2) << "\" y=\"" << fmt(kPanelHeight - 12)
        << "\" text-anchor=\"middle\">" << escape(panel.x_label) << "</text>\n";
    svg << "<text transform=\"translate(" << fmt(x0 - 55) << "," << fmt((y0 + y1) / 2)
        << ") rotate(-90)\" text-anchor=\"middle\">" << escape(panel.y_label)
        << (panel.log_y ? " (log)" : "") << "</text>\n";

    for (std::size_t si = 0; si < panel.series.size(); ++si) {
      const PlotSeries& s = panel.series[si];
      const char* color = kPalette[si % (sizeof kPalette / sizeof *kPalette)];
      const bool band = !s.y_low.empty() && s.y_low.size() == s.y.size() &&
                        s.y_high.size() == s.y.size();
      if (band) {
        svg << "<polygon fill=\"" << color << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
          svg << fmt(px(s.x[i])) << ',' << fmt(py(s.y_high[i])) << ' ';
        }
        for (std::size_t i = s.x.size(); i-- > 0;) {
          svg << fmt(px(s.x[i])) << ',' << fmt(py(s.y_low[i])) << ' ';
        }
        svg << "\"/>\n";
      }
      svg << "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" << color << "\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        svg << fmt(px(s.x[i])) << ',' << fmt(py(s.y[i])) << ' ';
        const double nan = std::numeric_limits<double>::quiet_NaN();
        csv.row(panel.title, s.name, s.x[i], s.y[i], band ? s.y_low[i] : nan,
                band ? s.y_high[i] : nan);
      }
      svg << "\"/>\n";
      svg << "<text x=\"" << fmt(x1 - 5) << "\" y=\"" << fmt(y1 + 14 * static_cast<double>(si + 1))
          << "\" text-anchor=\"end\" fill=\"" << color << "\">" << escape(s.name) << "</text>\n";
    }
    svg << "</g>\n";
  }
  svg << "</svg>\n";
}

}  // namespace eigenpath
