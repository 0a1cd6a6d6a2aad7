/*
 * Copyright 2026 The sptlab Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
/**
 * @file svg.hpp
 * @brief Minimal static line chart: axes with ticks, polylines, legend.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "sptlab/csv.hpp"

namespace sptlab {

struct SvgSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

struct SvgChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<SvgSeries> series;
  int width = 640;
  int height = 480;
};

namespace detail {

inline std::string svg_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

inline std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

}  // namespace detail

inline std::string render_svg(const SvgChart& chart) {
  static constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  const double left = 70, right = 20, top = 40, bottom = 55;
  const double pw = chart.width - left - right;
  const double ph = chart.height - top - bottom;

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : chart.series) {
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  if (!(x0 <= x1)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
  auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto sy = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(chart.width) + "\" height=\"" +
         std::to_string(chart.height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + detail::svg_num(left + pw / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
         detail::svg_escape(chart.title) + "</text>\n";
  out += "<rect x=\"" + detail::svg_num(left) + "\" y=\"" + detail::svg_num(top) + "\" width=\"" +
         detail::svg_num(pw) + "\" height=\"" + detail::svg_num(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 5; ++k) {
    const double xv = x0 + (x1 - x0) * k / 5.0;
    const double yv = y0 + (y1 - y0) * k / 5.0;
    out += "<line x1=\"" + detail::svg_num(sx(xv)) + "\" y1=\"" + detail::svg_num(top + ph) + "\" x2=\"" +
           detail::svg_num(sx(xv)) + "\" y2=\"" + detail::svg_num(top + ph + 5) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + detail::svg_num(sx(xv)) + "\" y=\"" + detail::svg_num(top + ph + 18) +
           "\" text-anchor=\"middle\">" + detail::tick_label(xv) + "</text>\n";
    out += "<line x1=\"" + detail::svg_num(left - 5) + "\" y1=\"" + detail::svg_num(sy(yv)) + "\" x2=\"" +
           detail::svg_num(left) + "\" y2=\"" + detail::svg_num(sy(yv)) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + detail::svg_num(left - 8) + "\" y=\"" + detail::svg_num(sy(yv) + 4) +
           "\" text-anchor=\"end\">" + detail::tick_label(yv) + "</text>\n";
  }
  out += "<text x=\"" + detail::svg_num(left + pw / 2) + "\" y=\"" + detail::svg_num(chart.height - 12.0) +
         "\" text-anchor=\"middle\">" + detail::svg_escape(chart.x_label) + "</text>\n";
  out += "<text transform=\"translate(16," + detail::svg_num(top + ph / 2) +
         ") rotate(-90)\" text-anchor=\"middle\">" + detail::svg_escape(chart.y_label) + "</text>\n";

  for (std::size_t i = 0; i < chart.series.size(); ++i) {
    const auto& s = chart.series[i];
    const char* color = kPalette[i % std::size(kPalette)];
    std::string pts;
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if (!pts.empty()) pts += ' ';
      pts += detail::svg_num(sx(x)) + "," + detail::svg_num(sy(y));
    }
    out += std::string("<polyline fill=\"none\" stroke=\"") + color + "\" stroke-width=\"1.5\" points=\"" + pts +
           "\"/>\n";
    const double ly = top + 16.0 + 16.0 * static_cast<double>(i);
    out += std::string("<line x1=\"") + detail::svg_num(left + 10) + "\" y1=\"" + detail::svg_num(ly - 4) +
           "\" x2=\"" + detail::svg_num(left + 30) + "\" y2=\"" + detail::svg_num(ly - 4) + "\" stroke=\"" + color +
           "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + detail::svg_num(left + 36) + "\" y=\"" + detail::svg_num(ly) + "\">" +
           detail::svg_escape(s.label) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

inline std::filesystem::path write_svg(const SvgChart& chart, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  const std::string text = render_svg(chart);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw Error(ErrorCode::ConfigInvalid, "cannot write " + path.string());
  return path;
}

}  // namespace sptlab
