// Copyright 2026 The arcfit Authors.
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

#include "arcfit/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "arcfit/errors.hpp"

namespace arcfit {

namespace {

constexpr double kWidth = 720, kHeight = 450;
constexpr double kLeft = 80, kRight = 20, kTop = 40, kBottom = 60;

std::string fmt(double v, const char* spec = "%.6g") {
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string escape(const std::string& s) {
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

// Widens an empty range so constant data sits mid-frame.
std::pair<double, double> padded(double lo, double hi) {
  if (hi > lo) return {lo, hi};
  const double d = lo == 0.0 ? 1.0 : 0.05 * std::abs(lo);
  return {lo - d, hi + d};
}

}  // namespace

std::vector<double> nice_ticks(double lo, double hi, int target) {
  const double span = hi - lo;
  const double raw = span / std::max(target, 1);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double f : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    step = f * mag;
    if (step >= raw) break;
  }
  std::vector<double> out;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step)
    out.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
  return out;
}

std::string render_svg(const PlotSpec& spec, const std::vector<double>& x,
                       const std::vector<double>& y) {
  if (x.size() != y.size()) throw InvalidInput("plot: x and y differ in length");
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) continue;
    if (spec.log_y && !(y[i] > 0.0)) continue;
    pts.emplace_back(x[i], spec.log_y ? std::log10(y[i]) : y[i]);
  }
  if (pts.empty()) throw InvalidInput("plot: no drawable points");

  double x0 = pts.front().first, x1 = x0, y0 = pts.front().second, y1 = y0;
  for (const auto& [a, b] : pts) {
    x0 = std::min(x0, a);
    x1 = std::max(x1, a);
    y0 = std::min(y0, b);
    y1 = std::max(y1, b);
  }
  std::tie(x0, x1) = padded(x0, x1);
  if (spec.log_y) {
    y0 = std::floor(y0);
    y1 = std::ceil(y1);
    if (y1 == y0) y1 = y0 + 1.0;
  } else {
    std::tie(y0, y1) = padded(y0, y1);
  }
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + (v - x0) / (x1 - x0) * pw; };
  auto py = [&](double v) { return kTop + (y1 - v) / (y1 - y0) * ph; };

  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  if (!spec.provenance.empty()) {
    s += "<!--\n";
    for (const auto& [k, v] : spec.provenance) s += escape(k) + ": " + escape(v) + "\n";
    s += "-->\n";
  }
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth) + "\" height=\"" +
       fmt(kHeight) + "\" viewBox=\"0 0 " + fmt(kWidth) + " " + fmt(kHeight) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"black\">\n";
  s += "<text x=\"" + fmt(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
       escape(spec.title) + "</text>\n";
  s += "<text x=\"" + fmt(kLeft + pw / 2) + "\" y=\"" + fmt(kHeight - 16) +
       "\" text-anchor=\"middle\">" + escape(spec.x_label) + "</text>\n";
  s += "<text transform=\"translate(18 " + fmt(kTop + ph / 2) +
       ") rotate(-90)\" text-anchor=\"middle\">" + escape(spec.y_label) + "</text>\n";

  for (double t : nice_ticks(x0, x1)) {
    const double X = px(t);
    s += "<line x1=\"" + fmt(X) + "\" y1=\"" + fmt(kTop + ph) + "\" x2=\"" + fmt(X) + "\" y2=\"" +
         fmt(kTop + ph + 5) + "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + fmt(X) + "\" y=\"" + fmt(kTop + ph + 19) + "\" text-anchor=\"middle\">" +
         fmt(t) + "</text>\n";
  }
  std::vector<double> yt;
  if (spec.log_y) {
    for (double d = y0; d <= y1 + 1e-9; d += 1.0) yt.push_back(d);
  } else {
    yt = nice_ticks(y0, y1);
  }
  for (double t : yt) {
    const double Y = py(t);
    s += "<line x1=\"" + fmt(kLeft - 5) + "\" y1=\"" + fmt(Y) + "\" x2=\"" + fmt(kLeft) +
         "\" y2=\"" + fmt(Y) + "\" stroke=\"black\"/>\n";
    s += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(Y) + "\" x2=\"" + fmt(kLeft + pw) +
         "\" y2=\"" + fmt(Y) + "\" stroke=\"#dddddd\"/>\n";
    const std::string label = spec.log_y ? "1e" + fmt(t, "%.0f") : fmt(t);
    s += "<text x=\"" + fmt(kLeft - 8) + "\" y=\"" + fmt(Y + 4) + "\" text-anchor=\"end\">" +
         label + "</text>\n";
  }
  s += "<rect x=\"" + fmt(kLeft) + "\" y=\"" + fmt(kTop) + "\" width=\"" + fmt(pw) +
       "\" height=\"" + fmt(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
  s += "</g>\n<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) s += ' ';
    s += fmt(px(pts[i].first), "%.2f") + "," + fmt(py(pts[i].second), "%.2f");
  }
  s += "\"/>\n</svg>\n";
  return s;
}

}  // namespace arcfit
