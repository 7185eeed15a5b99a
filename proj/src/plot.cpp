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

// Minimal hand-written SVG line charts.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ssflood/experiments.hpp"

namespace ssflood {

namespace {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

struct Chart {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  std::vector<Series> series;
};

constexpr double kW = 820, kH = 420, kLeft = 80, kRight = 300, kTop = 40, kBottom = 60;
constexpr double kLogFloor = 1e-6;  // BER of zero is drawn on this floor
const char* const kColours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string render(const Chart& c) {
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  auto ty = [&](double y) { return c.log_y ? std::log10(std::max(y, kLogFloor)) : y; };
  for (const auto& s : c.series)
    for (auto [x, y] : s.points) {
      if (std::isnan(y)) continue;
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, ty(y));
      y1 = std::max(y1, ty(y));
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (c.log_y) y0 = std::floor(y0), y1 = std::max(std::ceil(y1), y0 + 1);
  if (x1 == x0) x0 -= 1, x1 += 1;
  if (y1 == y0) y0 -= 1, y1 += 1;
  if (!c.log_y) {
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
  }

  const double pw = kW - kLeft - kRight, ph = kH - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return kTop + (1.0 - (y - y0) / (y1 - y0)) * ph; };

  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kW) + "\" height=\"" + num(kH) +
                  "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(kW / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" + c.title + "</text>\n";
  s += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
       "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int i = 0; i <= 5; ++i) {
    const double x = x0 + (x1 - x0) * i / 5.0;
    s += "<text x=\"" + num(px(x)) + "\" y=\"" + num(kTop + ph + 18) + "\" text-anchor=\"middle\">" + num(x) +
         "</text>\n";
  }
  const int ny = c.log_y ? static_cast<int>(y1 - y0) : 5;
  for (int i = 0; i <= ny; ++i) {
    const double y = y0 + (y1 - y0) * i / ny;
    const std::string label = c.log_y ? "1e" + num(y) : num(y);
    s += "<line x1=\"" + num(kLeft) + "\" x2=\"" + num(kLeft + pw) + "\" y1=\"" + num(py(y)) + "\" y2=\"" +
         num(py(y)) + "\" stroke=\"#ddd\"/>\n";
    s += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(py(y) + 4) + "\" text-anchor=\"end\">" + label +
         "</text>\n";
  }
  s += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"" + num(kH - 15) + "\" text-anchor=\"middle\">" + c.x_label +
       "</text>\n";
  s += "<text transform=\"translate(18," + num(kTop + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
       c.y_label + "</text>\n";

  for (std::size_t i = 0; i < c.series.size(); ++i) {
    const auto& ser = c.series[i];
    const std::string colour = kColours[i % std::size(kColours)];
    std::string pts;
    for (auto [x, y] : ser.points) {
      if (std::isnan(y)) continue;
      pts += num(px(x)) + "," + num(py(ty(y))) + " ";
      s += "<circle cx=\"" + num(px(x)) + "\" cy=\"" + num(py(ty(y))) + "\" r=\"3\" fill=\"" + colour + "\"/>\n";
    }
    s += "<polyline fill=\"none\" stroke=\"" + colour + "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    const double ly = kTop + 10 + 18.0 * static_cast<double>(i);
    s += "<line x1=\"" + num(kW - kRight + 10) + "\" x2=\"" + num(kW - kRight + 30) + "\" y1=\"" + num(ly) +
         "\" y2=\"" + num(ly) + "\" stroke=\"" + colour + "\" stroke-width=\"2\"/>\n";
    s += "<text x=\"" + num(kW - kRight + 35) + "\" y=\"" + num(ly + 4) + "\">" + ser.label + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

// Groups rows by series label, in order of first appearance.
template <class LabelFn, class XFn, class YFn>
std::vector<Series> group(const ResultTable& t, LabelFn label, XFn x, YFn y) {
  std::vector<Series> out;
  for (const auto& r : t.rows) {
    const std::string l = label(r);
    auto it = std::find_if(out.begin(), out.end(), [&](const Series& s) { return s.label == l; });
    if (it == out.end()) it = out.insert(out.end(), Series{l, {}});
    it->points.emplace_back(x(r), y(r));
  }
  for (auto& s : out) std::sort(s.points.begin(), s.points.end());
  return out;
}

std::string d_label(const ResultRow& r) { return "d = " + num(r.grid_d_m) + " m"; }

Chart hop_chart(const ResultTable& t) {
  Chart c{"Latency vs hop count", "hops", "mean latency (us)", false, {}};
  for (const auto& r : t.rows) {
    Series s{d_label(r) + ", N = " + std::to_string(r.n_nodes()), {}};
    for (const auto& h : r.latency_by_hops) s.points.emplace_back(static_cast<double>(h.hops), h.latency_mean_s * 1e6);
    c.series.push_back(std::move(s));
  }
  return c;
}

}  // namespace

std::filesystem::path emit_plots(const ResultTable& t, const std::filesystem::path& out_dir, const std::string& stem) {
  if (t.rows.empty()) throw std::invalid_argument("emit_plots: empty result table");

  const auto by_d = [](const ResultRow& r) { return d_label(r); };
  const auto ber = [](const ResultRow& r) { return r.ber_avg; };
  Chart c;
  const std::string& id = t.experiment_id;
  if (id == "fig7") {
    c = {"Latency vs packet size", "packet size (bits)", "mean latency (us)", false,
         group(t, by_d, [](const ResultRow& r) { return static_cast<double>(r.packet_bits); },
               [](const ResultRow& r) { return r.latency_mean_us; })};
  } else if (id == "fig8" || id == "hops") {
    c = hop_chart(t);
  } else if (id == "fig9") {
    c = {"BER vs number of nodes", "nodes", "average BER", true,
         group(t, by_d, [](const ResultRow& r) { return static_cast<double>(r.n_nodes()); }, ber)};
  } else {
    const auto one = [&t](const ResultRow& r) {
      std::string l = "N = " + std::to_string(r.n_nodes()) + ", " + std::to_string(r.packet_bits) + " bits";
      for (std::size_t i = 0; i < t.sweep_keys.size() && i < r.sweep_values.size(); ++i)
        l += ", " + t.sweep_keys[i] + " = " + num(r.sweep_values[i]);
      return l;
    };
    c = {"BER vs grid distance", "grid distance (m)", "average BER", true,
         group(t, one, [](const ResultRow& r) { return r.grid_d_m; }, ber)};
  }

  std::filesystem::create_directories(out_dir);
  const auto path = out_dir / ((stem.empty() ? id : stem) + ".svg");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << render(c);
  return path;
}

}  // namespace ssflood
