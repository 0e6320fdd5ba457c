#include "proxyfit/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace proxyfit {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
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

constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

std::string line_plot_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                          const std::vector<std::string>& x_ticks, const std::vector<PlotSeries>& series) {
  const double W = 560, H = 360, left = 70, right = 20, top = 40, bottom = 50;
  const double pw = W - left - right, ph = H - top - bottom;

  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : series)
    for (double v : s.y)
      if (std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
  if (!std::isfinite(lo)) lo = 0, hi = 1;
  if (hi - lo < 1e-12) {
    const double pad = std::max(std::abs(hi) * 0.1, 1e-6);
    lo -= pad;
    hi += pad;
  }
  const double span = hi - lo;
  lo -= 0.05 * span;
  hi += 0.05 * span;

  const size_t n = x_ticks.size();
  auto px = [&](size_t i) { return left + (n <= 1 ? pw / 2 : pw * static_cast<double>(i) / static_cast<double>(n - 1)); };
  auto py = [&](double v) { return top + ph * (1.0 - (v - lo) / (hi - lo)); };

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(W) + "\" height=\"" + num(H) +
                    "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num(W / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" + escape(title) + "</text>\n";
  svg += "<line x1=\"" + num(left) + "\" y1=\"" + num(top + ph) + "\" x2=\"" + num(left + pw) + "\" y2=\"" + num(top + ph) +
         "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + num(left) + "\" y1=\"" + num(top) + "\" x2=\"" + num(left) + "\" y2=\"" + num(top + ph) +
         "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = lo + (hi - lo) * t / 4.0;
    svg += "<line x1=\"" + num(left - 4) + "\" y1=\"" + num(py(v)) + "\" x2=\"" + num(left) + "\" y2=\"" + num(py(v)) +
           "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + num(left - 6) + "\" y=\"" + num(py(v) + 4) + "\" text-anchor=\"end\">" + label(v) + "</text>\n";
  }
  for (size_t i = 0; i < n; ++i) {
    svg += "<line x1=\"" + num(px(i)) + "\" y1=\"" + num(top + ph) + "\" x2=\"" + num(px(i)) + "\" y2=\"" + num(top + ph + 4) +
           "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + num(px(i)) + "\" y=\"" + num(top + ph + 18) + "\" text-anchor=\"middle\">" + escape(x_ticks[i]) +
           "</text>\n";
  }
  svg += "<text x=\"" + num(left + pw / 2) + "\" y=\"" + num(H - 10) + "\" text-anchor=\"middle\">" + escape(x_label) +
         "</text>\n";
  svg += "<text transform=\"translate(16," + num(top + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" + escape(y_label) +
         "</text>\n";

  for (size_t s = 0; s < series.size(); ++s) {
    const char* color = kColors[s % std::size(kColors)];
    std::string pts;
    for (size_t i = 0; i < std::min(n, series[s].y.size()); ++i) {
      const double v = series[s].y[i];
      if (!std::isfinite(v)) continue;
      pts += num(px(i)) + "," + num(py(v)) + " ";
      svg += "<circle cx=\"" + num(px(i)) + "\" cy=\"" + num(py(v)) + "\" r=\"3\" fill=\"" + color + "\"/>\n";
    }
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"2\" points=\"" + pts + "\"/>\n";
    svg += "<text x=\"" + num(left + pw - 4) + "\" y=\"" + num(top + 14 + 14 * static_cast<double>(s)) +
           "\" text-anchor=\"end\" fill=\"" + color + "\">" + escape(series[s].name) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace proxyfit
