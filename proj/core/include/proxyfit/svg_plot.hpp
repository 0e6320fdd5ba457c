#pragma once

#include <string>
#include <vector>

namespace proxyfit {

struct PlotSeries {
  std::string name;
  std::vector<double> y;  // one value per x label; NaN leaves a gap
};

// Static line chart with categorical x positions.
std::string line_plot_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                          const std::vector<std::string>& x_ticks, const std::vector<PlotSeries>& series);

}  // namespace proxyfit
