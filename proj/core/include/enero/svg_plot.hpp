#pragma once

#include <string>
#include <utility>
#include <vector>

namespace enero {

struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

/// Standalone SVG line chart (time series).
std::string svg_line_chart(const std::vector<PlotSeries>& series,
                           const std::string& title, const std::string& x_label,
                           const std::string& y_label, int width = 820,
                           int height = 460);

/// Empirical CDF chart: one step curve per labelled sample set.
std::string svg_cdf_chart(
    const std::vector<std::pair<std::string, std::vector<double>>>& samples,
    const std::string& title, const std::string& x_label, int width = 820,
    int height = 460);

}  // namespace enero
