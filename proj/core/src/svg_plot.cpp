#include "enero/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace enero {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};
constexpr int kPaletteSize = 8;

struct Bounds {
  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -std::numeric_limits<double>::infinity();
  double ymin = std::numeric_limits<double>::infinity();
  double ymax = -std::numeric_limits<double>::infinity();

  void expand(double x, double y) {
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
  }
  void pad() {
    if (!std::isfinite(xmin)) {
      xmin = 0.0;
      xmax = 1.0;
      ymin = 0.0;
      ymax = 1.0;
    }
    if (xmax == xmin) xmax = xmin + 1.0;
    if (ymax == ymin) ymax = ymin + 1.0;
    const double dy = 0.05 * (ymax - ymin);
    ymin -= dy;
    ymax += dy;
  }
};

std::string format_tick(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

}  // namespace

std::string svg_line_chart(const std::vector<PlotSeries>& series,
                           const std::string& title, const std::string& x_label,
                           const std::string& y_label, int width, int height) {
  const double ml = 62, mr = 16, mt = 34, mb = 46;
  const double pw = width - ml - mr;
  const double ph = height - mt - mb;

  Bounds b;
  for (const PlotSeries& s : series) {
    for (auto [x, y] : s.points) b.expand(x, y);
  }
  b.pad();

  auto px = [&](double x) { return ml + (x - b.xmin) / (b.xmax - b.xmin) * pw; };
  auto py = [&](double y) {
    return mt + ph - (y - b.ymin) / (b.ymax - b.ymin) * ph;
  };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";

  // Axes and ticks.
  out << "<g stroke=\"#333\" stroke-width=\"1\">\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw
      << "\" y2=\"" << mt + ph << "\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
      << "\" y2=\"" << mt + ph << "\"/>\n";
  out << "</g>\n";
  const int ticks = 5;
  out << "<g font-family=\"sans-serif\" font-size=\"10\" fill=\"#333\">\n";
  for (int i = 0; i <= ticks; ++i) {
    const double fx = b.xmin + (b.xmax - b.xmin) * i / ticks;
    const double fy = b.ymin + (b.ymax - b.ymin) * i / ticks;
    out << "<text x=\"" << px(fx) << "\" y=\"" << mt + ph + 14
        << "\" text-anchor=\"middle\">" << format_tick(fx) << "</text>\n";
    out << "<text x=\"" << ml - 6 << "\" y=\"" << py(fy) + 3
        << "\" text-anchor=\"end\">" << format_tick(fy) << "</text>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << py(fy) << "\" x2=\"" << ml + pw
        << "\" y2=\"" << py(fy)
        << "\" stroke=\"#ddd\" stroke-width=\"0.5\"/>\n";
  }
  out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 8
      << "\" text-anchor=\"middle\">" << x_label << "</text>\n";
  out << "<text x=\"14\" y=\"" << mt + ph / 2
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " << mt + ph / 2
      << ")\">" << y_label << "</text>\n";
  out << "</g>\n";

  for (size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % kPaletteSize];
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    for (auto [x, y] : series[i].points) {
      out << px(x) << "," << py(y) << " ";
    }
    out << "\"/>\n";
    if (!series[i].label.empty()) {
      const double lx = ml + pw - 150;
      const double ly = mt + 16 + 14 * static_cast<double>(i);
      out << "<line x1=\"" << lx << "\" y1=\"" << ly - 4 << "\" x2=\"" << lx + 18
          << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color
          << "\" stroke-width=\"2\"/>\n";
      out << "<text x=\"" << lx + 22 << "\" y=\"" << ly
          << "\" font-family=\"sans-serif\" font-size=\"11\">" << series[i].label
          << "</text>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

std::string svg_cdf_chart(
    const std::vector<std::pair<std::string, std::vector<double>>>& samples,
    const std::string& title, const std::string& x_label, int width,
    int height) {
  std::vector<PlotSeries> series;
  for (const auto& [label, values] : samples) {
    if (values.empty()) continue;
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    PlotSeries s;
    s.label = label;
    const double n = static_cast<double>(sorted.size());
    s.points.push_back({sorted.front(), 0.0});
    for (size_t i = 0; i < sorted.size(); ++i) {
      s.points.push_back({sorted[i], static_cast<double>(i + 1) / n});
    }
    series.push_back(std::move(s));
  }
  return svg_line_chart(series, title, x_label, "fraction of runs", width,
                        height);
}

}  // namespace enero
