#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace casl {

struct SvgSeries {
  std::string label;
  std::string color;   // css color
  bool dashed = false;
  std::vector<std::pair<double, double>> points;  // (x, y), pre-sorted by x
};

struct SvgChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<SvgSeries> series;
  std::optional<double> hline;       // horizontal reference
  std::string hline_label;
};

// Standalone SVG line chart: axes, linear ticks, legend, polylines. Output
// is deterministic for equal input (fixed-point coordinates).
std::string render_line_chart(const SvgChart& chart);
void write_line_chart(const SvgChart& chart, const std::string& path);

}  // namespace casl
