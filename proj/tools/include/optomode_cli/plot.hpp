#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace optomode::cli {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
  int colour = -1;  // palette index; -1 uses the series position
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
  bool log_y = false;
};

/// Standalone SVG line chart.
void write_svg(std::ostream& out, const PlotSpec& spec);

}  // namespace optomode::cli
