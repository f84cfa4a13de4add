#pragma once

#include <string>
#include <vector>

namespace amlab {

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotOptions {
  int width = 800;
  int height = 500;
  bool log_x = false;
  bool log_y = false;
  bool mark_minimum = false;  // drop a marker at the minimum of each series
  std::string title;
};

// Self-contained SVG line chart. Throws on empty input or on a log axis with
// non-positive values.
void emit_plot(const std::vector<PlotSeries>& series, const std::string& path,
               const PlotOptions& options = {});

}  // namespace amlab
