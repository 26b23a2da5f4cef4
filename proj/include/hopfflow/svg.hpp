#pragma once

#include <string>
#include <vector>

namespace hopfflow {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct Chart {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;  // nonpositive values are dropped on a log axis
  std::vector<Series> series;
};

/// Standalone SVG polyline chart. Output depends only on the input values.
std::string render_svg(const Chart& chart);

}  // namespace hopfflow
