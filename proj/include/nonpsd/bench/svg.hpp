#pragma once

// Static line plots as hand-written SVG. Rendering depends only on its inputs.

#include <string>
#include <vector>

#include "nonpsd/bench/csv.hpp"

namespace nonpsd::bench {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;  // non-positive y values are dropped
};

std::string render_svg(const std::vector<Series>& series, const PlotSpec& spec);

/// One series per distinct value of group_col (in first-appearance order), or
/// a single series when group_col is empty.
std::vector<Series> series_from_csv(const CsvTable& table, const std::string& x_col, const std::string& y_col,
                                    const std::string& group_col);

}  // namespace nonpsd::bench
