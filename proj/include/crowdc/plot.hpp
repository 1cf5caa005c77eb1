#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "crowdc/sweep.hpp"

namespace crowdc::plot {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

struct Chart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
};

// Self-contained SVG line chart with point markers and a legend.
std::string render_svg(const Chart& chart);

// Reads a results table and writes:
//   plot_data.csv                      aggregated cells (summary format)
//   cost_g<g>_p<p>.svg                 compared pairs vs n, BTL against CrowDC
//   accuracy_n<n>_r<r>_g<g>_p<p>.svg   mean tau vs t, BTL against CrowDC
// Returns the paths written. Throws MalformedResults for unreadable or empty
// tables; nothing is written in that case.
std::vector<std::filesystem::path> emit_plots(const std::filesystem::path& results_file,
                                              const std::filesystem::path& output_directory);

}  // namespace crowdc::plot
