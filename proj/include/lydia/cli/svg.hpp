#pragma once

#include <string>
#include <vector>

namespace lydia::cli {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotPanel {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = true;
  bool log_y = true;
  std::vector<PlotSeries> series;
};

/// Side-by-side line charts in a standalone SVG document. Points that cannot
/// be placed on a log axis (non-positive) are dropped.
std::string render_svg(const std::vector<PlotPanel>& panels);

/// Best effort; returns false when the file could not be written.
bool write_svg(const std::string& path, const std::vector<PlotPanel>& panels);

}  // namespace lydia::cli
