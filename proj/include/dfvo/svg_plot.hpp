#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "dfvo/raster.hpp"

namespace dfvo {

// Top-down (x, z) plot: one polyline per trajectory with a legend, plus a
// positions CSV next to the SVG (same stem, .csv extension).
void write_trajectory_plot(const std::vector<std::pair<std::string, Trajectory>>& trajectories,
                           const std::filesystem::path& svg_path);

}  // namespace dfvo
