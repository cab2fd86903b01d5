#include "dfvo/svg_plot.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "dfvo/errors.hpp"

namespace dfvo {
namespace {

constexpr int kCanvas = 800;
constexpr int kMargin = 60;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string format_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

void write_trajectory_plot(const std::vector<std::pair<std::string, Trajectory>>& trajectories,
                           const std::filesystem::path& svg_path) {
  if (trajectories.empty()) fail(ErrorCode::BadArguments, "no trajectories to plot");

  double min_x = std::numeric_limits<double>::infinity(), max_x = -min_x;
  double min_z = min_x, max_z = max_x;
  for (const auto& [name, traj] : trajectories) {
    for (const auto& pose : traj) {
      min_x = std::min(min_x, pose.translation().x());
      max_x = std::max(max_x, pose.translation().x());
      min_z = std::min(min_z, pose.translation().z());
      max_z = std::max(max_z, pose.translation().z());
    }
  }
  const double span = std::max({max_x - min_x, max_z - min_z, 1e-9});
  const double scale = (kCanvas - 2 * kMargin) / span;
  // x right, z up (forward motion goes up the page).
  const auto to_px = [&](double x, double z) {
    return std::pair<double, double>{kMargin + (x - min_x) * scale, kCanvas - kMargin - (z - min_z) * scale};
  };

  std::ofstream svg(svg_path, std::ios::trunc);
  if (!svg) fail(ErrorCode::IoFailure, "cannot open " + svg_path.string() + " for writing");
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kCanvas << "\" height=\"" << kCanvas << "\">\n";
  svg << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "  <text x=\"" << kMargin << "\" y=\"" << kCanvas - 20 << "\" font-size=\"12\">x [m]</text>\n";
  svg << "  <text x=\"15\" y=\"" << kMargin << "\" font-size=\"12\">z [m]</text>\n";
  for (size_t i = 0; i < trajectories.size(); ++i) {
    const auto& [name, traj] = trajectories[i];
    const char* color = kPalette[i % std::size(kPalette)];
    svg << "  <polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& pose : traj) {
      const auto [px, py] = to_px(pose.translation().x(), pose.translation().z());
      svg << format_num(px) << ',' << format_num(py) << ' ';
    }
    svg << "\"/>\n";
    svg << "  <text x=\"" << kCanvas - 220 << "\" y=\"" << kMargin + 18 * static_cast<int>(i)
        << "\" font-size=\"12\" fill=\"" << color << "\">" << name << "</text>\n";
  }
  svg << "</svg>\n";
  if (!svg) fail(ErrorCode::IoFailure, "write failed for " + svg_path.string());

  std::filesystem::path csv_path = svg_path;
  csv_path.replace_extension(".csv");
  std::ofstream csv(csv_path, std::ios::trunc);
  if (!csv) fail(ErrorCode::IoFailure, "cannot open " + csv_path.string() + " for writing");
  csv << "trajectory,frame,x,y,z\n";
  for (const auto& [name, traj] : trajectories) {
    for (size_t f = 0; f < traj.size(); ++f) {
      const auto& t = traj[f].translation();
      csv << name << ',' << f << ',' << format_num(t.x()) << ',' << format_num(t.y()) << ',' << format_num(t.z())
          << '\n';
    }
  }
  if (!csv) fail(ErrorCode::IoFailure, "write failed for " + csv_path.string());
}

}  // namespace dfvo
