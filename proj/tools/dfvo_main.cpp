#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dfvo/config.hpp"
#include "dfvo/errors.hpp"
#include "dfvo/raster_io.hpp"
#include "dfvo/svg_plot.hpp"
#include "dfvo/synth.hpp"
#include "dfvo/tracker.hpp"
#include "dfvo/traj_eval.hpp"

namespace {

int run_subcommands(int argc, char** argv) {
  CLI::App app{"Monocular visual odometry from depth and optical-flow products"};
  app.require_subcommand(1);

  std::string config_path, out_path, seq_path, pred_path, gt_path;
  std::string align_mode = "none";
  int stride = 10;
  std::vector<std::string> traj_paths;

  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic sequence");
  synth->add_option("--config", config_path, "scene config file")->required();
  synth->add_option("--out", out_path, "output sequence directory")->required();

  CLI::App* run = app.add_subcommand("run", "Track a sequence directory");
  run->add_option("--seq", seq_path, "sequence directory")->required();
  run->add_option("--config", config_path, "tracker config file")->required();
  run->add_option("--out", out_path, "output directory")->required();

  CLI::App* eval = app.add_subcommand("eval", "Evaluate a trajectory against ground truth");
  eval->add_option("--pred", pred_path, "predicted trajectory")->required();
  eval->add_option("--gt", gt_path, "ground-truth trajectory")->required();
  eval->add_option("--align", align_mode, "alignment: 6dof, 7dof or none")
      ->check(CLI::IsMember({"6dof", "7dof", "none"}));
  eval->add_option("--stride", stride, "start-frame stride for the KITTI criterion");
  eval->add_option("--out", out_path, "report path (default eval_report.csv)");

  CLI::App* plot = app.add_subcommand("plot", "Plot trajectories as a top-down SVG");
  plot->add_option("--traj", traj_paths, "trajectory files")->required()->expected(-1);
  plot->add_option("--out", out_path, "output SVG path")->required();

  app.parse(argc, argv);

  if (*synth) {
    const dfvo::SceneConfig config = dfvo::scene_config_from_file(config_path);
    dfvo::generate_sequence(config, out_path);
    std::cout << "wrote " << config.n_frames << " frames to " << out_path << "\n";
    return 0;
  }

  if (*run) {
    const dfvo::TrackerConfig config = dfvo::tracker_config_from_file(config_path);
    const dfvo::SequenceResult result = dfvo::run_sequence(seq_path, config, out_path);
    int essential = 0, pnp = 0, fallback = 0;
    for (const auto& frame : result.frames) {
      switch (frame.branch) {
        case dfvo::Branch::kEssentialScaled: ++essential; break;
        case dfvo::Branch::kPnp: ++pnp; break;
        case dfvo::Branch::kFallbackConstant: ++fallback; break;
      }
    }
    std::cout << "tracked " << result.trajectory.size() << " poses (essential " << essential << ", pnp " << pnp
              << ", fallback " << fallback << ") -> " << out_path << "\n";
    return 0;
  }

  if (*eval) {
    const dfvo::Trajectory pred = dfvo::read_trajectory(pred_path);
    const dfvo::Trajectory gt = dfvo::read_trajectory(gt_path);
    const dfvo::EvalReport report = dfvo::evaluate_trajectories(pred, gt, align_mode, stride);
    const std::filesystem::path report_path = out_path.empty() ? "eval_report.csv" : out_path;
    dfvo::write_eval_report(report, report_path);
    std::printf("ate_m %.9g\nrpe_m %.9g\nrpe_deg %.9g\n", report.ate_m, report.rpe.rpe_m, report.rpe.rpe_deg);
    if (report.kitti_available) {
      std::printf("t_err_pct %.9g\nr_err_deg_per_100m %.9g\n", report.kitti.t_err_pct,
                  report.kitti.r_err_deg_per_100m);
    }
    std::cout << "report -> " << report_path.string() << "\n";
    return 0;
  }

  if (*plot) {
    std::vector<std::pair<std::string, dfvo::Trajectory>> trajectories;
    for (const std::string& path : traj_paths) {
      trajectories.emplace_back(std::filesystem::path(path).stem().string(), dfvo::read_trajectory(path));
    }
    dfvo::write_trajectory_plot(trajectories, out_path);
    std::cout << "plot -> " << out_path << "\n";
    return 0;
  }

  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_subcommands(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return 0;  // --help
    std::cerr << "ERROR: BadArguments: " << e.what() << "\n";
    return 1;
  } catch (const dfvo::Error& e) {
    std::cerr << "ERROR: " << dfvo::to_string(e.code()) << ": " << e.detail() << "\n";
    return dfvo::is_io_error(e.code()) ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "ERROR: Internal: " << e.what() << "\n";
    return 1;
  }
}
