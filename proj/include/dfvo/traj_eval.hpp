#pragma once

#include <filesystem>
#include <vector>

#include "dfvo/raster.hpp"

namespace dfvo {

// Closed-form least-squares registration of predicted onto ground-truth
// positions. `scale` is the size of the prediction relative to ground
// truth, so the aligning map is
//   g_hat = rotation * p / scale + translation
// and a prediction that is everywhere 2x ground truth reports scale 2.
struct AlignmentResult {
  double scale = 1.0;
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  double residual_rmse = 0.0;
};

// Sim(3) (with_scale) or SE(3) alignment minimizing position RMSE.
AlignmentResult umeyama_align(const Trajectory& pred, const Trajectory& gt, bool with_scale);

// Applies the alignment to a full trajectory (positions scaled and moved,
// orientations rotated).
Trajectory apply_alignment(const AlignmentResult& alignment, const Trajectory& pred);

// Root-mean-square error between per-frame positions. No alignment is
// applied internally.
double ate(const Trajectory& pred, const Trajectory& gt);

struct RpeResult {
  double rpe_m = 0.0;
  double rpe_deg = 0.0;
};

// Frame-to-frame relative pose error: for each consecutive pair the error
// transform E = inverse(rel_gt) * rel_pred; reports the mean translation
// norm and mean rotation angle of E.
RpeResult rpe(const Trajectory& pred, const Trajectory& gt);

struct KittiLengthError {
  double length_m = 0.0;
  double t_err_pct = 0.0;
  double r_err_deg_per_100m = 0.0;
  int n_samples = 0;
};

struct KittiErrors {
  double t_err_pct = 0.0;
  double r_err_deg_per_100m = 0.0;
  int n_samples = 0;
  std::vector<KittiLengthError> per_length;
};

// KITTI odometry criterion: relative-pose errors over all sub-sequences of
// ground-truth path length 100..800 m, start frames stepped by `stride`.
// The end frame of a sub-sequence is the first frame whose cumulative gt
// distance reaches start + L.
KittiErrors kitti_odometry_errors(const Trajectory& pred, const Trajectory& gt, int stride = 10);

// eval_report.csv: "metric,value" rows for the headline metrics plus the
// per-length breakdown.
struct EvalReport {
  double ate_m = 0.0;
  RpeResult rpe;
  KittiErrors kitti;
  bool kitti_available = false;   // gt shorter than 100 m has no sub-sequences
  bool aligned = false;
  AlignmentResult alignment;
};

EvalReport evaluate_trajectories(const Trajectory& pred, const Trajectory& gt, const std::string& align_mode,
                                 int stride);
void write_eval_report(const EvalReport& report, const std::filesystem::path& path);

}  // namespace dfvo
