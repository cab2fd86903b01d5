#include "dfvo/traj_eval.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <Eigen/SVD>

#include "dfvo/errors.hpp"

namespace dfvo {
namespace {

void require_equal_lengths(const Trajectory& pred, const Trajectory& gt, size_t minimum, const char* what) {
  if (pred.size() != gt.size()) {
    fail(ErrorCode::LengthMismatch, std::string(what) + ": trajectory lengths " + std::to_string(pred.size()) +
                                        " vs " + std::to_string(gt.size()));
  }
  if (pred.size() < minimum) {
    fail(ErrorCode::LengthMismatch,
         std::string(what) + ": needs at least " + std::to_string(minimum) + " poses");
  }
}

std::string format_g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

AlignmentResult umeyama_align(const Trajectory& pred, const Trajectory& gt, bool with_scale) {
  require_equal_lengths(pred, gt, 3, "umeyama_align");
  const size_t n = pred.size();
  const double inv_n = 1.0 / static_cast<double>(n);

  Eigen::Vector3d mean_p = Eigen::Vector3d::Zero();
  Eigen::Vector3d mean_g = Eigen::Vector3d::Zero();
  for (size_t i = 0; i < n; ++i) {
    mean_p += pred[i].translation();
    mean_g += gt[i].translation();
  }
  mean_p *= inv_n;
  mean_g *= inv_n;

  // Cross-covariance mapping pred deviations onto gt deviations, plus the
  // pred variance for the scale estimate.
  Eigen::Matrix3d sigma = Eigen::Matrix3d::Zero();
  double var_p = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const Eigen::Vector3d dp = pred[i].translation() - mean_p;
    const Eigen::Vector3d dg = gt[i].translation() - mean_g;
    sigma += dg * dp.transpose();
    var_p += dp.squaredNorm();
  }
  sigma *= inv_n;
  var_p *= inv_n;

  Eigen::JacobiSVD<Eigen::Matrix3d> svd(sigma, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector3d d = svd.singularValues();
  // Rotation recovery needs the positions to span at least a plane;
  // collinear (rank <= 1) geometry leaves it underdetermined.
  if (!(d(0) > 0.0) || d(1) <= d(0) * 1e-12 || !(var_p > 0.0)) {
    fail(ErrorCode::DegenerateGeometry, "positions are rank-deficient for alignment");
  }
  Eigen::Matrix3d s = Eigen::Matrix3d::Identity();
  if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0.0) s(2, 2) = -1.0;

  AlignmentResult result;
  result.rotation = svd.matrixU() * s * svd.matrixV().transpose();
  const double c = with_scale ? (d.asDiagonal().toDenseMatrix() * s).trace() / var_p : 1.0;
  if (!(c > 0.0)) fail(ErrorCode::DegenerateGeometry, "non-positive alignment scale");
  result.scale = 1.0 / c;  // size of pred relative to gt
  result.translation = mean_g - c * (result.rotation * mean_p);

  double sq_sum = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const Eigen::Vector3d mapped = c * (result.rotation * pred[i].translation()) + result.translation;
    sq_sum += (mapped - gt[i].translation()).squaredNorm();
  }
  result.residual_rmse = std::sqrt(sq_sum * inv_n);
  return result;
}

Trajectory apply_alignment(const AlignmentResult& alignment, const Trajectory& pred) {
  Trajectory out;
  out.reserve(pred.size());
  const double c = 1.0 / alignment.scale;
  for (const auto& pose : pred) {
    out.push_back(RigidTransformd::from_matrix_projected(
        alignment.rotation * pose.rotation(),
        c * (alignment.rotation * pose.translation()) + alignment.translation));
  }
  return out;
}

double ate(const Trajectory& pred, const Trajectory& gt) {
  require_equal_lengths(pred, gt, 1, "ate");
  double sq_sum = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) {
    sq_sum += (pred[i].translation() - gt[i].translation()).squaredNorm();
  }
  return std::sqrt(sq_sum / static_cast<double>(pred.size()));
}

RpeResult rpe(const Trajectory& pred, const Trajectory& gt) {
  require_equal_lengths(pred, gt, 2, "rpe");
  RpeResult result;
  const size_t pairs = pred.size() - 1;
  for (size_t i = 1; i < pred.size(); ++i) {
    const RigidTransformd rel_pred = compose(inverse(pred[i - 1]), pred[i]);
    const RigidTransformd rel_gt = compose(inverse(gt[i - 1]), gt[i]);
    const RigidTransformd error = compose(inverse(rel_gt), rel_pred);
    result.rpe_m += error.translation().norm();
    result.rpe_deg += rotation_angle_deg(error.rotation());
  }
  result.rpe_m /= static_cast<double>(pairs);
  result.rpe_deg /= static_cast<double>(pairs);
  return result;
}

KittiErrors kitti_odometry_errors(const Trajectory& pred, const Trajectory& gt, int stride) {
  require_equal_lengths(pred, gt, 2, "kitti_odometry_errors");
  if (stride < 1) fail(ErrorCode::InvalidConfig, "stride must be at least 1");

  const size_t n = gt.size();
  std::vector<double> dist(n, 0.0);
  for (size_t i = 1; i < n; ++i) {
    dist[i] = dist[i - 1] + (gt[i].translation() - gt[i - 1].translation()).norm();
  }

  constexpr double kLengths[] = {100.0, 200.0, 300.0, 400.0, 500.0, 600.0, 700.0, 800.0};

  KittiErrors errors;
  for (double length : kLengths) {
    errors.per_length.push_back({length, 0.0, 0.0, 0});
  }

  for (size_t first = 0; first < n; first += static_cast<size_t>(stride)) {
    for (size_t li = 0; li < std::size(kLengths); ++li) {
      const double length = kLengths[li];
      // First frame whose cumulative gt distance reaches start + L.
      size_t last = n;
      for (size_t i = first + 1; i < n; ++i) {
        if (dist[i] >= dist[first] + length) {
          last = i;
          break;
        }
      }
      if (last == n) continue;

      const RigidTransformd delta_pred = compose(inverse(pred[first]), pred[last]);
      const RigidTransformd delta_gt = compose(inverse(gt[first]), gt[last]);
      const RigidTransformd error = compose(inverse(delta_gt), delta_pred);

      const double t_err = 100.0 * error.translation().norm() / length;               // percent
      const double r_err = 100.0 * rotation_angle_deg(error.rotation()) / length;     // deg per 100 m

      errors.per_length[li].t_err_pct += t_err;
      errors.per_length[li].r_err_deg_per_100m += r_err;
      errors.per_length[li].n_samples += 1;
      errors.t_err_pct += t_err;
      errors.r_err_deg_per_100m += r_err;
      errors.n_samples += 1;
    }
  }

  if (errors.n_samples == 0) {
    fail(ErrorCode::SequenceTooShort, "ground-truth path has no sub-sequence of 100 m");
  }
  errors.t_err_pct /= errors.n_samples;
  errors.r_err_deg_per_100m /= errors.n_samples;
  for (auto& p : errors.per_length) {
    if (p.n_samples > 0) {
      p.t_err_pct /= p.n_samples;
      p.r_err_deg_per_100m /= p.n_samples;
    }
  }
  return errors;
}

EvalReport evaluate_trajectories(const Trajectory& pred, const Trajectory& gt, const std::string& align_mode,
                                 int stride) {
  EvalReport report;
  Trajectory aligned = pred;
  if (align_mode == "7dof" || align_mode == "6dof") {
    report.alignment = umeyama_align(pred, gt, align_mode == "7dof");
    aligned = apply_alignment(report.alignment, pred);
    report.aligned = true;
  } else if (align_mode != "none") {
    fail(ErrorCode::BadArguments, "align mode must be one of 6dof, 7dof, none");
  }
  report.ate_m = ate(aligned, gt);
  if (aligned.size() >= 2) report.rpe = rpe(aligned, gt);
  try {
    report.kitti = kitti_odometry_errors(aligned, gt, stride);
    report.kitti_available = true;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::SequenceTooShort) throw;
  }
  return report;
}

void write_eval_report(const EvalReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  out << "metric,value\n";
  out << "ate_m," << format_g9(report.ate_m) << '\n';
  out << "rpe_m," << format_g9(report.rpe.rpe_m) << '\n';
  out << "rpe_deg," << format_g9(report.rpe.rpe_deg) << '\n';
  if (report.kitti_available) {
    out << "t_err_pct," << format_g9(report.kitti.t_err_pct) << '\n';
    out << "r_err_deg_per_100m," << format_g9(report.kitti.r_err_deg_per_100m) << '\n';
    for (const auto& p : report.kitti.per_length) {
      if (p.n_samples == 0) continue;
      const int length = static_cast<int>(p.length_m);
      out << "t_err_pct_" << length << "m," << format_g9(p.t_err_pct) << '\n';
      out << "r_err_deg_per_100m_" << length << "m," << format_g9(p.r_err_deg_per_100m) << '\n';
    }
  }
  if (report.aligned) {
    out << "align_scale," << format_g9(report.alignment.scale) << '\n';
    out << "align_rmse_m," << format_g9(report.alignment.residual_rmse) << '\n';
  }
  if (!out) fail(ErrorCode::IoFailure, "write failed for " + path.string());
}

}  // namespace dfvo
