#include "dfvo/pnp.hpp"

#include <cmath>
#include <limits>

#include <Eigen/SVD>

#include "dfvo/errors.hpp"
#include "dfvo/random.hpp"

namespace dfvo {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kSampleSize = 6;

// DLT for the 3x4 projection matrix from >= 6 3D-2D correspondences, in
// normalized pixel coordinates so the result is [R|t] up to scale. The
// scale and sign are fixed so the third rotation row has unit norm and
// the sample points sit in front of the camera; the rotation block is
// projected onto SO(3).
bool solve_dlt_pose(std::span<const Correspondence3D2D> corrs, const CameraIntrinsicsd& k,
                    const std::vector<int>& indices, RigidTransformd& out) {
  Eigen::MatrixXd a(2 * indices.size(), 12);
  for (size_t i = 0; i < indices.size(); ++i) {
    const Correspondence3D2D& c = corrs[indices[i]];
    const Eigen::Vector2d xn = normalize(k, c.p_prev);
    const Eigen::RowVector4d xh(c.x.x(), c.x.y(), c.x.z(), 1.0);
    a.row(2 * i).setZero();
    a.row(2 * i + 1).setZero();
    a.block<1, 4>(2 * i, 0) = xh;
    a.block<1, 4>(2 * i, 8) = -xn.x() * xh;
    a.block<1, 4>(2 * i + 1, 4) = xh;
    a.block<1, 4>(2 * i + 1, 8) = -xn.y() * xh;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  // A coplanar-degenerate sample leaves a nullspace of dimension > 1.
  const Eigen::VectorXd& sv = svd.singularValues();
  if (sv(0) <= 0.0 || sv(10) / sv(0) < 1e-9) return false;
  const Eigen::Matrix<double, 12, 1> p = svd.matrixV().col(11);
  Eigen::Matrix<double, 3, 4> pm;
  pm.row(0) = p.segment<4>(0);
  pm.row(1) = p.segment<4>(4);
  pm.row(2) = p.segment<4>(8);

  Eigen::Matrix3d m = pm.leftCols<3>();
  if (m.determinant() < 0.0) {
    pm = -pm;
    m = -m;
  }
  const double row_norm = m.row(2).norm();
  if (row_norm < 1e-12) return false;
  pm /= row_norm;
  m /= row_norm;

  const Eigen::Matrix3d r = nearest_rotation(m);
  const Eigen::Vector3d t = pm.col(3);

  // Mirror guard: most of the sample must be in front of the camera.
  int front = 0;
  for (int idx : indices) {
    if ((r * corrs[idx].x + t).z() > 0.0) ++front;
  }
  if (front * 2 < static_cast<int>(indices.size())) return false;

  out = RigidTransformd(r, t);
  return true;
}

double inlier_cost(const Eigen::VectorXd& residuals, const std::vector<int>& inliers) {
  double cost = 0.0;
  for (int idx : inliers) {
    const double r = residuals(idx);
    if (!std::isfinite(r)) return kInf;
    cost += r * r;
  }
  return cost;
}

// Gauss-Newton on the sum of squared pixel residuals over the inlier set,
// pose updated by a left-multiplied twist. Backtracks on cost increase so
// the objective is non-increasing.
RigidTransformd refine_pose(const RigidTransformd& initial, const CameraIntrinsicsd& k,
                            std::span<const Correspondence3D2D> corrs, const std::vector<int>& inliers,
                            const RansacPnpParams& params) {
  RigidTransformd pose = initial;
  Eigen::VectorXd residuals = reprojection_residuals(pose, k, corrs);
  double cost = inlier_cost(residuals, inliers);
  if (!std::isfinite(cost)) return pose;

  for (int it = 0; it < params.gn_max_iters; ++it) {
    const Eigen::MatrixXd jac = reprojection_jacobian(pose, k, corrs);
    Eigen::Matrix<double, 6, 6> h = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 1> g = Eigen::Matrix<double, 6, 1>::Zero();
    for (int idx : inliers) {
      const Eigen::Vector2d obs = corrs[idx].p_prev;
      const Eigen::Vector3d xc = pose * corrs[idx].x;
      if (xc.z() <= 1e-9) continue;
      const Eigen::Vector2d pred = project(k, xc);
      const Eigen::Vector2d res = pred - obs;
      const Eigen::Matrix<double, 2, 6> j = jac.block<2, 6>(2 * idx, 0);
      h += j.transpose() * j;
      g += j.transpose() * res;
    }
    const Eigen::Matrix<double, 6, 1> step = h.ldlt().solve(-g);
    if (!step.allFinite()) break;
    if (step.norm() < params.gn_step_tol) break;

    double alpha = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 10; ++bt) {
      const RigidTransformd trial = compose(exp_se3<double>(alpha * step), pose);
      const Eigen::VectorXd trial_res = reprojection_residuals(trial, k, corrs);
      const double trial_cost = inlier_cost(trial_res, inliers);
      if (trial_cost <= cost) {
        pose = trial;
        residuals = trial_res;
        cost = trial_cost;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;
  }
  return pose;
}

int adaptive_iteration_bound(int inliers, int total, double confidence, int max_iters) {
  if (inliers <= 0 || total <= 0) return max_iters;
  const double w = static_cast<double>(inliers) / total;
  const double p_good = std::pow(w, kSampleSize);
  if (p_good >= 1.0) return 1;
  const double denom = std::log1p(-std::min(p_good, 1.0 - 1e-12));
  if (denom >= 0.0) return max_iters;
  const double bound = std::log(1.0 - confidence) / denom;
  if (!(bound < static_cast<double>(max_iters))) return max_iters;
  return std::max(1, static_cast<int>(std::ceil(bound)));
}

}  // namespace

std::vector<Correspondence3D2D> build_3d2d(const DepthMap& depth, const MatchSet& matches,
                                           const CameraIntrinsicsd& k) {
  std::vector<Correspondence3D2D> corrs;
  corrs.reserve(matches.size());
  for (const Match& m : matches.matches) {
    const int px = static_cast<int>(std::lround(m.p_cur.x()));
    const int py = static_cast<int>(std::lround(m.p_cur.y()));
    if (px < 0 || px >= depth.width || py < 0 || py >= depth.height) continue;
    const float d = depth.at(px, py);
    if (!(d > 0.0f)) continue;
    corrs.push_back({backproject(k, m.p_cur, static_cast<double>(d)), m.p_prev});
  }
  if (corrs.size() < kSampleSize) {
    fail(ErrorCode::TooFewCorrespondences,
         "only " + std::to_string(corrs.size()) + " matches carry valid depth");
  }
  return corrs;
}

Eigen::VectorXd reprojection_residuals(const RigidTransformd& pose, const CameraIntrinsicsd& k,
                                       std::span<const Correspondence3D2D> corrs) {
  Eigen::VectorXd residuals(corrs.size());
  for (size_t i = 0; i < corrs.size(); ++i) {
    const Eigen::Vector3d xc = pose * corrs[i].x;
    if (xc.z() <= 1e-9) {
      residuals(i) = kInf;
      continue;
    }
    residuals(i) = (project(k, xc) - corrs[i].p_prev).norm();
  }
  return residuals;
}

Eigen::MatrixXd reprojection_jacobian(const RigidTransformd& pose, const CameraIntrinsicsd& k,
                                      std::span<const Correspondence3D2D> corrs) {
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(2 * corrs.size(), 6);
  for (size_t i = 0; i < corrs.size(); ++i) {
    const Eigen::Vector3d xc = pose * corrs[i].x;
    const double z = xc.z();
    if (z <= 1e-9) continue;
    Eigen::Matrix<double, 2, 3> proj;
    proj << k.fx / z, 0.0, -k.fx * xc.x() / (z * z),
            0.0, k.fy / z, -k.fy * xc.y() / (z * z);
    Eigen::Matrix<double, 3, 6> point;  // d(exp(xi) * xc)/d xi at xi = 0
    point.leftCols<3>() = Eigen::Matrix3d::Identity();
    point.rightCols<3>() = -skew(xc);
    jac.block<2, 6>(2 * i, 0) = proj * point;
  }
  return jac;
}

PnpEstimate solve_pnp_ransac(std::span<const Correspondence3D2D> corrs, const CameraIntrinsicsd& k,
                             const RansacPnpParams& params, uint64_t seed) {
  const int n = static_cast<int>(corrs.size());
  if (n < kSampleSize) fail(ErrorCode::TooFewCorrespondences, "PnP needs at least 6 correspondences");

  Rng rng(seed);
  std::vector<int> scratch, sample;

  auto count_inliers = [&](const RigidTransformd& pose, std::vector<uint8_t>* out_mask) {
    const Eigen::VectorXd residuals = reprojection_residuals(pose, k, corrs);
    int count = 0;
    for (int i = 0; i < n; ++i) {
      const bool inlier = residuals(i) < params.px_threshold;
      if (out_mask) (*out_mask)[i] = inlier ? 1 : 0;
      count += inlier;
    }
    return count;
  };

  RigidTransformd best;
  int best_count = 0;
  bool have_model = false;
  int iter_bound = params.max_iters;
  for (int it = 0; it < iter_bound; ++it) {
    rng.sample_distinct(static_cast<size_t>(n), kSampleSize, scratch, sample);
    RigidTransformd hyp;
    if (!solve_dlt_pose(corrs, k, sample, hyp)) continue;  // degenerate sample, retry
    const int count = count_inliers(hyp, nullptr);
    if (count > best_count) {
      best_count = count;
      best = hyp;
      have_model = true;
      iter_bound = std::min(iter_bound, it + 1 + adaptive_iteration_bound(count, n, params.confidence,
                                                                          params.max_iters));
    }
  }
  if (!have_model || best_count < kSampleSize) {
    fail(ErrorCode::DegenerateConfiguration, "no PnP hypothesis reached 6 inliers");
  }

  std::vector<uint8_t> mask(n, 0);
  count_inliers(best, &mask);
  std::vector<int> inliers;
  inliers.reserve(best_count);
  for (int i = 0; i < n; ++i) {
    if (mask[i]) inliers.push_back(i);
  }

  PnpEstimate estimate;
  estimate.pose = refine_pose(best, k, corrs, inliers, params);
  estimate.inlier_mask.assign(n, 0);
  estimate.inlier_count = count_inliers(estimate.pose, &estimate.inlier_mask);
  if (estimate.inlier_count < kSampleSize) {
    fail(ErrorCode::DegenerateConfiguration, "refined PnP pose lost its consensus");
  }
  return estimate;
}

}  // namespace dfvo
