#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dfvo/raster.hpp"

namespace dfvo {

// 3D point in the current frame i paired with its observed projection in
// the previous frame i-1.
struct Correspondence3D2D {
  Point3 x;
  Pixel p_prev;
};

// Backprojects each match through the provided depth map (nearest-pixel
// lookup) and drops matches with invalid depth. Throws when fewer than 6
// correspondences survive.
std::vector<Correspondence3D2D> build_3d2d(const DepthMap& depth, const MatchSet& matches,
                                           const CameraIntrinsicsd& k);

// Per-point pixel reprojection error under pose T (frame i -> frame i-1):
// r_i = | project(K, R x_i + t) - p_prev_i |. Points that transform to
// non-positive depth get +inf.
Eigen::VectorXd reprojection_residuals(const RigidTransformd& pose, const CameraIntrinsicsd& k,
                                       std::span<const Correspondence3D2D> corrs);

// Analytic Jacobian of the stacked 2n residual vector with respect to a
// left-multiplied twist [v, w] at the given pose. Rows of points behind
// the camera are zero (they carry infinite residual and are excluded from
// refinement).
Eigen::MatrixXd reprojection_jacobian(const RigidTransformd& pose, const CameraIntrinsicsd& k,
                                      std::span<const Correspondence3D2D> corrs);

struct RansacPnpParams {
  double px_threshold = 2.0;
  int max_iters = 1000;
  double confidence = 0.999;
  int gn_max_iters = 20;
  double gn_step_tol = 1e-10;
};

struct PnpEstimate {
  RigidTransformd pose;  // T^{i-1}_i, metric
  std::vector<uint8_t> inlier_mask;
  int inlier_count = 0;
};

// 6-point DLT minimal solver inside RANSAC, followed by Gauss-Newton
// refinement of the reprojection objective over the consensus set.
// Deterministic given the seed.
PnpEstimate solve_pnp_ransac(std::span<const Correspondence3D2D> corrs, const CameraIntrinsicsd& k,
                             const RansacPnpParams& params, uint64_t seed);

}  // namespace dfvo
