#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "dfvo/raster.hpp"

namespace dfvo {

// Essential matrix with singular values projected to (1, 1, 0), i.e.
// Frobenius norm sqrt(2). Satisfies x_prev' E x_cur = 0 for normalized
// correspondences, with the relative pose oriented frame i -> frame i-1:
// X_prev = R X_cur + t and E = [t]x R.
struct EssentialMatrix {
  Eigen::Matrix3d m;

  // Nearest rank-2 essential matrix: singular values (s1, s2, s3) are
  // replaced by ((s1+s2)/2, (s1+s2)/2, 0), then scaled to norm sqrt(2).
  static EssentialMatrix project(const Eigen::Matrix3d& raw);
};

struct RansacEssentialParams {
  double threshold = 1e-4;  // Sampson distance, normalized coordinates
  int max_iters = 1000;
  double confidence = 0.999;
};

struct EssentialEstimate {
  EssentialMatrix essential;
  std::vector<uint8_t> inlier_mask;  // one per match
  int inlier_count = 0;
};

// Normalized 8-point algorithm wrapped in RANSAC. Deterministic given the
// seed; the winning hypothesis is the (inlier_count, lowest iteration)
// maximum, refit on its inliers and re-scored.
EssentialEstimate estimate_essential_ransac(const MatchSet& matches, const CameraIntrinsicsd& k,
                                            const RansacEssentialParams& params, uint64_t seed);

struct PoseCandidate {
  Eigen::Matrix3d rotation;
  Eigen::Vector3d t_unit;
};

// The standard 4-fold decomposition {Ra, Rb} x {+t, -t}; both rotations
// have determinant +1.
std::array<PoseCandidate, 4> decompose_essential(const EssentialMatrix& e);

struct EpipolarResult {
  Eigen::Matrix3d rotation;
  Eigen::Vector3d t_unit;
  std::vector<uint8_t> inlier_mask;
  int cheirality_count = 0;  // inliers with positive depth in both views
};

// Scores all four candidates by the number of triangulated points in front
// of both cameras and keeps the winner. Throws AmbiguousCheirality when
// the winner beats the runner-up by less than margin * inlier count.
EpipolarResult cheirality_select(const std::array<PoseCandidate, 4>& candidates, const MatchSet& matches,
                                 const std::vector<uint8_t>& inlier_mask, const CameraIntrinsicsd& k,
                                 double margin);

struct TriangulationResult {
  // Depth of each match in the current frame i; 0 marks invalid points
  // (behind either camera or parallax below min_parallax_deg).
  std::vector<double> depth_cur;
  int valid_count = 0;
};

// Linear two-view DLT triangulation of every match under the relative
// pose T^{i-1}_i.
TriangulationResult triangulate(const MatchSet& matches, const CameraIntrinsicsd& k, const RigidTransformd& rel,
                                double min_parallax_deg = 0.05);

// Sampson distance (first-order geometric epipolar error) in normalized
// coordinates, for one correspondence.
double sampson_distance(const Eigen::Matrix3d& e, const Eigen::Vector2d& x_cur, const Eigen::Vector2d& x_prev);

}  // namespace dfvo
