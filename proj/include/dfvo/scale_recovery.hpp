#pragma once

#include <cstdint>
#include <vector>

#include "dfvo/raster.hpp"

namespace dfvo {

struct ScaleParams {
  double rel_tol = 0.1;         // inlier band |r/s - 1| around a hypothesis
  double min_inlier_frac = 0.2; // consensus below this is a failure
  int max_iters = 100;
  double depth_min = 0.1;       // provided-depth validity window, meters
  double depth_max = 200.0;
};

struct ScaleEstimate {
  double scale = 0.0;
  double inlier_fraction = 0.0;
  int n_valid_pairs = 0;
  // Per-match flags (aligned with the input match list): 1 where the pair
  // was valid and agreed with the consensus scale.
  std::vector<uint8_t> inlier_mask;
};

// Metric scale aligning triangulated depths with provided depths: 1-point
// RANSAC over per-match ratios D_i / D'_i, refined as the (lower) median
// of the consensus ratios. Median and ratio tests are scale-equivariant,
// so recover_scale(a*D, D') = a * recover_scale(D, D').
ScaleEstimate recover_scale(const DepthMap& depth, const MatchSet& matches, const std::vector<double>& tri_depths,
                            const ScaleParams& params, uint64_t seed);

}  // namespace dfvo
