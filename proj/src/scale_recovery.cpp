#include "dfvo/scale_recovery.hpp"

#include <algorithm>
#include <cmath>

#include "dfvo/errors.hpp"
#include "dfvo/random.hpp"

namespace dfvo {

ScaleEstimate recover_scale(const DepthMap& depth, const MatchSet& matches, const std::vector<double>& tri_depths,
                            const ScaleParams& params, uint64_t seed) {
  if (tri_depths.size() != matches.size()) fail(ErrorCode::SizeMismatch, "triangulated depth count mismatch");

  std::vector<int> pair_index;   // index into matches
  std::vector<double> ratios;
  for (size_t i = 0; i < matches.size(); ++i) {
    if (!(tri_depths[i] > 0.0)) continue;
    const int px = static_cast<int>(std::lround(matches.matches[i].p_cur.x()));
    const int py = static_cast<int>(std::lround(matches.matches[i].p_cur.y()));
    if (px < 0 || px >= depth.width || py < 0 || py >= depth.height) continue;
    const double d = depth.at(px, py);
    if (!(d >= params.depth_min) || !(d <= params.depth_max)) continue;
    pair_index.push_back(static_cast<int>(i));
    ratios.push_back(d / tri_depths[i]);
  }
  const int n = static_cast<int>(ratios.size());
  if (n < 10) fail(ErrorCode::TooFewValidPairs, "only " + std::to_string(n) + " valid depth pairs");

  auto count_inliers = [&](double hypothesis, std::vector<uint8_t>* flags) {
    int count = 0;
    for (int i = 0; i < n; ++i) {
      const bool inlier = std::fabs(ratios[i] / hypothesis - 1.0) < params.rel_tol;
      if (flags) (*flags)[i] = inlier ? 1 : 0;
      count += inlier;
    }
    return count;
  };

  Rng rng(seed);
  double best_hypothesis = 0.0;
  int best_count = -1;
  const int iters = std::min(params.max_iters, n);
  for (int it = 0; it < iters; ++it) {
    const double hypothesis = ratios[rng.bounded(static_cast<uint64_t>(n))];
    if (!(hypothesis > 0.0)) continue;
    const int count = count_inliers(hypothesis, nullptr);
    if (count > best_count) {
      best_count = count;
      best_hypothesis = hypothesis;
    }
  }
  if (best_count <= 0) fail(ErrorCode::ScaleConsensusFailure, "no positive ratio hypothesis");

  std::vector<uint8_t> flags(n, 0);
  count_inliers(best_hypothesis, &flags);

  std::vector<double> consensus;
  consensus.reserve(best_count);
  for (int i = 0; i < n; ++i) {
    if (flags[i]) consensus.push_back(ratios[i]);
  }
  // Lower median: exact scale equivariance (a single element is picked,
  // never averaged).
  std::nth_element(consensus.begin(), consensus.begin() + (consensus.size() - 1) / 2, consensus.end());
  const double scale = consensus[(consensus.size() - 1) / 2];

  ScaleEstimate estimate;
  estimate.scale = scale;
  estimate.n_valid_pairs = n;
  estimate.inlier_fraction = static_cast<double>(best_count) / static_cast<double>(n);
  estimate.inlier_mask.assign(matches.size(), 0);
  for (int i = 0; i < n; ++i) {
    if (flags[i]) estimate.inlier_mask[pair_index[i]] = 1;
  }
  if (estimate.inlier_fraction < params.min_inlier_frac) {
    fail(ErrorCode::ScaleConsensusFailure,
         "scale inlier fraction " + std::to_string(estimate.inlier_fraction) + " below threshold");
  }
  return estimate;
}

}  // namespace dfvo
