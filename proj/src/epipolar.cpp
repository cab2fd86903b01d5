#include "dfvo/epipolar.hpp"

#include <cmath>

#include <Eigen/SVD>

#include "dfvo/errors.hpp"
#include "dfvo/random.hpp"

namespace dfvo {
namespace {

// Row of the epipolar DLT system for e = vec(E) row-major:
// x_prev' E x_cur = 0 with homogeneous (x, y, 1).
void encode_epipolar_row(const Eigen::Vector2d& x_cur, const Eigen::Vector2d& x_prev,
                         Eigen::Matrix<double, 1, 9>& row) {
  const double x1 = x_cur.x(), y1 = x_cur.y();
  const double x2 = x_prev.x(), y2 = x_prev.y();
  row << x2 * x1, x2 * y1, x2, y2 * x1, y2 * y1, y2, x1, y1, 1.0;
}

// DLT over an index subset, then rank-2 projection. Rejects subsets whose
// epipolar system has a nullspace of dimension > 1 (coplanar or otherwise
// degenerate configurations admit a family of solutions; accepting an
// arbitrary member would poison the RANSAC consensus).
bool solve_eight_point(const std::vector<Eigen::Vector2d>& x_cur, const std::vector<Eigen::Vector2d>& x_prev,
                       const std::vector<int>& indices, EssentialMatrix& out) {
  Eigen::MatrixXd a(indices.size(), 9);
  Eigen::Matrix<double, 1, 9> row;
  for (size_t i = 0; i < indices.size(); ++i) {
    encode_epipolar_row(x_cur[indices[i]], x_prev[indices[i]], row);
    a.row(static_cast<Eigen::Index>(i)) = row;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  // sv(7) is the second-smallest singular value once the system has nine
  // columns and at least eight rows; a rank below 8 leaves the solution
  // family underdetermined. The threshold sits far below measurement
  // noise so that genuinely small-baseline data still passes through to
  // the cheirality and scale condition checks.
  const Eigen::VectorXd& sv = svd.singularValues();
  if (sv(0) <= 0.0 || sv(7) / sv(0) < 1e-12) return false;
  const Eigen::Matrix<double, 9, 1> e = svd.matrixV().col(8);
  Eigen::Matrix3d raw;
  raw << e(0), e(1), e(2), e(3), e(4), e(5), e(6), e(7), e(8);
  if (!raw.allFinite() || raw.norm() < 1e-12) return false;
  out = EssentialMatrix::project(raw);
  return true;
}

struct NormalizedMatches {
  std::vector<Eigen::Vector2d> x_cur;
  std::vector<Eigen::Vector2d> x_prev;
};

NormalizedMatches normalize_matches(const MatchSet& matches, const CameraIntrinsicsd& k) {
  NormalizedMatches out;
  out.x_cur.reserve(matches.size());
  out.x_prev.reserve(matches.size());
  for (const Match& m : matches.matches) {
    out.x_cur.push_back(normalize(k, m.p_cur));
    out.x_prev.push_back(normalize(k, m.p_prev));
  }
  return out;
}

int adaptive_iteration_bound(int inliers, int total, int sample_size, double confidence, int max_iters) {
  if (inliers <= 0 || total <= 0) return max_iters;
  const double w = static_cast<double>(inliers) / total;
  const double p_good = std::pow(w, sample_size);
  if (p_good >= 1.0) return 1;
  const double denom = std::log1p(-std::min(p_good, 1.0 - 1e-12));
  if (denom >= 0.0) return max_iters;
  const double bound = std::log(1.0 - confidence) / denom;
  if (!(bound < static_cast<double>(max_iters))) return max_iters;
  return std::max(1, static_cast<int>(std::ceil(bound)));
}

// Midpoint-free linear triangulation of one normalized correspondence
// under P_cur = [I|0], P_prev = [R|t]. Returns homogeneous X in frame i.
Eigen::Vector4d triangulate_dlt(const Eigen::Vector2d& x_cur, const Eigen::Vector2d& x_prev,
                                const Eigen::Matrix3d& r, const Eigen::Vector3d& t) {
  Eigen::Matrix4d a;
  // Rows of [I|0].
  a.row(0) << -1.0, 0.0, x_cur.x(), 0.0;
  a.row(1) << 0.0, -1.0, x_cur.y(), 0.0;
  // Rows x*P3 - P1, y*P3 - P2 of [R|t].
  a.row(2).head<3>() = x_prev.x() * r.row(2) - r.row(0);
  a.row(2)(3) = x_prev.x() * t.z() - t.x();
  a.row(3).head<3>() = x_prev.y() * r.row(2) - r.row(1);
  a.row(3)(3) = x_prev.y() * t.z() - t.y();
  Eigen::JacobiSVD<Eigen::Matrix4d> svd(a, Eigen::ComputeFullV);
  return svd.matrixV().col(3);
}

}  // namespace

EssentialMatrix EssentialMatrix::project(const Eigen::Matrix3d& raw) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(raw, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector3d s = svd.singularValues();
  const double mean = 0.5 * (s(0) + s(1));
  Eigen::Vector3d fixed(1.0, 1.0, 0.0);
  if (mean <= 0.0) fail(ErrorCode::DegenerateConfiguration, "essential projection of zero matrix");
  EssentialMatrix e;
  e.m = svd.matrixU() * fixed.asDiagonal() * svd.matrixV().transpose();
  return e;
}

double sampson_distance(const Eigen::Matrix3d& e, const Eigen::Vector2d& x_cur, const Eigen::Vector2d& x_prev) {
  const Eigen::Vector3d p1 = x_cur.homogeneous();
  const Eigen::Vector3d p2 = x_prev.homogeneous();
  const Eigen::Vector3d e_p1 = e * p1;
  const Eigen::Vector3d et_p2 = e.transpose() * p2;
  const double c = p2.dot(e_p1);
  const double denom = e_p1.head<2>().squaredNorm() + et_p2.head<2>().squaredNorm();
  if (denom <= 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(c * c / denom);
}

EssentialEstimate estimate_essential_ransac(const MatchSet& matches, const CameraIntrinsicsd& k,
                                            const RansacEssentialParams& params, uint64_t seed) {
  constexpr int kSampleSize = 8;
  const int n = static_cast<int>(matches.size());
  if (n < kSampleSize) fail(ErrorCode::TooFewMatches, "essential estimation needs at least 8 matches");

  const NormalizedMatches nm = normalize_matches(matches, k);

  Rng rng(seed);
  std::vector<int> scratch, sample;
  std::vector<uint8_t> mask(n, 0);

  auto score = [&](const EssentialMatrix& e, std::vector<uint8_t>& out_mask) {
    int count = 0;
    for (int i = 0; i < n; ++i) {
      const bool inlier = sampson_distance(e.m, nm.x_cur[i], nm.x_prev[i]) < params.threshold;
      out_mask[i] = inlier ? 1 : 0;
      count += inlier;
    }
    return count;
  };

  EssentialMatrix best{};
  int best_count = 0;
  bool have_model = false;
  int iter_bound = params.max_iters;
  for (int it = 0; it < iter_bound; ++it) {
    rng.sample_distinct(static_cast<size_t>(n), kSampleSize, scratch, sample);
    EssentialMatrix hyp;
    if (!solve_eight_point(nm.x_cur, nm.x_prev, sample, hyp)) continue;
    const int count = score(hyp, mask);
    if (count > best_count) {
      best_count = count;
      best = hyp;
      have_model = true;
      iter_bound = std::min(iter_bound,
                            it + 1 + adaptive_iteration_bound(count, n, kSampleSize, params.confidence,
                                                              params.max_iters));
    }
  }
  if (!have_model || best_count < kSampleSize) {
    fail(ErrorCode::DegenerateConfiguration, "no essential hypothesis reached 8 inliers");
  }

  // Refit on the consensus set with the same closed-form solver, then
  // re-score to produce the final mask.
  score(best, mask);
  std::vector<int> inlier_indices;
  inlier_indices.reserve(best_count);
  for (int i = 0; i < n; ++i) {
    if (mask[i]) inlier_indices.push_back(i);
  }
  EssentialMatrix refit;
  if (solve_eight_point(nm.x_cur, nm.x_prev, inlier_indices, refit)) best = refit;

  EssentialEstimate estimate;
  estimate.essential = best;
  estimate.inlier_mask.assign(n, 0);
  estimate.inlier_count = score(best, estimate.inlier_mask);
  if (estimate.inlier_count < kSampleSize) {
    fail(ErrorCode::DegenerateConfiguration, "refit essential matrix lost its consensus");
  }
  return estimate;
}

std::array<PoseCandidate, 4> decompose_essential(const EssentialMatrix& e) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(e.m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d u = svd.matrixU();
  Eigen::Matrix3d v = svd.matrixV();
  if (u.determinant() < 0.0) u = -u;
  if (v.determinant() < 0.0) v = -v;
  Eigen::Matrix3d w;
  w << 0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0;
  const Eigen::Matrix3d ra = u * w * v.transpose();
  const Eigen::Matrix3d rb = u * w.transpose() * v.transpose();
  const Eigen::Vector3d t = u.col(2).normalized();
  return {PoseCandidate{ra, t}, PoseCandidate{ra, -t}, PoseCandidate{rb, t}, PoseCandidate{rb, -t}};
}

EpipolarResult cheirality_select(const std::array<PoseCandidate, 4>& candidates, const MatchSet& matches,
                                 const std::vector<uint8_t>& inlier_mask, const CameraIntrinsicsd& k,
                                 double margin) {
  if (inlier_mask.size() != matches.size()) fail(ErrorCode::SizeMismatch, "inlier mask size mismatch");
  std::vector<int> inliers;
  for (size_t i = 0; i < inlier_mask.size(); ++i) {
    if (inlier_mask[i]) inliers.push_back(static_cast<int>(i));
  }
  if (inliers.empty()) fail(ErrorCode::AmbiguousCheirality, "no inliers to check cheirality on");

  const NormalizedMatches nm = normalize_matches(matches, k);

  std::array<int, 4> counts{};
  for (size_t c = 0; c < candidates.size(); ++c) {
    const Eigen::Matrix3d& r = candidates[c].rotation;
    const Eigen::Vector3d& t = candidates[c].t_unit;
    int front = 0;
    for (int idx : inliers) {
      const Eigen::Vector4d xh = triangulate_dlt(nm.x_cur[idx], nm.x_prev[idx], r, t);
      if (std::fabs(xh(3)) < 1e-15) continue;
      const Eigen::Vector3d x = xh.head<3>() / xh(3);
      const double z_cur = x.z();
      const double z_prev = (r * x + t).z();
      if (z_cur > 0.0 && z_prev > 0.0) ++front;
    }
    counts[c] = front;
  }

  int best = 0;
  for (int c = 1; c < 4; ++c) {
    if (counts[c] > counts[best]) best = c;
  }
  int second = -1;
  for (int c = 0; c < 4; ++c) {
    if (c != best && (second < 0 || counts[c] > counts[second])) second = c;
  }
  const double lead = static_cast<double>(counts[best] - counts[second]);
  if (lead < margin * static_cast<double>(inliers.size())) {
    fail(ErrorCode::AmbiguousCheirality,
         "cheirality counts " + std::to_string(counts[best]) + " vs " + std::to_string(counts[second]) +
             " over " + std::to_string(inliers.size()) + " inliers");
  }

  EpipolarResult result;
  result.rotation = candidates[best].rotation;
  result.t_unit = candidates[best].t_unit;
  result.inlier_mask = inlier_mask;
  result.cheirality_count = counts[best];
  return result;
}

TriangulationResult triangulate(const MatchSet& matches, const CameraIntrinsicsd& k, const RigidTransformd& rel,
                                double min_parallax_deg) {
  const Eigen::Matrix3d& r = rel.rotation();
  const Eigen::Vector3d& t = rel.translation();
  if (t.norm() < 1e-15) fail(ErrorCode::ZeroBaseline, "triangulation with zero baseline");

  const NormalizedMatches nm = normalize_matches(matches, k);
  const Eigen::Vector3d center_prev = -(r.transpose() * t);  // camera i-1 in frame-i coordinates
  const double min_parallax_rad = min_parallax_deg * EIGEN_PI / 180.0;

  TriangulationResult result;
  result.depth_cur.assign(matches.size(), 0.0);
  for (size_t i = 0; i < matches.size(); ++i) {
    const Eigen::Vector4d xh = triangulate_dlt(nm.x_cur[i], nm.x_prev[i], r, t);
    if (std::fabs(xh(3)) < 1e-15) continue;
    const Eigen::Vector3d x = xh.head<3>() / xh(3);
    const double z_cur = x.z();
    const double z_prev = (r * x + t).z();
    if (z_cur <= 0.0 || z_prev <= 0.0) continue;
    const Eigen::Vector3d ray_cur = x.normalized();
    const Eigen::Vector3d ray_prev = (x - center_prev).normalized();
    const double cos_parallax = std::clamp(ray_cur.dot(ray_prev), -1.0, 1.0);
    if (std::acos(cos_parallax) < min_parallax_rad) continue;
    result.depth_cur[i] = z_cur;
    ++result.valid_count;
  }
  return result;
}

}  // namespace dfvo
