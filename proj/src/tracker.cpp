#include "dfvo/tracker.hpp"

#include <cstdio>
#include <fstream>

#include "dfvo/errors.hpp"
#include "dfvo/random.hpp"
#include "dfvo/raster_io.hpp"

namespace dfvo {
namespace {

// Stream ids for deriving per-stage RANSAC seeds from the configured seed.
enum : uint64_t { kStreamEssential = 1, kStreamPnp = 2, kStreamScale = 3 };

MatchSet filter_matches(const MatchSet& matches, const std::vector<uint8_t>& mask) {
  MatchSet out;
  out.width = matches.width;
  out.height = matches.height;
  out.finite_candidates = matches.finite_candidates;
  for (size_t i = 0; i < matches.size(); ++i) {
    if (mask[i]) out.matches.push_back(matches.matches[i]);
  }
  return out;
}

std::string format_g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

void TrackerConfig::validate() const {
  if (!(delta_f > 0.0)) fail(ErrorCode::InvalidConfig, "delta_f must be positive");
  if (top_n < 8) fail(ErrorCode::InvalidConfig, "top_n must be at least 8");
  if (border_px < 0) fail(ErrorCode::InvalidConfig, "border_px must be non-negative");
  if (!(cheirality_margin >= 0.0)) fail(ErrorCode::InvalidConfig, "cheirality_margin must be non-negative");
}

std::string_view to_string(Branch branch) {
  switch (branch) {
    case Branch::kEssentialScaled: return "ESSENTIAL_SCALED";
    case Branch::kPnp: return "PNP";
    case Branch::kFallbackConstant: return "FALLBACK_CONSTANT";
  }
  return "UNKNOWN";
}

FrameResult track_pair(const DepthMap& depth_cur, const FlowField& fwd, const FlowField& bwd,
                       const CameraIntrinsicsd& k, const TrackerConfig& config, const FrameResult* prev) {
  if (fwd.width != k.width || fwd.height != k.height || bwd.width != k.width || bwd.height != k.height ||
      depth_cur.width != k.width || depth_cur.height != k.height) {
    fail(ErrorCode::SizeMismatch, "raster sizes disagree with calibration");
  }

  FrameResult result;
  result.diagnostics.scale = 0.0;

  const ScalarField inconsistency = fb_inconsistency(fwd, bwd);

  MatchSet matches;
  bool have_matches = false;
  try {
    SelectOptions options;
    options.border_px = config.border_px;
    options.mode = config.selection;
    matches = select_best_n(fwd, inconsistency, config.top_n, options);
    have_matches = true;
  } catch (const Error&) {
    // fewer than 8 usable pixels; both solver branches are off the table
  }
  result.diagnostics.n_matches = static_cast<int>(matches.size());

  double mean_flow = 0.0;
  try {
    mean_flow = config.flow_gate == FlowGateMode::kWholeField ? mean_flow_magnitude(fwd)
                                                              : mean_match_flow_magnitude(matches);
  } catch (const Error&) {
    mean_flow = 0.0;
  }
  result.diagnostics.mean_flow = mean_flow;

  // Essential branch: E-RANSAC, 4-fold decomposition resolved by
  // cheirality, triangulation, then metric scale from the depth prior.
  const bool gate_open = mean_flow > config.delta_f;
  if (gate_open && have_matches) {
    try {
      const EssentialEstimate essential =
          estimate_essential_ransac(matches, k, config.essential, mix_seed(config.rng_seed, kStreamEssential));
      result.diagnostics.n_inliers = essential.inlier_count;
      try {
        const auto candidates = decompose_essential(essential.essential);
        const EpipolarResult pose = cheirality_select(candidates, matches, essential.inlier_mask, k,
                                                      config.cheirality_margin);
        result.diagnostics.cheirality_count = pose.cheirality_count;
        try {
          const MatchSet inlier_matches = filter_matches(matches, pose.inlier_mask);
          const RigidTransformd unit_pose = RigidTransformd::from_matrix_projected(pose.rotation, pose.t_unit);
          const TriangulationResult tri = triangulate(inlier_matches, k, unit_pose);
          const ScaleEstimate scale = recover_scale(depth_cur, inlier_matches, tri.depth_cur, config.scale,
                                                    mix_seed(config.rng_seed, kStreamScale));
          result.diagnostics.scale = scale.scale;
          result.relative_pose =
              RigidTransformd::from_matrix_projected(pose.rotation, scale.scale * pose.t_unit);
          result.branch = Branch::kEssentialScaled;
          result.diagnostics.essential_failure = EssentialFailure::kNone;
          return result;
        } catch (const Error&) {
          result.diagnostics.essential_failure = EssentialFailure::kScale;
        }
      } catch (const Error&) {
        result.diagnostics.essential_failure = EssentialFailure::kCheirality;
      }
    } catch (const Error&) {
      result.diagnostics.essential_failure = EssentialFailure::kEstimation;
    }
  } else {
    result.diagnostics.essential_failure = gate_open ? EssentialFailure::kEstimation : EssentialFailure::kFlowGate;
  }

  // PnP branch on 3D-2D correspondences from the depth prior.
  if (have_matches) {
    try {
      const std::vector<Correspondence3D2D> corrs = build_3d2d(depth_cur, matches, k);
      const PnpEstimate pnp = solve_pnp_ransac(corrs, k, config.pnp, mix_seed(config.rng_seed, kStreamPnp));
      result.relative_pose = pnp.pose;
      result.branch = Branch::kPnp;
      result.diagnostics.n_inliers = pnp.inlier_count;
      return result;
    } catch (const Error&) {
    }
  }

  // Last resort: constant motion.
  result.relative_pose = prev ? prev->relative_pose : RigidTransformd();
  result.branch = Branch::kFallbackConstant;
  return result;
}

SequenceResult run_sequence(const std::filesystem::path& sequence_dir, const TrackerConfig& config,
                            const std::filesystem::path& out_dir) {
  config.validate();
  const SequencePaths paths{sequence_dir};
  if (!std::filesystem::exists(paths.calibration())) {
    fail(ErrorCode::IoFailure, "missing calibration file " + paths.calibration().string());
  }
  const CameraIntrinsicsd k = read_calibration(paths.calibration());
  // A sequence with no pair products is a single frame; it still yields
  // the identity-initialized trajectory.
  const int n_frames = paths.count_frames();

  for (int i = 1; i < n_frames; ++i) {
    for (const auto& p : {paths.depth(i), paths.flow_fwd(i), paths.flow_bwd(i)}) {
      if (!std::filesystem::exists(p)) fail(ErrorCode::MissingFrameProduct, p.string());
    }
  }

  SequenceResult result;
  result.trajectory.push_back(RigidTransformd());
  for (int i = 1; i < n_frames; ++i) {
    const DepthMap depth = read_depth(paths.depth(i));
    const FlowField fwd = read_flow(paths.flow_fwd(i));
    const FlowField bwd = read_flow(paths.flow_bwd(i));
    const FrameResult* prev = result.frames.empty() ? nullptr : &result.frames.back();
    FrameResult frame = track_pair(depth, fwd, bwd, k, config, prev);
    result.trajectory.push_back(compose(result.trajectory.back(), frame.relative_pose));
    result.frames.push_back(std::move(frame));
  }

  std::filesystem::create_directories(out_dir);
  write_trajectory(result.trajectory, out_dir / "poses_pred.txt");
  write_diagnostics_csv(result.frames, out_dir / "diagnostics.csv");
  return result;
}

void write_diagnostics_csv(const std::vector<FrameResult>& frames, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  out << "# dfvo-diag v1\n";
  out << "frame,branch,n_matches,n_inliers,cheirality,scale,mean_flow\n";
  for (size_t i = 0; i < frames.size(); ++i) {
    const FrameDiagnostics& d = frames[i].diagnostics;
    out << (i + 1) << ',' << to_string(frames[i].branch) << ',' << d.n_matches << ',' << d.n_inliers << ','
        << d.cheirality_count << ',' << format_g9(d.scale) << ',' << format_g9(d.mean_flow) << '\n';
  }
  if (!out) fail(ErrorCode::IoFailure, "write failed for " + path.string());
}

}  // namespace dfvo
