#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "dfvo/epipolar.hpp"
#include "dfvo/flow_matching.hpp"
#include "dfvo/pnp.hpp"
#include "dfvo/raster.hpp"
#include "dfvo/scale_recovery.hpp"

namespace dfvo {

// Which reading of the mean-flow branch gate to use: the mean over the
// whole valid flow field (default) or over the selected matches only.
enum class FlowGateMode : std::uint8_t { kWholeField, kMatchesOnly };

struct TrackerConfig {
  double delta_f = 5.0;            // mean-flow gate, pixels
  int top_n = 2000;                // best-N matches
  double cheirality_margin = 0.1;  // stability margin, fraction of inliers
  int border_px = 10;
  SelectionMode selection = SelectionMode::kGlobal;
  FlowGateMode flow_gate = FlowGateMode::kWholeField;
  RansacEssentialParams essential;
  RansacPnpParams pnp;
  ScaleParams scale;
  uint64_t rng_seed = 0;

  void validate() const;
};

enum class Branch : std::uint8_t { kEssentialScaled, kPnp, kFallbackConstant };

std::string_view to_string(Branch branch);

// Why the essential branch was not used for a pair (diagnostics only).
enum class EssentialFailure : std::uint8_t {
  kNone,        // essential branch succeeded
  kFlowGate,    // mean flow below delta_f, branch not attempted
  kEstimation,  // too few matches or degenerate RANSAC
  kCheirality,  // no stable cheirality winner
  kScale,       // scale consensus failed
};

struct FrameDiagnostics {
  int n_matches = 0;
  int n_inliers = 0;
  int cheirality_count = 0;
  double scale = 0.0;
  double mean_flow = 0.0;
  EssentialFailure essential_failure = EssentialFailure::kNone;
};

struct FrameResult {
  RigidTransformd relative_pose;  // T^{i-1}_i
  Branch branch = Branch::kFallbackConstant;
  FrameDiagnostics diagnostics;
};

// One iteration of the tracking loop: inconsistency filtering, best-N
// selection, then the essential-scaled branch when the flow gate passes,
// falling through to PnP and finally to constant motion. All solver
// failures degrade through the ladder; a raster size mismatch is the only
// hard error.
FrameResult track_pair(const DepthMap& depth_cur, const FlowField& fwd, const FlowField& bwd,
                       const CameraIntrinsicsd& k, const TrackerConfig& config, const FrameResult* prev);

struct SequenceResult {
  Trajectory trajectory;             // camera-to-world, first pose identity
  std::vector<FrameResult> frames;   // one per pair, frames[i] is pair (i+1, i)
};

// Tracks a full sequence directory and writes poses_pred.txt (KITTI
// format) and diagnostics.csv into out_dir.
SequenceResult run_sequence(const std::filesystem::path& sequence_dir, const TrackerConfig& config,
                            const std::filesystem::path& out_dir);

void write_diagnostics_csv(const std::vector<FrameResult>& frames, const std::filesystem::path& path);

}  // namespace dfvo
