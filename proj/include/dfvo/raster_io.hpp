#pragma once

#include <filesystem>
#include <string>

#include "dfvo/raster.hpp"

namespace dfvo {

// File formats are pinned little-endian regardless of host.
//
//   flow:  Middlebury .flo — float32 magic 202021.25, int32 width, int32
//          height, then width*height interleaved (du, dv) float32 pairs,
//          row-major.
//   depth: grayscale PFM — "Pf\n<width> <height>\n-1.0\n" then float32 rows
//          stored bottom-to-top; in memory the raster is top-down.
//   poses: KITTI odometry text — 12 floats per line, row-major 3x4 [R|t] of
//          the camera-to-world transform, 9 significant digits.
//   calib: single line "fx fy cx cy width height".

FlowField read_flow(const std::filesystem::path& path);
void write_flow(const FlowField& flow, const std::filesystem::path& path);

DepthMap read_depth(const std::filesystem::path& path);
void write_depth(const DepthMap& depth, const std::filesystem::path& path);

Trajectory read_trajectory(const std::filesystem::path& path);
void write_trajectory(const Trajectory& trajectory, const std::filesystem::path& path);

CameraIntrinsicsd read_calibration(const std::filesystem::path& path);
void write_calibration(const CameraIntrinsicsd& k, const std::filesystem::path& path);

// Sequence directory layout. Pair products (flows, and the depth consumed
// with them) are indexed from 000001 for the pair (1,0); frame 0 has no
// pair products. flow_fwd/%06d.flo holds the flow from frame i to i-1,
// flow_bwd/%06d.flo the flow from i-1 to i.
std::string frame_name(int index);

struct SequencePaths {
  std::filesystem::path root;

  std::filesystem::path calibration() const { return root / "calib.txt"; }
  std::filesystem::path gt_poses() const { return root / "gt_poses.txt"; }
  std::filesystem::path scene_meta() const { return root / "scene_meta.txt"; }
  std::filesystem::path depth(int frame) const;
  std::filesystem::path flow_fwd(int frame) const;
  std::filesystem::path flow_bwd(int frame) const;
  std::filesystem::path outlier_mask(int frame) const;

  // Number of frames implied by the products present: 1 + the largest
  // pair index found in depth/, flow_fwd/ or flow_bwd/.
  int count_frames() const;
};

}  // namespace dfvo
