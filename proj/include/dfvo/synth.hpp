#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dfvo/raster.hpp"

namespace dfvo {

enum class MotionProfile : std::uint8_t { kForward, kTurning, kCreep, kPureRotation, kMixed };

MotionProfile motion_profile_from_string(const std::string& name);
std::string_view to_string(MotionProfile profile);

// Deterministic synthetic scene: a piecewise-planar room (ground, ceiling,
// side/back/front walls) with fronto-distributed interior panels for the
// translational profiles, and a camera-centered cylinder for pure
// rotation (rotationally symmetric, so depth maps are frame-invariant).
struct SceneConfig {
  int n_frames = 2;
  MotionProfile profile = MotionProfile::kForward;
  double step_m = 1.0;             // translation per frame
  double yaw_deg_per_frame = 0.0;  // rotation per frame about the camera y axis
  int image_width = 320;
  int image_height = 120;
  double fx = 160.0, fy = 160.0, cx = 160.0, cy = 60.0;
  uint64_t rng_seed = 0;
  int n_panels = 4;
  double room_half_width_m = 4.0;
  double cylinder_radius_m = 10.0;
  double flow_noise_px = 0.0;
  double depth_noise_rel = 0.0;
  double outlier_fraction = 0.0;
  double outlier_mag_px = 20.0;

  void validate() const;
  CameraIntrinsicsd intrinsics() const;
};

// Renders the sequence products (depth, bidirectional flows, calibration,
// ground-truth poses, scene meta, and outlier masks when injected) into
// out_dir using the standard sequence layout, and returns the ground-truth
// trajectory. Fully deterministic by rng_seed.
Trajectory generate_sequence(const SceneConfig& config, const std::filesystem::path& out_dir);

// Ground-truth relative motion per profile (camera-to-world chaining).
Trajectory build_gt_trajectory(const SceneConfig& config);

struct OutlierInjection {
  FlowField flow;
  std::vector<uint8_t> mask;  // row-major, 1 where the pixel was perturbed
  int n_injected = 0;
};

// Perturbs floor(fraction * n_valid) valid pixels of the forward flow by
// uniform random vectors of norm in [magnitude/2, magnitude]; the backward
// flow is left untouched so those pixels are guaranteed inconsistent.
OutlierInjection inject_outliers(const FlowField& flow, double fraction, double magnitude_px, uint64_t seed);

void write_scene_meta(const SceneConfig& config, const std::filesystem::path& path);

}  // namespace dfvo
