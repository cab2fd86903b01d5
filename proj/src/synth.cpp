#include "dfvo/synth.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "dfvo/errors.hpp"
#include "dfvo/random.hpp"
#include "dfvo/raster_io.hpp"

namespace dfvo {
namespace {

constexpr double kGroundY = 1.5;    // camera height above ground, y down
constexpr double kCeilingY = -2.0;
constexpr double kBackMargin = 5.0;
constexpr double kFrontMargin = 25.0;

struct Rect {
  Eigen::Vector3d center;
  Eigen::Vector3d e1, e2;  // orthonormal in-plane axes
  double half1, half2;
};

// Axis-aligned room enclosing the whole camera path plus interior panels.
// Every ray from inside the room hits a face (slab exit), so depth is
// defined at every pixel; panels add discontinuities in front of it.
struct Scene {
  bool cylinder = false;
  double cylinder_radius = 0.0;
  Eigen::Vector3d box_min, box_max;
  std::vector<Rect> panels;

  // Returns ray parameter t (= camera-frame depth when the camera-frame
  // direction has unit z) and the id of the surface hit.
  void cast(const Eigen::Vector3d& origin, const Eigen::Vector3d& dir, double& t_hit, int& id_hit) const {
    if (cylinder) {
      // |(o + t d)_xz|^2 = R^2, camera kept at the axis in practice.
      const double a = dir.x() * dir.x() + dir.z() * dir.z();
      const double b = 2.0 * (origin.x() * dir.x() + origin.z() * dir.z());
      const double c = origin.x() * origin.x() + origin.z() * origin.z() - cylinder_radius * cylinder_radius;
      const double disc = b * b - 4.0 * a * c;
      t_hit = (-b + std::sqrt(std::max(disc, 0.0))) / (2.0 * a);
      id_hit = 0;
      return;
    }
    // Slab exit through the room faces.
    t_hit = std::numeric_limits<double>::infinity();
    id_hit = -1;
    for (int axis = 0; axis < 3; ++axis) {
      if (std::fabs(dir(axis)) < 1e-15) continue;
      const double bound = dir(axis) > 0.0 ? box_max(axis) : box_min(axis);
      const double t = (bound - origin(axis)) / dir(axis);
      if (t < t_hit) {
        t_hit = t;
        id_hit = 2 * axis + (dir(axis) > 0.0 ? 1 : 0);
      }
    }
    // Interior panels in front of the exit face.
    for (size_t p = 0; p < panels.size(); ++p) {
      const Rect& rect = panels[p];
      const Eigen::Vector3d normal = rect.e1.cross(rect.e2);
      const double denom = normal.dot(dir);
      if (std::fabs(denom) < 1e-15) continue;
      const double t = normal.dot(rect.center - origin) / denom;
      if (t <= 1e-9 || t >= t_hit) continue;
      const Eigen::Vector3d local = origin + t * dir - rect.center;
      if (std::fabs(local.dot(rect.e1)) > rect.half1 || std::fabs(local.dot(rect.e2)) > rect.half2) continue;
      t_hit = t;
      id_hit = 6 + static_cast<int>(p);
    }
  }
};

Eigen::Matrix3d yaw_rotation(double deg) {
  return exp_so3(Eigen::Vector3d(0.0, deg * EIGEN_PI / 180.0, 0.0));
}

Scene build_scene(const SceneConfig& config, const Trajectory& poses) {
  Scene scene;
  if (config.profile == MotionProfile::kPureRotation) {
    scene.cylinder = true;
    scene.cylinder_radius = config.cylinder_radius_m;
    return scene;
  }

  Eigen::Vector3d lo = poses.front().translation();
  Eigen::Vector3d hi = lo;
  for (const auto& pose : poses) {
    lo = lo.cwiseMin(pose.translation());
    hi = hi.cwiseMax(pose.translation());
  }
  scene.box_min = Eigen::Vector3d(lo.x() - config.room_half_width_m, kCeilingY, lo.z() - kBackMargin);
  scene.box_max = Eigen::Vector3d(hi.x() + config.room_half_width_m, kGroundY, hi.z() + kFrontMargin);

  // Fronto-distributed panels staggered along the path, offset laterally
  // so the camera never crosses them. Each panel is tilted a few degrees:
  // an exactly fronto-parallel plane under forward motion has an exactly
  // linear flow field, which would tie thousands of pixels at zero
  // forward-backward inconsistency and collapse the match selection onto
  // a single degenerate plane.
  for (int p = 0; p < config.n_panels; ++p) {
    const int j = static_cast<int>((static_cast<long>(p + 1) * (config.n_frames - 1)) / (config.n_panels + 1));
    const auto& pose = poses[static_cast<size_t>(j)];
    const Eigen::Vector3d heading = pose.rotation().col(2);
    const Eigen::Vector3d lateral = pose.rotation().col(0);
    const double side = (p % 2 == 0) ? 1.0 : -1.0;
    const double yaw_tilt = side * 8.0 * EIGEN_PI / 180.0;
    const double pitch_tilt = ((p / 2) % 2 == 0 ? 1.0 : -1.0) * 6.0 * EIGEN_PI / 180.0;
    const Eigen::Matrix3d tilt =
        exp_so3(Eigen::Vector3d(0.0, yaw_tilt, 0.0)) * exp_so3(Eigen::Vector3d(pitch_tilt, 0.0, 0.0));
    Rect rect;
    rect.center = pose.translation() + 12.0 * heading + side * 0.45 * config.room_half_width_m * lateral +
                  Eigen::Vector3d(0.0, 0.25, 0.0);
    rect.e1 = tilt * lateral;
    rect.e2 = tilt * Eigen::Vector3d(0.0, 1.0, 0.0);
    rect.half1 = 0.3 * config.room_half_width_m;
    rect.half2 = 1.1;
    scene.panels.push_back(rect);
  }
  return scene;
}

struct RenderedFrame {
  std::vector<double> depth;  // exact ray depth per pixel
  std::vector<int> id;
  RigidTransformd pose;       // camera-to-world
};

RenderedFrame render_frame(const SceneConfig& config, const Scene& scene, const RigidTransformd& pose) {
  RenderedFrame frame;
  const int w = config.image_width, h = config.image_height;
  frame.depth.resize(static_cast<size_t>(w) * h);
  frame.id.resize(static_cast<size_t>(w) * h);
  frame.pose = pose;
  const Eigen::Matrix3d& rot = pose.rotation();
  const Eigen::Vector3d& origin = pose.translation();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Eigen::Vector3d dir_cam((x - config.cx) / config.fx, (y - config.cy) / config.fy, 1.0);
      const Eigen::Vector3d dir_world = rot * dir_cam;
      double t;
      int id;
      scene.cast(origin, dir_world, t, id);
      frame.depth[static_cast<size_t>(y) * w + x] = t;
      frame.id[static_cast<size_t>(y) * w + x] = id;
    }
  }
  return frame;
}

// Exact flow from frame a to frame b by reprojecting each pixel's 3D
// point. Pixels whose endpoint leaves view b, or whose bilinear footprint
// in frame b spans a different surface (occlusion or depth discontinuity),
// carry the invalid sentinel.
FlowField make_flow(const SceneConfig& config, const RenderedFrame& a, const RenderedFrame& b) {
  const int w = config.image_width, h = config.image_height;
  FlowField flow(w, h);
  const Eigen::Matrix3d rot_a = a.pose.rotation();
  const Eigen::Vector3d org_a = a.pose.translation();
  const Eigen::Matrix3d rot_b_t = b.pose.rotation().transpose();
  const Eigen::Vector3d org_b = b.pose.translation();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const size_t i = static_cast<size_t>(y) * w + x;
      const Eigen::Vector3d dir_cam((x - config.cx) / config.fx, (y - config.cy) / config.fy, 1.0);
      const Eigen::Vector3d x_world = org_a + a.depth[i] * (rot_a * dir_cam);
      const Eigen::Vector3d x_b = rot_b_t * (x_world - org_b);
      if (x_b.z() <= 1e-9) {
        flow.set_invalid(x, y);
        continue;
      }
      const double qx = config.fx * x_b.x() / x_b.z() + config.cx;
      const double qy = config.fy * x_b.y() / x_b.z() + config.cy;
      if (qx < 0.0 || qx > w - 1 || qy < 0.0 || qy > h - 1) {
        flow.set_invalid(x, y);
        continue;
      }
      const int x0 = static_cast<int>(std::floor(qx));
      const int y0 = static_cast<int>(std::floor(qy));
      const int x1 = std::min(x0 + 1, w - 1);
      const int y1 = std::min(y0 + 1, h - 1);
      const int id = a.id[i];
      if (b.id[static_cast<size_t>(y0) * w + x0] != id || b.id[static_cast<size_t>(y0) * w + x1] != id ||
          b.id[static_cast<size_t>(y1) * w + x0] != id || b.id[static_cast<size_t>(y1) * w + x1] != id) {
        flow.set_invalid(x, y);
        continue;
      }
      flow.du(x, y) = static_cast<float>(qx - x);
      flow.dv(x, y) = static_cast<float>(qy - y);
    }
  }
  return flow;
}

void add_flow_noise(FlowField& flow, double sigma, uint64_t seed) {
  if (sigma <= 0.0) return;
  Rng rng(seed);
  for (int y = 0; y < flow.height; ++y) {
    for (int x = 0; x < flow.width; ++x) {
      if (!flow.valid(x, y)) continue;
      flow.du(x, y) += static_cast<float>(sigma * rng.normal());
      flow.dv(x, y) += static_cast<float>(sigma * rng.normal());
    }
  }
}

DepthMap depth_with_noise(const SceneConfig& config, const RenderedFrame& frame, uint64_t seed) {
  DepthMap depth(config.image_width, config.image_height);
  Rng rng(seed);
  for (size_t i = 0; i < frame.depth.size(); ++i) {
    double d = frame.depth[i];
    if (config.depth_noise_rel > 0.0) d = std::max(d * (1.0 + config.depth_noise_rel * rng.normal()), 0.01);
    depth.data[i] = static_cast<float>(d);
  }
  return depth;
}

}  // namespace

MotionProfile motion_profile_from_string(const std::string& name) {
  if (name == "forward") return MotionProfile::kForward;
  if (name == "turning") return MotionProfile::kTurning;
  if (name == "creep") return MotionProfile::kCreep;
  if (name == "pure_rotation") return MotionProfile::kPureRotation;
  if (name == "mixed") return MotionProfile::kMixed;
  fail(ErrorCode::InvalidConfig, "unknown motion profile '" + name + "'");
}

std::string_view to_string(MotionProfile profile) {
  switch (profile) {
    case MotionProfile::kForward: return "forward";
    case MotionProfile::kTurning: return "turning";
    case MotionProfile::kCreep: return "creep";
    case MotionProfile::kPureRotation: return "pure_rotation";
    case MotionProfile::kMixed: return "mixed";
  }
  return "unknown";
}

void SceneConfig::validate() const {
  if (n_frames < 2) fail(ErrorCode::InvalidConfig, "n_frames must be at least 2");
  if (image_width < 16 || image_height < 16) fail(ErrorCode::InvalidConfig, "image too small");
  if (flow_noise_px < 0.0 || depth_noise_rel < 0.0) fail(ErrorCode::InvalidConfig, "noise must be non-negative");
  if (outlier_fraction < 0.0 || outlier_fraction >= 1.0) {
    fail(ErrorCode::InvalidConfig, "outlier_fraction must be in [0, 1)");
  }
  if (outlier_mag_px < 0.0) fail(ErrorCode::InvalidConfig, "outlier magnitude must be non-negative");
  if (n_panels < 0 || n_panels > 5) fail(ErrorCode::InvalidConfig, "n_panels must be in [0, 5]");
  if (cylinder_radius_m <= 0.0 || room_half_width_m <= 0.0) {
    fail(ErrorCode::InvalidConfig, "scene dimensions must be positive");
  }
  intrinsics();  // throws BadCalibration -> surfaced as config problem
}

CameraIntrinsicsd SceneConfig::intrinsics() const { return {fx, fy, cx, cy, image_width, image_height}; }

Trajectory build_gt_trajectory(const SceneConfig& config) {
  Trajectory poses;
  poses.push_back(RigidTransformd());
  for (int i = 1; i < config.n_frames; ++i) {
    double yaw = 0.0, step = config.step_m;
    switch (config.profile) {
      case MotionProfile::kForward:
      case MotionProfile::kCreep:
        break;
      case MotionProfile::kTurning:
        yaw = config.yaw_deg_per_frame;
        break;
      case MotionProfile::kPureRotation:
        yaw = config.yaw_deg_per_frame;
        step = 0.0;
        break;
      case MotionProfile::kMixed:
        yaw = config.yaw_deg_per_frame * std::sin(2.0 * EIGEN_PI * i / 40.0);
        break;
    }
    const RigidTransformd rel = RigidTransformd::from_matrix_projected(yaw_rotation(yaw),
                                                                       Eigen::Vector3d(0.0, 0.0, step));
    poses.push_back(compose(poses.back(), rel));
  }
  return poses;
}

Trajectory generate_sequence(const SceneConfig& config, const std::filesystem::path& out_dir) {
  config.validate();
  const Trajectory poses = build_gt_trajectory(config);
  const Scene scene = build_scene(config, poses);

  const SequencePaths paths{out_dir};
  std::filesystem::create_directories(out_dir / "depth");
  std::filesystem::create_directories(out_dir / "flow_fwd");
  std::filesystem::create_directories(out_dir / "flow_bwd");
  if (config.outlier_fraction > 0.0) std::filesystem::create_directories(out_dir / "outlier_mask");

  RenderedFrame prev = render_frame(config, scene, poses[0]);
  write_depth(depth_with_noise(config, prev, mix_seed(config.rng_seed, 0)), paths.depth(0));
  for (int i = 1; i < config.n_frames; ++i) {
    RenderedFrame cur = render_frame(config, scene, poses[static_cast<size_t>(i)]);
    const uint64_t base = static_cast<uint64_t>(i) * 4;
    write_depth(depth_with_noise(config, cur, mix_seed(config.rng_seed, base)), paths.depth(i));

    FlowField fwd = make_flow(config, cur, prev);
    FlowField bwd = make_flow(config, prev, cur);
    add_flow_noise(fwd, config.flow_noise_px, mix_seed(config.rng_seed, base + 1));
    add_flow_noise(bwd, config.flow_noise_px, mix_seed(config.rng_seed, base + 2));
    if (config.outlier_fraction > 0.0) {
      OutlierInjection injected =
          inject_outliers(fwd, config.outlier_fraction, config.outlier_mag_px, mix_seed(config.rng_seed, base + 3));
      fwd = std::move(injected.flow);
      DepthMap mask(config.image_width, config.image_height);
      for (size_t p = 0; p < injected.mask.size(); ++p) mask.data[p] = injected.mask[p] ? 1.0f : 0.0f;
      write_depth(mask, paths.outlier_mask(i));
    }
    write_flow(fwd, paths.flow_fwd(i));
    write_flow(bwd, paths.flow_bwd(i));
    prev = std::move(cur);
  }

  write_calibration(config.intrinsics(), paths.calibration());
  write_trajectory(poses, paths.gt_poses());
  write_scene_meta(config, paths.scene_meta());
  return poses;
}

OutlierInjection inject_outliers(const FlowField& flow, double fraction, double magnitude_px, uint64_t seed) {
  if (fraction < 0.0 || fraction >= 1.0) fail(ErrorCode::InvalidConfig, "outlier fraction must be in [0, 1)");
  OutlierInjection result;
  result.flow = flow;
  result.mask.assign(static_cast<size_t>(flow.width) * flow.height, 0);
  if (fraction == 0.0) return result;

  std::vector<int> valid_indices;
  for (int y = 0; y < flow.height; ++y) {
    for (int x = 0; x < flow.width; ++x) {
      if (flow.valid(x, y)) valid_indices.push_back(y * flow.width + x);
    }
  }
  const int n_inject = static_cast<int>(fraction * static_cast<double>(valid_indices.size()));
  Rng rng(seed);
  // Partial Fisher-Yates over the valid pixels.
  for (int i = 0; i < n_inject; ++i) {
    const size_t j = static_cast<size_t>(i) + rng.bounded(valid_indices.size() - static_cast<size_t>(i));
    std::swap(valid_indices[static_cast<size_t>(i)], valid_indices[j]);
    const int idx = valid_indices[static_cast<size_t>(i)];
    const double angle = rng.uniform(0.0, 2.0 * EIGEN_PI);
    const double norm = rng.uniform(0.5 * magnitude_px, magnitude_px);
    const int x = idx % flow.width;
    const int y = idx / flow.width;
    result.flow.du(x, y) += static_cast<float>(norm * std::cos(angle));
    result.flow.dv(x, y) += static_cast<float>(norm * std::sin(angle));
    result.mask[static_cast<size_t>(idx)] = 1;
    ++result.n_injected;
  }
  return result;
}

void write_scene_meta(const SceneConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  char buf[64];
  auto num = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return std::string(buf);
  };
  out << "profile = " << to_string(config.profile) << '\n';
  out << "n_frames = " << config.n_frames << '\n';
  out << "step_m = " << num(config.step_m) << '\n';
  out << "yaw_deg_per_frame = " << num(config.yaw_deg_per_frame) << '\n';
  out << "image_width = " << config.image_width << '\n';
  out << "image_height = " << config.image_height << '\n';
  out << "fx = " << num(config.fx) << '\n';
  out << "fy = " << num(config.fy) << '\n';
  out << "cx = " << num(config.cx) << '\n';
  out << "cy = " << num(config.cy) << '\n';
  out << "rng_seed = " << config.rng_seed << '\n';
  out << "n_panels = " << config.n_panels << '\n';
  out << "room_half_width_m = " << num(config.room_half_width_m) << '\n';
  out << "cylinder_radius_m = " << num(config.cylinder_radius_m) << '\n';
  out << "flow_noise_px = " << num(config.flow_noise_px) << '\n';
  out << "depth_noise_rel = " << num(config.depth_noise_rel) << '\n';
  out << "outlier_fraction = " << num(config.outlier_fraction) << '\n';
  out << "outlier_mag_px = " << num(config.outlier_mag_px) << '\n';
  if (!out) fail(ErrorCode::IoFailure, "write failed for " + path.string());
}

}  // namespace dfvo
