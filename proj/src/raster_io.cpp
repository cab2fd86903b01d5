#include "dfvo/raster_io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dfvo/errors.hpp"

namespace dfvo {
namespace {

constexpr float kFloMagic = 202021.25f;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoFailure, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (!in.good() && !in.eof()) fail(ErrorCode::IoFailure, "read failed for " + path.string());
  return std::move(buf).str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::IoFailure, "write failed for " + path.string());
}

void put_u32le(std::string& buf, uint32_t v) {
  buf.push_back(static_cast<char>(v & 0xff));
  buf.push_back(static_cast<char>((v >> 8) & 0xff));
  buf.push_back(static_cast<char>((v >> 16) & 0xff));
  buf.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_f32le(std::string& buf, float v) { put_u32le(buf, std::bit_cast<uint32_t>(v)); }
void put_i32le(std::string& buf, int32_t v) { put_u32le(buf, static_cast<uint32_t>(v)); }

uint32_t get_u32le(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) | (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}

float get_f32le(const unsigned char* p) { return std::bit_cast<float>(get_u32le(p)); }
int32_t get_i32le(const unsigned char* p) { return static_cast<int32_t>(get_u32le(p)); }

// 9 significant digits, matching the trajectory/calibration text contract.
std::string format_g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

FlowField read_flow(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  if (bytes.size() < 12) fail(ErrorCode::TruncatedFile, path.string() + ": header incomplete");
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const float magic = get_f32le(p);
  if (magic != kFloMagic) {
    fail(ErrorCode::BadMagic, path.string() + ": flow magic " + std::to_string(magic));
  }
  const int32_t w = get_i32le(p + 4);
  const int32_t h = get_i32le(p + 8);
  if (w <= 0 || h <= 0) fail(ErrorCode::TruncatedFile, path.string() + ": non-positive dimensions");
  const size_t payload = static_cast<size_t>(2) * w * h * 4;
  if (bytes.size() < 12 + payload) {
    fail(ErrorCode::TruncatedFile, path.string() + ": payload shorter than header promises");
  }
  FlowField flow(w, h);
  for (size_t i = 0; i < flow.data.size(); ++i) flow.data[i] = get_f32le(p + 12 + 4 * i);
  return flow;
}

void write_flow(const FlowField& flow, const std::filesystem::path& path) {
  std::string buf;
  buf.reserve(12 + flow.data.size() * 4);
  put_f32le(buf, kFloMagic);
  put_i32le(buf, flow.width);
  put_i32le(buf, flow.height);
  for (float v : flow.data) put_f32le(buf, v);
  write_file(path, buf);
}

DepthMap read_depth(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);

  // Header is three '\n'-terminated lines: magic, dimensions, scale.
  size_t pos = 0;
  auto next_line = [&](const char* what) {
    const size_t end = bytes.find('\n', pos);
    if (end == std::string::npos) fail(ErrorCode::BadHeader, path.string() + ": missing " + what);
    std::string line = bytes.substr(pos, end - pos);
    pos = end + 1;
    return line;
  };

  const std::string magic = next_line("magic line");
  if (magic != "Pf") fail(ErrorCode::BadHeader, path.string() + ": expected grayscale PFM magic 'Pf', got '" + magic + "'");
  const std::string dims = next_line("dimension line");
  int w = 0, h = 0;
  {
    std::istringstream ss(dims);
    if (!(ss >> w >> h) || w <= 0 || h <= 0) fail(ErrorCode::BadHeader, path.string() + ": bad dimensions '" + dims + "'");
    std::string rest;
    if (ss >> rest) fail(ErrorCode::BadHeader, path.string() + ": trailing tokens in dimension line");
  }
  const std::string scale_line = next_line("scale line");
  double scale = 0.0;
  try {
    scale = std::stod(scale_line);
  } catch (const std::exception&) {
    fail(ErrorCode::BadHeader, path.string() + ": bad scale '" + scale_line + "'");
  }
  if (!(scale < 0.0)) fail(ErrorCode::BadHeader, path.string() + ": only little-endian (negative scale) PFM supported");

  const size_t payload = static_cast<size_t>(w) * h * 4;
  if (bytes.size() < pos + payload) fail(ErrorCode::TruncatedFile, path.string() + ": payload shorter than header promises");

  // PFM stores rows bottom-to-top; flip into top-down memory order.
  DepthMap depth(w, h);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data()) + pos;
  for (int y = 0; y < h; ++y) {
    const int src_row = h - 1 - y;
    for (int x = 0; x < w; ++x) {
      const float v = get_f32le(p + 4 * (static_cast<size_t>(src_row) * w + x));
      if (v < 0.0f) fail(ErrorCode::NegativeDepth, path.string() + ": negative depth value");
      depth.at(x, y) = v;
    }
  }
  return depth;
}

void write_depth(const DepthMap& depth, const std::filesystem::path& path) {
  std::string buf;
  buf.reserve(32 + depth.data.size() * 4);
  buf += "Pf\n";
  buf += std::to_string(depth.width) + " " + std::to_string(depth.height) + "\n";
  buf += "-1.0\n";
  for (int y = depth.height - 1; y >= 0; --y) {
    for (int x = 0; x < depth.width; ++x) put_f32le(buf, depth.at(x, y));
  }
  write_file(path, buf);
}

Trajectory read_trajectory(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  Trajectory trajectory;
  std::istringstream stream(bytes);
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    double v[12];
    int n = 0;
    while (n < 12 && (ss >> v[n])) ++n;
    double extra;
    if (n != 12 || (ss >> extra)) {
      fail(ErrorCode::BadLineLength,
           path.string() + ":" + std::to_string(line_no) + ": expected 12 values per pose line");
    }
    Eigen::Matrix3d r;
    r << v[0], v[1], v[2], v[4], v[5], v[6], v[8], v[9], v[10];
    const Eigen::Vector3d t(v[3], v[7], v[11]);
    const double err = orthonormality_error(r);
    if (err > 1e-2 || r.determinant() < 0.0) {
      fail(ErrorCode::NonRotation,
           path.string() + ":" + std::to_string(line_no) + ": |R'R - I| = " + std::to_string(err));
    }
    trajectory.push_back(RigidTransformd::from_matrix_projected(r, t));
  }
  if (trajectory.empty()) fail(ErrorCode::BadLineLength, path.string() + ": no pose lines");
  return trajectory;
}

void write_trajectory(const Trajectory& trajectory, const std::filesystem::path& path) {
  std::string buf;
  for (const auto& pose : trajectory) {
    const auto& r = pose.rotation();
    const auto& t = pose.translation();
    const double v[12] = {r(0, 0), r(0, 1), r(0, 2), t.x(), r(1, 0), r(1, 1),
                          r(1, 2), t.y(),   r(2, 0), r(2, 1), r(2, 2), t.z()};
    for (int i = 0; i < 12; ++i) {
      if (i) buf += ' ';
      buf += format_g9(v[i]);
    }
    buf += '\n';
  }
  write_file(path, buf);
}

CameraIntrinsicsd read_calibration(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  std::istringstream ss(bytes);
  double fx, fy, cx, cy;
  int width, height;
  if (!(ss >> fx >> fy >> cx >> cy >> width >> height)) {
    fail(ErrorCode::BadCalibration, path.string() + ": expected 'fx fy cx cy width height'");
  }
  std::string rest;
  if (ss >> rest) fail(ErrorCode::BadCalibration, path.string() + ": trailing tokens");
  try {
    return CameraIntrinsicsd(fx, fy, cx, cy, width, height);
  } catch (const Error& e) {
    fail(ErrorCode::BadCalibration, path.string() + ": " + e.detail());
  }
}

void write_calibration(const CameraIntrinsicsd& k, const std::filesystem::path& path) {
  std::string buf = format_g9(k.fx) + " " + format_g9(k.fy) + " " + format_g9(k.cx) + " " + format_g9(k.cy) + " " +
                    std::to_string(k.width) + " " + std::to_string(k.height) + "\n";
  write_file(path, buf);
}

std::string frame_name(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%06d", index);
  return buf;
}

std::filesystem::path SequencePaths::depth(int frame) const { return root / "depth" / (frame_name(frame) + ".pfm"); }
std::filesystem::path SequencePaths::flow_fwd(int frame) const {
  return root / "flow_fwd" / (frame_name(frame) + ".flo");
}
std::filesystem::path SequencePaths::flow_bwd(int frame) const {
  return root / "flow_bwd" / (frame_name(frame) + ".flo");
}
std::filesystem::path SequencePaths::outlier_mask(int frame) const {
  return root / "outlier_mask" / (frame_name(frame) + ".pfm");
}

int SequencePaths::count_frames() const {
  int max_index = 0;
  for (const char* sub : {"depth", "flow_fwd", "flow_bwd"}) {
    const std::filesystem::path dir = root / sub;
    if (!std::filesystem::is_directory(dir)) continue;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      const std::string stem = entry.path().stem().string();
      if (stem.size() != 6 || stem.find_first_not_of("0123456789") != std::string::npos) continue;
      max_index = std::max(max_index, std::stoi(stem));
    }
  }
  return max_index + 1;
}

}  // namespace dfvo
