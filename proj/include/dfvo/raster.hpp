#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "dfvo/geometry.hpp"

namespace dfvo {

// Dense 2-channel pixel displacement field, row-major, (du, dv) interleaved.
// The in-memory layout matches the .flo payload byte-for-byte.
// Values with magnitude >= kInvalidFlow mark pixels without a valid flow.
struct FlowField {
  static constexpr float kInvalidFlow = 1e9f;

  int width = 0;
  int height = 0;
  std::vector<float> data;  // 2 * width * height floats

  FlowField() = default;
  FlowField(int w, int h) : width(w), height(h), data(static_cast<size_t>(2) * w * h, 0.0f) {}

  static FlowField constant(int w, int h, float du, float dv) {
    FlowField f(w, h);
    for (size_t i = 0; i < f.data.size(); i += 2) {
      f.data[i] = du;
      f.data[i + 1] = dv;
    }
    return f;
  }

  size_t index(int x, int y) const { return 2 * (static_cast<size_t>(y) * width + x); }
  float& du(int x, int y) { return data[index(x, y)]; }
  float& dv(int x, int y) { return data[index(x, y) + 1]; }
  float du(int x, int y) const { return data[index(x, y)]; }
  float dv(int x, int y) const { return data[index(x, y) + 1]; }

  void set_invalid(int x, int y) {
    du(x, y) = kInvalidFlow;
    dv(x, y) = kInvalidFlow;
  }

  bool valid(int x, int y) const {
    const float u = du(x, y), v = dv(x, y);
    return std::isfinite(u) && std::isfinite(v) && std::fabs(u) < kInvalidFlow && std::fabs(v) < kInvalidFlow;
  }
};

// Per-pixel metric depth, meters, row-major top-down. 0 marks invalid pixels.
struct DepthMap {
  int width = 0;
  int height = 0;
  std::vector<float> data;

  DepthMap() = default;
  DepthMap(int w, int h, float fill = 0.0f) : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {}

  size_t index(int x, int y) const { return static_cast<size_t>(y) * width + x; }
  float& at(int x, int y) { return data[index(x, y)]; }
  float at(int x, int y) const { return data[index(x, y)]; }
  bool valid(int x, int y) const { return at(x, y) > 0.0f; }
};

// Generic per-pixel scalar (flow inconsistency, masks). May hold +inf.
struct ScalarField {
  int width = 0;
  int height = 0;
  std::vector<float> data;

  ScalarField() = default;
  ScalarField(int w, int h, float fill = 0.0f) : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {}

  size_t index(int x, int y) const { return static_cast<size_t>(y) * width + x; }
  float& at(int x, int y) { return data[index(x, y)]; }
  float at(int x, int y) const { return data[index(x, y)]; }
};

// One 2D-2D correspondence between the current frame i and the previous
// frame i-1, scored by forward-backward flow inconsistency (pixels).
struct Match {
  Pixel p_prev;
  Pixel p_cur;
  double inconsistency = 0.0;
};

// Best-N matches, sorted ascending by inconsistency with row-major (p_cur)
// tie-breaking, so the selection is a pure function of its inputs.
struct MatchSet {
  int width = 0;
  int height = 0;
  int finite_candidates = 0;  // how many pixels had finite inconsistency
  std::vector<Match> matches;

  size_t size() const { return matches.size(); }
  bool empty() const { return matches.empty(); }
};

// Camera-to-world pose per frame.
using Trajectory = std::vector<RigidTransformd>;

}  // namespace dfvo
