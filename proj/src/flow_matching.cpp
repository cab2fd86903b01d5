#include "dfvo/flow_matching.hpp"

#include <algorithm>
#include <limits>

#include "dfvo/errors.hpp"

namespace dfvo {
namespace {

constexpr float kInf = std::numeric_limits<float>::infinity();

// Bilinear sample of the backward field at a continuous position. Returns
// false if any corner under the footprint carries the invalid sentinel.
bool sample_flow(const FlowField& field, double x, double y, double& du, double& dv) {
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const int x1 = std::min(x0 + 1, field.width - 1);
  const int y1 = std::min(y0 + 1, field.height - 1);
  if (!field.valid(x0, y0) || !field.valid(x1, y0) || !field.valid(x0, y1) || !field.valid(x1, y1)) return false;
  const double ax = x - x0;
  const double ay = y - y0;
  const double w00 = (1.0 - ax) * (1.0 - ay);
  const double w10 = ax * (1.0 - ay);
  const double w01 = (1.0 - ax) * ay;
  const double w11 = ax * ay;
  du = w00 * field.du(x0, y0) + w10 * field.du(x1, y0) + w01 * field.du(x0, y1) + w11 * field.du(x1, y1);
  dv = w00 * field.dv(x0, y0) + w10 * field.dv(x1, y0) + w01 * field.dv(x0, y1) + w11 * field.dv(x1, y1);
  return true;
}

}  // namespace

ScalarField fb_inconsistency(const FlowField& fwd, const FlowField& bwd) {
  if (fwd.width != bwd.width || fwd.height != bwd.height) {
    fail(ErrorCode::SizeMismatch, "forward and backward flow sizes differ");
  }
  ScalarField err(fwd.width, fwd.height, kInf);
  for (int y = 0; y < fwd.height; ++y) {
    for (int x = 0; x < fwd.width; ++x) {
      if (!fwd.valid(x, y)) continue;
      const double fu = fwd.du(x, y);
      const double fv = fwd.dv(x, y);
      const double ex = x + fu;
      const double ey = y + fv;
      if (ex < 0.0 || ex > fwd.width - 1 || ey < 0.0 || ey > fwd.height - 1) continue;
      double bu, bv;
      if (!sample_flow(bwd, ex, ey, bu, bv)) continue;
      err.at(x, y) = static_cast<float>(std::hypot(fu + bu, fv + bv));
    }
  }
  return err;
}

MatchSet select_best_n(const FlowField& fwd, const ScalarField& err, int n, const SelectOptions& options) {
  if (fwd.width != err.width || fwd.height != err.height) {
    fail(ErrorCode::SizeMismatch, "flow and inconsistency field sizes differ");
  }
  if (n < 8) fail(ErrorCode::TooFewMatches, "requested fewer than 8 matches");

  const int b = std::max(options.border_px, 0);

  // Candidates keyed by (inconsistency, row-major index) for deterministic
  // ordering; the index doubles as the tie-break.
  struct Candidate {
    float err;
    int index;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(static_cast<size_t>(err.width) * err.height / 4);
  int finite_count = 0;
  for (int y = b; y < err.height - b; ++y) {
    for (int x = b; x < err.width - b; ++x) {
      const float e = err.at(x, y);
      if (!std::isfinite(e)) continue;
      ++finite_count;
      candidates.push_back({e, static_cast<int>(err.index(x, y))});
    }
  }
  if (finite_count < 8) fail(ErrorCode::TooFewMatches, "fewer than 8 finite-inconsistency pixels");

  const auto by_err_then_index = [](const Candidate& a, const Candidate& c) {
    return a.err != c.err ? a.err < c.err : a.index < c.index;
  };

  std::vector<Candidate> selected;
  if (options.mode == SelectionMode::kGlobal) {
    std::sort(candidates.begin(), candidates.end(), by_err_then_index);
    candidates.resize(std::min<size_t>(candidates.size(), n));
    selected = std::move(candidates);
  } else {
    // Per-cell quota, merged and re-truncated. Keeps spatial coverage
    // uniform at the cost of globally suboptimal inconsistency.
    const int cells = options.grid_cols * options.grid_rows;
    const int quota = (n + cells - 1) / cells;
    std::vector<std::vector<Candidate>> bins(cells);
    for (const Candidate& c : candidates) {
      const int x = c.index % err.width;
      const int y = c.index / err.width;
      const int gx = std::min(x * options.grid_cols / err.width, options.grid_cols - 1);
      const int gy = std::min(y * options.grid_rows / err.height, options.grid_rows - 1);
      bins[gy * options.grid_cols + gx].push_back(c);
    }
    for (auto& bin : bins) {
      std::sort(bin.begin(), bin.end(), by_err_then_index);
      bin.resize(std::min<size_t>(bin.size(), quota));
      selected.insert(selected.end(), bin.begin(), bin.end());
    }
    std::sort(selected.begin(), selected.end(), by_err_then_index);
    selected.resize(std::min<size_t>(selected.size(), n));
  }

  MatchSet set;
  set.width = fwd.width;
  set.height = fwd.height;
  set.finite_candidates = finite_count;
  set.matches.reserve(selected.size());
  for (const Candidate& c : selected) {
    const int x = c.index % err.width;
    const int y = c.index / err.width;
    Match m;
    m.p_cur = Pixel(x, y);
    m.p_prev = Pixel(x + fwd.du(x, y), y + fwd.dv(x, y));
    m.inconsistency = c.err;
    set.matches.push_back(m);
  }
  return set;
}

double mean_flow_magnitude(const FlowField& fwd) {
  double sum = 0.0;
  long count = 0;
  for (int y = 0; y < fwd.height; ++y) {
    for (int x = 0; x < fwd.width; ++x) {
      if (!fwd.valid(x, y)) continue;
      sum += std::hypot(static_cast<double>(fwd.du(x, y)), static_cast<double>(fwd.dv(x, y)));
      ++count;
    }
  }
  if (count == 0) fail(ErrorCode::EmptyFlow, "no valid flow pixels");
  return sum / static_cast<double>(count);
}

double mean_match_flow_magnitude(const MatchSet& matches) {
  if (matches.empty()) fail(ErrorCode::EmptyFlow, "no matches");
  double sum = 0.0;
  for (const Match& m : matches.matches) sum += (m.p_prev - m.p_cur).norm();
  return sum / static_cast<double>(matches.size());
}

}  // namespace dfvo
