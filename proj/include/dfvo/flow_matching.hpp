#pragma once

#include <cstdint>

#include "dfvo/raster.hpp"

namespace dfvo {

// Forward-backward inconsistency of a bidirectional flow pair:
//   e(p) = | F_fwd(p) + F_bwd(p + F_fwd(p)) |
// with the backward field sampled by bilinear interpolation at the
// (non-integer) forward endpoint. Pixels whose endpoint leaves the image,
// or whose forward flow / any backward sample under the footprint is the
// invalid sentinel, get +inf.
ScalarField fb_inconsistency(const FlowField& fwd, const FlowField& bwd);

enum class SelectionMode : std::uint8_t {
  kGlobal,  // best-N over the whole image
  kGrid,    // best matches per cell of a uniform grid, then merged
};

struct SelectOptions {
  int border_px = 10;  // candidate exclusion band at the image border
  SelectionMode mode = SelectionMode::kGlobal;
  int grid_cols = 10;
  int grid_rows = 10;
};

// The n candidates with smallest finite inconsistency, sorted ascending
// with ties broken by row-major order of p_cur. Returns fewer than n
// matches only when fewer finite-error candidates exist (the caller can
// see the shortfall via MatchSet::finite_candidates).
MatchSet select_best_n(const FlowField& fwd, const ScalarField& err, int n, const SelectOptions& options = {});

// Mean L2 flow magnitude over valid pixels of the whole field.
double mean_flow_magnitude(const FlowField& fwd);

// Mean L2 flow magnitude over the selected matches only (the alternative
// reading of the branch gate).
double mean_match_flow_magnitude(const MatchSet& matches);

}  // namespace dfvo
