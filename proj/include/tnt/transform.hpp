#pragma once

#include "tnt/event.hpp"

namespace tnt {

enum class CenterMode { none, canvas, centroid };
enum class Variant { baseline, tnt };

struct TntOptions {
  int bins = 9;
  CenterMode center_mode = CenterMode::centroid;
  // Events with scaled t <= min_time are dropped before the division.
  double min_time = 0.0;
};

void validate(const TntOptions& opts);

// Temporal normalization: (x, y, t) -> (x / t, y / t, t). The stream must be
// in scaled time. Events at or below opts.min_time are removed.
EventStream temporal_normalize(const EventStream& stream, double min_time = 0.0);

// Pixel position that the transformed origin maps to: the canvas center
// ((W-1)/2, (H-1)/2).
LandmarkEstimate grid_origin(SensorGeometry geometry);

LandmarkEstimate estimate_landmark(const EventStream& stream, CenterMode mode);

// Full preprocessing from a raw canonical stream to the grid frame the
// voxelizer consumes.
//   baseline: zero_time -> scale_time(B-1)
//   tnt:      zero_time -> center on landmark -> scale_time(B-1)
//             -> temporal_normalize -> shift by grid_origin
// With CenterMode::none the tnt variant skips both the centering and the
// final shift. Out-of-grid events are kept; clipping happens in the voxelizer.
EventStream prepare(const EventStream& stream, const TntOptions& opts, Variant variant);

// Largest per-event coordinate gap between
//   temporal_normalize(apply_flow(base, v1))  and
//   translate(temporal_normalize(apply_flow(base, v2)), v1 - v2).
// `base` must be in scaled time with every t > 0.
double flow_to_translation_discrepancy(const EventStream& base, Flow v1, Flow v2);

}  // namespace tnt
