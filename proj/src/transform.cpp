#include "tnt/transform.hpp"

#include <algorithm>
#include <cmath>

#include "tnt/errors.hpp"

namespace tnt {

void validate(const TntOptions& opts) {
  if (opts.bins < 2) throw ValidationError("bins must be >= 2");
  if (!(opts.min_time >= 0.0) || !std::isfinite(opts.min_time)) {
    throw ValidationError("min_time must be finite and >= 0");
  }
}

EventStream temporal_normalize(const EventStream& stream, double min_time) {
  if (stream.time_unit != TimeUnit::scaled) {
    throw ValidationError("temporal normalization requires a stream in scaled time");
  }
  EventStream out;
  out.geometry = stream.geometry;
  out.time_unit = TimeUnit::scaled;
  out.events.reserve(stream.size());
  for (const Event& e : stream.events) {
    if (e.t <= min_time) continue;
    out.events.push_back({e.t, e.x / e.t, e.y / e.t, e.p});
  }
  // Within one timestamp the map is monotone in (x, y), so order is kept.
  return out;
}

LandmarkEstimate grid_origin(SensorGeometry geometry) {
  return {(geometry.width - 1) / 2.0, (geometry.height - 1) / 2.0};
}

LandmarkEstimate estimate_landmark(const EventStream& stream, CenterMode mode) {
  switch (mode) {
    case CenterMode::none:
      return {0.0, 0.0};
    case CenterMode::canvas:
      return grid_origin(stream.geometry);
    case CenterMode::centroid:
      return centroid(stream);
  }
  return {0.0, 0.0};
}

EventStream prepare(const EventStream& stream, const TntOptions& opts, Variant variant) {
  validate(opts);
  if (stream.empty()) throw ValidationError("prepare: empty stream");
  const double target_max = opts.bins - 1;

  EventStream zeroed = zero_time(stream);
  if (variant == Variant::baseline) return scale_time(std::move(zeroed), target_max);

  const LandmarkEstimate landmark = estimate_landmark(zeroed, opts.center_mode);
  EventStream centered = center(std::move(zeroed), landmark);
  EventStream normalized =
      temporal_normalize(scale_time(std::move(centered), target_max), opts.min_time);
  if (opts.center_mode == CenterMode::none) return normalized;
  const LandmarkEstimate origin = grid_origin(stream.geometry);
  return translate(std::move(normalized), origin.lx, origin.ly);
}

double flow_to_translation_discrepancy(const EventStream& base, Flow v1, Flow v2) {
  if (base.time_unit != TimeUnit::scaled) {
    throw ValidationError("flow check requires a stream in scaled time");
  }
  for (const Event& e : base.events) {
    if (!(e.t > 0.0)) throw ValidationError("flow check requires every t > 0");
  }
  const Flow delta = v1 - v2;
  const EventStream lhs = temporal_normalize(apply_flow(base, v1));
  const EventStream rhs = translate(temporal_normalize(apply_flow(base, v2)), delta.vx, delta.vy);
  double worst = 0.0;
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    worst = std::max({worst, std::abs(lhs.events[i].x - rhs.events[i].x),
                      std::abs(lhs.events[i].y - rhs.events[i].y)});
  }
  return worst;
}

}  // namespace tnt
