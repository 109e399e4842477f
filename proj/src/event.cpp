#include "tnt/event.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "tnt/errors.hpp"

namespace tnt {

bool canonical_less(const Event& a, const Event& b) {
  return std::tie(a.t, a.y, a.x, a.p) < std::tie(b.t, b.y, b.x, b.p);
}

void validate(const SensorGeometry& geometry) {
  if (geometry.width < 1 || geometry.height < 1) {
    throw ValidationError("sensor geometry must be at least 1x1, got " +
                          std::to_string(geometry.width) + "x" + std::to_string(geometry.height));
  }
}

EventStream canonicalize(EventStream stream) {
  for (std::size_t i = 0; i < stream.events.size(); ++i) {
    const Event& e = stream.events[i];
    if (!std::isfinite(e.t) || !std::isfinite(e.x) || !std::isfinite(e.y)) {
      throw ValidationError("event " + std::to_string(i) + " has a non-finite field");
    }
    if (e.p != 1 && e.p != -1) {
      throw ValidationError("event " + std::to_string(i) + " has polarity " +
                            std::to_string(static_cast<int>(e.p)));
    }
  }
  std::stable_sort(stream.events.begin(), stream.events.end(), canonical_less);
  return stream;
}

EventStream zero_time(EventStream stream) {
  if (stream.empty()) throw ValidationError("zero_time: empty stream");
  const double t0 = stream.events.front().t;
  for (Event& e : stream.events) e.t -= t0;
  return stream;
}

EventStream scale_time(EventStream stream, double target_max) {
  if (!(target_max > 0.0) || !std::isfinite(target_max)) {
    throw ValidationError("scale_time: target_max must be positive");
  }
  stream.time_unit = TimeUnit::scaled;
  if (stream.empty()) return stream;
  const double t_first = stream.events.front().t;
  const double span = stream.events.back().t - t_first;
  for (Event& e : stream.events) {
    e.t = span > 0.0 ? target_max * ((e.t - t_first) / span) : 0.0;
  }
  // The quotient for the last event is exactly 1, so it lands on target_max.
  return stream;
}

EventStream apply_flow(EventStream stream, Flow flow) {
  for (Event& e : stream.events) {
    e.x += flow.vx * e.t;
    e.y += flow.vy * e.t;
  }
  return stream;
}

EventStream translate(EventStream stream, double sx, double sy) {
  for (Event& e : stream.events) {
    e.x += sx;
    e.y += sy;
  }
  return stream;
}

LandmarkEstimate centroid(const EventStream& stream) {
  if (stream.empty()) throw ValidationError("centroid: empty stream");
  double sx = 0.0;
  double sy = 0.0;
  for (const Event& e : stream.events) {
    sx += e.x;
    sy += e.y;
  }
  const auto n = static_cast<double>(stream.size());
  return {sx / n, sy / n};
}

EventStream center(EventStream stream, LandmarkEstimate landmark) {
  return translate(std::move(stream), -landmark.lx, -landmark.ly);
}

PolarityCounts count_polarities(std::span<const Event> events) {
  PolarityCounts counts;
  for (const Event& e : events) (e.p > 0 ? counts.positive : counts.negative)++;
  return counts;
}

}  // namespace tnt
