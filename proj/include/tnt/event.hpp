#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace tnt {

// A single sensor event. Coordinates are doubles so the same type carries
// raw integer pixels and transformed (sub-pixel, possibly negative) ones.
struct Event {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  std::int8_t p = 1;

  friend bool operator==(const Event&, const Event&) = default;
};

// Canonical order: t, then y, x, p ascending.
bool canonical_less(const Event& a, const Event& b);

struct SensorGeometry {
  int width = 0;
  int height = 0;

  friend bool operator==(const SensorGeometry&, const SensorGeometry&) = default;
};

// Raw streams carry microseconds; `scaled` marks timestamps mapped onto the
// bin axis [0, B-1].
enum class TimeUnit { microseconds, scaled };

struct EventStream {
  std::vector<Event> events;
  SensorGeometry geometry;
  TimeUnit time_unit = TimeUnit::microseconds;

  bool empty() const { return events.empty(); }
  std::size_t size() const { return events.size(); }
};

struct Flow {
  double vx = 0.0;
  double vy = 0.0;

  Flow operator+(const Flow& o) const { return {vx + o.vx, vy + o.vy}; }
  Flow operator-(const Flow& o) const { return {vx - o.vx, vy - o.vy}; }
  friend bool operator==(const Flow&, const Flow&) = default;
};

struct LandmarkEstimate {
  double lx = 0.0;
  double ly = 0.0;
};

void validate(const SensorGeometry& geometry);

// Sorts into canonical order. Throws ValidationError naming the index of the
// first event with a non-finite field or a polarity other than -1/+1.
EventStream canonicalize(EventStream stream);

// Shifts timestamps so the first event sits at t = 0. Requires a non-empty
// canonical stream.
EventStream zero_time(EventStream stream);

// Maps [t_first, t_last] linearly onto [0, target_max]. A stream whose
// timestamps all coincide maps to t = 0 everywhere.
EventStream scale_time(EventStream stream, double target_max);

// Constant optical flow: (x, y) <- (x + vx t, y + vy t) in the stream's
// current time unit.
EventStream apply_flow(EventStream stream, Flow flow);

EventStream translate(EventStream stream, double sx, double sy);

// Unweighted mean event position; polarity is ignored.
LandmarkEstimate centroid(const EventStream& stream);

EventStream center(EventStream stream, LandmarkEstimate landmark);

struct PolarityCounts {
  std::size_t positive = 0;
  std::size_t negative = 0;
};
PolarityCounts count_polarities(std::span<const Event> events);

}  // namespace tnt
