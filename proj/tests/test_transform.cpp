#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "tnt/errors.hpp"
#include "tnt/transform.hpp"

using namespace tnt;

namespace {

EventStream scaled(std::vector<Event> events, SensorGeometry g = {34, 34}) {
  EventStream s;
  s.geometry = g;
  s.time_unit = TimeUnit::scaled;
  s.events = std::move(events);
  return s;
}

// Scaled-time stream with continuous coordinates and every t > 0.
EventStream random_scaled(std::mt19937_64& rng, int n) {
  EventStream s = scaled({});
  for (int i = 0; i < n; ++i) {
    s.events.push_back({0.5 + 7.5 * uniform01(rng), -20 + 40 * uniform01(rng),
                        -20 + 40 * uniform01(rng), static_cast<std::int8_t>((rng() & 1) ? 1 : -1)});
  }
  return canonicalize(std::move(s));
}

}  // namespace

TEST_CASE("temporal normalization arithmetic") {
  const auto out = temporal_normalize(scaled({{0, 3, 0, 1}, {1, -6, 4, 1}, {2, 4, 4, -1}}));
  REQUIRE(out.size() == 2);
  CHECK(out.events[0] == Event{1, -6, 4, 1});
  CHECK(out.events[1] == Event{2, 2, 2, -1});
  CHECK(out.time_unit == TimeUnit::scaled);
}

TEST_CASE("temporal normalization respects min_time and rejects raw time") {
  const auto s = scaled({{0.5, 1, 1, 1}, {1.0, 2, 2, 1}, {1.5, 3, 3, 1}});
  CHECK(temporal_normalize(s, 1.0).size() == 1);
  CHECK(temporal_normalize(s, 0.0).size() == 3);
  auto raw = s;
  raw.time_unit = TimeUnit::microseconds;
  CHECK_THROWS_AS(temporal_normalize(raw), ValidationError);
}

TEST_CASE("options validation") {
  TntOptions o;
  CHECK_NOTHROW(validate(o));
  o.bins = 1;
  CHECK_THROWS_AS(validate(o), ValidationError);
  o = {};
  o.min_time = -1;
  CHECK_THROWS_AS(validate(o), ValidationError);
}

TEST_CASE("grid origin is the canvas center") {
  const auto o = grid_origin({34, 34});
  CHECK(o.lx == 16.5);
  CHECK(o.ly == 16.5);
  const auto c = estimate_landmark(scaled({{1, 0, 0, 1}}, {10, 20}), CenterMode::canvas);
  CHECK(c.lx == 4.5);
  CHECK(c.ly == 9.5);
}

TEST_CASE("prepare composes centering, scaling and the grid offset") {
  // Raw microsecond stream whose centroid is (0, 0) and whose span maps the
  // middle event to t* = 2 with B = 9 (span 400 us, event at 100 us).
  EventStream raw;
  raw.geometry = {34, 34};
  raw.events = {{1000, 0, 0, 1}, {1100, -6, 4, 1}, {1400, 6, -4, 1}};
  raw = canonicalize(raw);
  TntOptions o;
  o.center_mode = CenterMode::centroid;
  const auto out = prepare(raw, o, Variant::tnt);
  REQUIRE(out.size() == 2);  // the t* = 0 event is dropped
  CHECK(out.events[0].t == doctest::Approx(2.0));
  CHECK(out.events[0].x == doctest::Approx(16.5 - 3.0));
  CHECK(out.events[0].y == doctest::Approx(16.5 + 2.0));

  const auto base = prepare(raw, o, Variant::baseline);
  REQUIRE(base.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(base.events[i].x == raw.events[i].x);
    CHECK(base.events[i].y == raw.events[i].y);
  }
  CHECK(base.events.back().t == 8.0);

  CHECK_THROWS_AS(prepare(EventStream{{}, {4, 4}}, o, Variant::tnt), ValidationError);
}

TEST_CASE("prepare with center mode none keeps the raw frame") {
  EventStream raw;
  raw.geometry = {8, 8};
  raw.events = {{0, 1, 1, 1}, {100, 4, 2, 1}};
  TntOptions o;
  o.bins = 5;
  o.center_mode = CenterMode::none;
  const auto out = prepare(raw, o, Variant::tnt);
  REQUIRE(out.size() == 1);
  CHECK(out.events[0].x == 1.0);
  CHECK(out.events[0].y == 0.5);
}

TEST_CASE("flow-to-translation identity") {
  CHECK(flow_to_translation_discrepancy(scaled({{3, 3, 0, 1}}), {2, 0}, {0, 0}) == 0.0);
  std::mt19937_64 rng(5);
  const auto base = random_scaled(rng, 1000);
  CHECK(flow_to_translation_discrepancy(base, {1.25, -0.5}, {1.25, -0.5}) == 0.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Flow v1{-3 + 6 * uniform01(rng), -3 + 6 * uniform01(rng)};
    const Flow v2{-3 + 6 * uniform01(rng), -3 + 6 * uniform01(rng)};
    CHECK(flow_to_translation_discrepancy(base, v1, v2) <= 1e-12);
  }
}

TEST_CASE("time-scaling compatibility") {
  std::mt19937_64 rng(6);
  const auto base = random_scaled(rng, 300);
  const double c = 2.5;
  const Flow v{1.5, -0.75};
  auto scale_by = [](EventStream s, double k) {
    for (auto& e : s.events) e.t *= k;
    return s;
  };
  const auto lhs = temporal_normalize(scale_by(apply_flow(base, v), c));
  const auto rhs = temporal_normalize(scale_by(base, c));
  REQUIRE(lhs.size() == rhs.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    worst = std::max(worst, std::abs(lhs.events[i].x - (rhs.events[i].x + v.vx / c)));
    worst = std::max(worst, std::abs(lhs.events[i].y - (rhs.events[i].y + v.vy / c)));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("canvas-centred events after the first bin stay on the grid") {
  std::mt19937_64 rng(8);
  TntOptions o;
  o.center_mode = CenterMode::canvas;
  for (int trial = 0; trial < 10; ++trial) {
    const auto raw = test::random_raw_stream(rng, 400);
    for (const auto& e : prepare(raw, o, Variant::tnt).events) {
      if (e.t < 1.0) continue;
      CHECK(e.x >= 0.0);
      CHECK(e.x <= 33.0);
      CHECK(e.y >= 0.0);
      CHECK(e.y <= 33.0);
    }
  }
}

TEST_CASE("centroid-centred TNT ignores global translation") {
  std::mt19937_64 rng(9);
  TntOptions o;
  for (int trial = 0; trial < 20; ++trial) {
    const auto raw = test::random_raw_stream(rng, 300);
    const double sx = -8 + 16 * uniform01(rng), sy = -8 + 16 * uniform01(rng);
    const auto a = prepare(raw, o, Variant::tnt);
    const auto b = prepare(translate(raw, sx, sy), o, Variant::tnt);
    REQUIRE(a.size() == b.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      worst = std::max({worst, std::abs(a.events[i].x - b.events[i].x),
                        std::abs(a.events[i].y - b.events[i].y)});
    }
    CHECK(worst <= 1e-9);
  }
}

TEST_CASE("event count is preserved apart from the dropped set") {
  std::mt19937_64 rng(10);
  const auto raw = test::random_raw_stream(rng, 500);
  const auto scaled_stream = scale_time(zero_time(raw), 8.0);
  std::size_t zeros = 0;
  for (const auto& e : scaled_stream.events) zeros += e.t <= 0.0;
  const auto out = temporal_normalize(scaled_stream);
  CHECK(out.size() == raw.size() - zeros);
}
