#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "tnt/event.hpp"

namespace tnt {

struct IdxImages;

// Linear intensity image, row-major, non-negative.
struct IntensityFrame {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
};

// A glyph bitmap with values in [0, 1] composited over a flat background:
// intensity = background + contrast * glyph.
struct PatternSource {
  int width = 0;
  int height = 0;
  std::vector<double> glyph;
  double background = 0.1;
  double contrast = 1.0;

  double glyph_at(int u, int v) const { return glyph[static_cast<std::size_t>(v) * width + u]; }

  // Built-in digits 0-9: 5x7 bitmaps upscaled (nearest) to 20x20.
  static PatternSource builtin(int id);
  // One image of an IDX tensor, bytes rescaled to [0, 1].
  static PatternSource from_idx(const IdxImages& images, std::size_t index);
};

inline constexpr int kBuiltinGlyphCount = 10;
inline constexpr int kBuiltinGlyphSize = 20;

struct TrajectorySegment {
  double duration = 0.0;  // seconds
  Flow flow;              // pixels per second
};

// Piecewise-constant motion of the pattern's top-left corner.
struct Trajectory {
  double start_x = 0.0;
  double start_y = 0.0;
  std::vector<TrajectorySegment> segments;

  double total_duration() const;
  std::pair<double, double> offset_at(double t) const;

  static Trajectory constant(double start_x, double start_y, Flow flow, double duration);
};

struct SimParams {
  double epsilon = 0.15;
  double frame_rate = 200.0;
  double duration = 0.3;
  double intensity_floor = 1e-3;
  double noise_rate = 0.0;  // spurious events per pixel per second
  std::uint64_t seed = 0;
};

void validate(const SimParams& params);

// Places the glyph with its top-left corner at `offset` using bilinear
// sampling; everything else is background.
IntensityFrame render(const PatternSource& pattern, std::pair<double, double> offset,
                      SensorGeometry geometry);

// Frame-based log-intensity trigger simulator. Frames are rendered at
// params.frame_rate over the trajectory's duration; each pixel keeps a
// reference log level initialised from the first frame. Threshold crossings
// between frames get linearly interpolated timestamps, rounded to whole
// microseconds. Result is canonical, in microseconds.
EventStream generate_events(const PatternSource& pattern, const Trajectory& trajectory,
                            const SimParams& params, SensorGeometry geometry);

// n flows at angles 2*pi*k/n, all with magnitude `speed`.
std::vector<Flow> motion_set(int n, double speed);

// Direction x speed grid: n / levels directions at angles 2*pi*k/(n/levels),
// each at speeds speed*(j+1)/levels for j = 0..levels-1. Flow index is
// k*levels + j, so index 0 is the slowest rightward motion. levels = 1 is
// motion_set(n, speed). n must be a multiple of levels.
std::vector<Flow> motion_set(int n, double speed, int levels);

// Deterministic 64-bit mixing used to derive per-job seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

// Uniform double in [0, 1) from the top 53 bits; platform independent.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace tnt
