#include "tnt/sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "tnt/errors.hpp"
#include "tnt/idx.hpp"

namespace tnt {

namespace {

// 5x7 digit font, one string per row.
constexpr std::array<std::array<const char*, 7>, kBuiltinGlyphCount> kDigitFont = {{
    {"01110", "10001", "10011", "10101", "11001", "10001", "01110"},
    {"00100", "01100", "00100", "00100", "00100", "00100", "01110"},
    {"01110", "10001", "00001", "00010", "00100", "01000", "11111"},
    {"11111", "00010", "00100", "00010", "00001", "10001", "01110"},
    {"00010", "00110", "01010", "10010", "11111", "00010", "00010"},
    {"11111", "10000", "11110", "00001", "00001", "10001", "01110"},
    {"00110", "01000", "10000", "11110", "10001", "10001", "01110"},
    {"11111", "00001", "00010", "00100", "01000", "01000", "01000"},
    {"01110", "10001", "10001", "01110", "10001", "10001", "01110"},
    {"01110", "10001", "10001", "01111", "00001", "00010", "01100"},
}};

double sample_bilinear(const PatternSource& pattern, double u, double v) {
  const double uf = std::floor(u);
  const double vf = std::floor(v);
  if (uf < -1.0 || vf < -1.0 || uf >= pattern.width || vf >= pattern.height) return 0.0;
  const int u0 = static_cast<int>(uf);
  const int v0 = static_cast<int>(vf);
  const double fu = u - uf;
  const double fv = v - vf;
  double acc = 0.0;
  for (int j = 0; j < 2; ++j) {
    const int vv = v0 + j;
    if (vv < 0 || vv >= pattern.height) continue;
    const double wv = j == 0 ? 1.0 - fv : fv;
    for (int i = 0; i < 2; ++i) {
      const int uu = u0 + i;
      if (uu < 0 || uu >= pattern.width) continue;
      const double wu = i == 0 ? 1.0 - fu : fu;
      acc += wu * wv * pattern.glyph_at(uu, vv);
    }
  }
  return acc;
}

}  // namespace

PatternSource PatternSource::builtin(int id) {
  if (id < 0 || id >= kBuiltinGlyphCount) {
    throw ValidationError("unknown built-in glyph id " + std::to_string(id));
  }
  PatternSource p;
  p.width = kBuiltinGlyphSize;
  p.height = kBuiltinGlyphSize;
  p.glyph.resize(static_cast<std::size_t>(p.width) * p.height);
  const auto& rows = kDigitFont[static_cast<std::size_t>(id)];
  for (int v = 0; v < p.height; ++v) {
    const int row = v * 7 / p.height;
    for (int u = 0; u < p.width; ++u) {
      const int col = u * 5 / p.width;
      p.glyph[static_cast<std::size_t>(v) * p.width + u] = rows[row][col] == '1' ? 1.0 : 0.0;
    }
  }
  return p;
}

PatternSource PatternSource::from_idx(const IdxImages& images, std::size_t index) {
  if (index >= images.count) throw ValidationError("IDX image index out of range");
  PatternSource p;
  p.width = static_cast<int>(images.cols);
  p.height = static_cast<int>(images.rows);
  const std::uint8_t* src = images.image(index);
  p.glyph.resize(static_cast<std::size_t>(p.width) * p.height);
  for (std::size_t i = 0; i < p.glyph.size(); ++i) p.glyph[i] = src[i] / 255.0;
  return p;
}

double Trajectory::total_duration() const {
  double total = 0.0;
  for (const auto& s : segments) total += s.duration;
  return total;
}

std::pair<double, double> Trajectory::offset_at(double t) const {
  double x = start_x;
  double y = start_y;
  double remaining = t;
  for (const auto& s : segments) {
    const double dt = std::min(remaining, s.duration);
    if (dt <= 0.0) break;
    x += s.flow.vx * dt;
    y += s.flow.vy * dt;
    remaining -= dt;
  }
  return {x, y};
}

Trajectory Trajectory::constant(double start_x, double start_y, Flow flow, double duration) {
  return Trajectory{start_x, start_y, {{duration, flow}}};
}

void validate(const SimParams& params) {
  if (!(params.epsilon > 0.0)) throw ValidationError("epsilon must be > 0");
  if (!(params.frame_rate > 0.0)) throw ValidationError("frame_rate must be > 0");
  if (!(params.intensity_floor > 0.0)) throw ValidationError("intensity_floor must be > 0");
  if (!(params.noise_rate >= 0.0)) throw ValidationError("noise_rate must be >= 0");
}

IntensityFrame render(const PatternSource& pattern, std::pair<double, double> offset,
                      SensorGeometry geometry) {
  validate(geometry);
  IntensityFrame frame{geometry.width, geometry.height,
                       std::vector<double>(static_cast<std::size_t>(geometry.width) * geometry.height)};
  for (int y = 0; y < geometry.height; ++y) {
    for (int x = 0; x < geometry.width; ++x) {
      const double g = sample_bilinear(pattern, x - offset.first, y - offset.second);
      frame.data[static_cast<std::size_t>(y) * geometry.width + x] =
          pattern.background + pattern.contrast * g;
    }
  }
  return frame;
}

EventStream generate_events(const PatternSource& pattern, const Trajectory& trajectory,
                            const SimParams& params, SensorGeometry geometry) {
  validate(params);
  validate(geometry);
  for (const auto& s : trajectory.segments) {
    if (!(s.duration > 0.0)) throw ValidationError("trajectory segments need positive duration");
  }
  const double duration = trajectory.total_duration();
  if (!(duration > 0.0)) throw ValidationError("trajectory has zero duration");

  const int intervals = std::max(1, static_cast<int>(std::lround(duration * params.frame_rate)));
  const double frame_dt_us = duration * 1e6 / intervals;
  const std::size_t pixels = static_cast<std::size_t>(geometry.width) * geometry.height;

  auto log_frame = [&](double t_seconds) {
    IntensityFrame f = render(pattern, trajectory.offset_at(t_seconds), geometry);
    for (double& v : f.data) v = std::log(v + params.intensity_floor);
    return f.data;
  };

  EventStream stream;
  stream.geometry = geometry;
  std::vector<double> reference = log_frame(0.0);

  for (int f = 1; f <= intervals; ++f) {
    const double t_prev = (f - 1) * frame_dt_us;
    const std::vector<double> current = log_frame(f * duration / intervals);
    for (std::size_t i = 0; i < pixels; ++i) {
      const double delta = current[i] - reference[i];
      const double magnitude = std::abs(delta);
      const auto crossings = static_cast<long>(std::floor(magnitude / params.epsilon));
      if (crossings <= 0) continue;
      const std::int8_t polarity = delta > 0.0 ? 1 : -1;
      const double x = static_cast<double>(i % geometry.width);
      const double y = static_cast<double>(i / geometry.width);
      for (long j = 1; j <= crossings; ++j) {
        const double fraction = j * params.epsilon / magnitude;
        stream.events.push_back({std::round(t_prev + fraction * frame_dt_us), x, y, polarity});
      }
      reference[i] += polarity * crossings * params.epsilon;
    }
  }

  if (params.noise_rate > 0.0) {
    // Poisson process over the whole sensor via exponential inter-arrivals.
    std::mt19937_64 rng(mix_seed(params.seed, 0x6e6f697365ULL));
    const double total_rate = params.noise_rate * static_cast<double>(pixels);
    double t = 0.0;
    while (true) {
      t += -std::log(1.0 - uniform01(rng)) / total_rate;
      if (t > duration) break;
      const auto pixel = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(pixels));
      const std::int8_t polarity = uniform01(rng) < 0.5 ? -1 : 1;
      stream.events.push_back({std::round(t * 1e6), static_cast<double>(pixel % geometry.width),
                               static_cast<double>(pixel / geometry.width), polarity});
    }
  }
  return canonicalize(std::move(stream));
}

std::vector<Flow> motion_set(int n, double speed) {
  if (n < 1) throw ValidationError("motion_set needs n >= 1");
  std::vector<Flow> flows;
  flows.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double angle = 2.0 * std::numbers::pi * k / n;
    flows.push_back({speed * std::cos(angle), speed * std::sin(angle)});
  }
  return flows;
}

std::vector<Flow> motion_set(int n, double speed, int levels) {
  if (levels < 1 || n < 1 || n % levels != 0) {
    throw ValidationError("motion_set: count must be a positive multiple of the speed levels");
  }
  std::vector<Flow> flows;
  flows.reserve(static_cast<std::size_t>(n));
  for (const Flow& unit : motion_set(n / levels, 1.0)) {
    for (int j = 0; j < levels; ++j) {
      const double s = speed * (j + 1) / levels;
      flows.push_back({s * unit.vx, s * unit.vy});
    }
  }
  return flows;
}

namespace {
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ b);
  return splitmix64(h ^ c);
}

}  // namespace tnt
