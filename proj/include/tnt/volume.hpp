#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "tnt/event.hpp"

namespace tnt {

// Signed W x H x B grid of polarity mass. Storage is bin-major, then row,
// then column: index = (b * H + y) * W + x, which is also the VOL1 order
// and the channel-first layout the classifier reads.
class EventVolume {
 public:
  EventVolume() = default;
  EventVolume(SensorGeometry geometry, int bins);

  const SensorGeometry& geometry() const { return geometry_; }
  int width() const { return geometry_.width; }
  int height() const { return geometry_.height; }
  int bins() const { return bins_; }

  std::size_t index(int x, int y, int b) const {
    return (static_cast<std::size_t>(b) * geometry_.height + y) * geometry_.width + x;
  }
  double& at(int x, int y, int b) { return data_[index(x, y, b)]; }
  double at(int x, int y, int b) const { return data_[index(x, y, b)]; }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  double sum() const;
  double max_abs() const;

  friend bool operator==(const EventVolume&, const EventVolume&) = default;

 private:
  SensorGeometry geometry_;
  int bins_ = 0;
  std::vector<double> data_;
};

// Linear sampling kernel max(0, 1 - |a|).
inline double linear_kernel(double a) {
  const double w = 1.0 - (a < 0.0 ? -a : a);
  return w > 0.0 ? w : 0.0;
}

// Trilinear insertion of every event into a W x H x B volume. Contributions
// to cells outside the grid are discarded. Accumulation follows the stream
// order, so identical inputs give bit-identical volumes.
EventVolume build_volume(const EventStream& stream, SensorGeometry geometry, int bins);

// Integer translation with zero fill: out(x, y, b) = in(x - dx, y - dy, b).
EventVolume shift(const EventVolume& volume, int dx, int dy);

// Infinity norm of a - b over cells at least `margin` away from the x/y
// border (all bins). Throws on shape mismatch.
double max_abs_diff(const EventVolume& a, const EventVolume& b, std::optional<int> margin = {});

// VOL1 layout, little-endian:
//   "VOL1" | u32 version=1 | u16 W | u16 H | u16 B | u16 pad | W*H*B f64
inline constexpr std::uint32_t kVol1Version = 1;

void write_vol1(std::ostream& out, const EventVolume& volume);
void write_vol1(const std::filesystem::path& path, const EventVolume& volume);
EventVolume read_vol1(std::istream& in);
EventVolume read_vol1(const std::filesystem::path& path);

}  // namespace tnt
