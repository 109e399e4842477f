#include "tnt/volume.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "tnt/binary_io.hpp"
#include "tnt/errors.hpp"

namespace tnt {

EventVolume::EventVolume(SensorGeometry geometry, int bins) : geometry_(geometry), bins_(bins) {
  validate(geometry);
  if (bins < 1) throw ValidationError("volume needs at least one bin");
  data_.assign(static_cast<std::size_t>(geometry.width) * geometry.height * bins, 0.0);
}

double EventVolume::sum() const {
  double s = 0.0;
  for (double v : data_) s += v;
  return s;
}

double EventVolume::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

EventVolume build_volume(const EventStream& stream, SensorGeometry geometry, int bins) {
  if (stream.geometry != geometry) {
    throw ValidationError("build_volume: stream geometry does not match the requested grid");
  }
  EventVolume volume(geometry, bins);
  const int w = geometry.width;
  const int h = geometry.height;
  for (const Event& e : stream.events) {
    // The kernel is nonzero on at most the two integer neighbours per axis.
    if (!(e.x > -1.0 && e.x < w && e.y > -1.0 && e.y < h && e.t > -1.0 && e.t < bins)) continue;
    const int x0 = static_cast<int>(std::floor(e.x));
    const int y0 = static_cast<int>(std::floor(e.y));
    const int b0 = static_cast<int>(std::floor(e.t));
    for (int b = b0; b <= b0 + 1; ++b) {
      if (b < 0 || b >= bins) continue;
      const double wb = linear_kernel(b - e.t);
      if (wb == 0.0) continue;
      for (int y = y0; y <= y0 + 1; ++y) {
        if (y < 0 || y >= h) continue;
        const double wy = linear_kernel(y - e.y);
        if (wy == 0.0) continue;
        for (int x = x0; x <= x0 + 1; ++x) {
          if (x < 0 || x >= w) continue;
          const double wx = linear_kernel(x - e.x);
          if (wx == 0.0) continue;
          volume.at(x, y, b) += e.p * wx * wy * wb;
        }
      }
    }
  }
  return volume;
}

EventVolume shift(const EventVolume& volume, int dx, int dy) {
  EventVolume out(volume.geometry(), volume.bins());
  for (int b = 0; b < volume.bins(); ++b) {
    for (int y = 0; y < volume.height(); ++y) {
      const int sy = y - dy;
      if (sy < 0 || sy >= volume.height()) continue;
      for (int x = 0; x < volume.width(); ++x) {
        const int sx = x - dx;
        if (sx < 0 || sx >= volume.width()) continue;
        out.at(x, y, b) = volume.at(sx, sy, b);
      }
    }
  }
  return out;
}

double max_abs_diff(const EventVolume& a, const EventVolume& b, std::optional<int> margin) {
  if (a.geometry() != b.geometry() || a.bins() != b.bins()) {
    throw ValidationError("max_abs_diff: volume shapes differ");
  }
  const int m = margin.value_or(0);
  if (m < 0) throw ValidationError("max_abs_diff: negative margin");
  double worst = 0.0;
  for (int bin = 0; bin < a.bins(); ++bin) {
    for (int y = m; y < a.height() - m; ++y) {
      for (int x = m; x < a.width() - m; ++x) {
        worst = std::max(worst, std::abs(a.at(x, y, bin) - b.at(x, y, bin)));
      }
    }
  }
  return worst;
}

void write_vol1(std::ostream& out, const EventVolume& volume) {
  if (volume.width() > 65535 || volume.height() > 65535 || volume.bins() > 65535) {
    throw ValidationError("VOL1: dimension exceeds u16 range");
  }
  out.write("VOL1", 4);
  bin::write<std::uint32_t>(out, kVol1Version);
  bin::write<std::uint16_t>(out, static_cast<std::uint16_t>(volume.width()));
  bin::write<std::uint16_t>(out, static_cast<std::uint16_t>(volume.height()));
  bin::write<std::uint16_t>(out, static_cast<std::uint16_t>(volume.bins()));
  bin::write<std::uint16_t>(out, 0);
  for (double v : volume.data()) bin::write<double>(out, v);
  if (!out) throw IoError("VOL1: write failed");
}

void write_vol1(const std::filesystem::path& path, const EventVolume& volume) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_vol1(out, volume);
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

EventVolume read_vol1(std::istream& in) {
  bin::expect_magic(in, "VOL1", "VOL1");
  const auto version = bin::read<std::uint32_t>(in, "version");
  if (version != kVol1Version) throw FormatError("VOL1: unsupported version " + std::to_string(version));
  const int w = bin::read<std::uint16_t>(in, "width");
  const int h = bin::read<std::uint16_t>(in, "height");
  const int b = bin::read<std::uint16_t>(in, "bins");
  bin::read<std::uint16_t>(in, "pad");
  if (w == 0 || h == 0 || b == 0) throw FormatError("VOL1: zero dimension");
  EventVolume volume({w, h}, b);
  for (double& v : volume.data()) {
    v = bin::read<double>(in, "volume data");
    if (!std::isfinite(v)) throw FormatError("VOL1: non-finite cell value");
  }
  return volume;
}

EventVolume read_vol1(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  return read_vol1(in);
}

}  // namespace tnt
