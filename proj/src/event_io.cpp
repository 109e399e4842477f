#include "tnt/event_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "tnt/binary_io.hpp"
#include "tnt/errors.hpp"

namespace tnt {

namespace {

std::uint16_t checked_pixel(double v, int limit, const char* axis, std::size_t index) {
  if (v != std::floor(v) || v < 0.0 || v >= limit || v > 65535.0) {
    throw ValidationError("EVT1: event " + std::to_string(index) + " has " + axis +
                          " coordinate not a pixel index inside the sensor");
  }
  return static_cast<std::uint16_t>(v);
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace

void write_evt1(std::ostream& out, const EventStream& stream) {
  validate(stream.geometry);
  if (stream.time_unit != TimeUnit::microseconds) {
    throw ValidationError("EVT1 stores microsecond timestamps; stream is in scaled time");
  }
  if (stream.geometry.width > 65535 || stream.geometry.height > 65535) {
    throw ValidationError("EVT1: geometry exceeds u16 range");
  }
  out.write("EVT1", 4);
  bin::write<std::uint32_t>(out, kEvt1Version);
  bin::write<std::uint16_t>(out, static_cast<std::uint16_t>(stream.geometry.width));
  bin::write<std::uint16_t>(out, static_cast<std::uint16_t>(stream.geometry.height));
  bin::write<std::uint64_t>(out, stream.size());
  for (std::size_t i = 0; i < stream.size(); ++i) {
    const Event& e = stream.events[i];
    if (!(e.t >= 0.0) || e.t != std::floor(e.t) || e.t >= 18446744073709551616.0) {
      throw ValidationError("EVT1: event " + std::to_string(i) +
                            " timestamp is not a non-negative whole microsecond");
    }
    if (e.p != 1 && e.p != -1) {
      throw ValidationError("EVT1: event " + std::to_string(i) + " has invalid polarity");
    }
    bin::write<std::uint64_t>(out, static_cast<std::uint64_t>(e.t));
    bin::write<std::uint16_t>(out, checked_pixel(e.x, stream.geometry.width, "x", i));
    bin::write<std::uint16_t>(out, checked_pixel(e.y, stream.geometry.height, "y", i));
    bin::write<std::int8_t>(out, e.p);
    bin::write<std::uint8_t>(out, 0);
  }
  if (!out) throw IoError("EVT1: write failed");
}

void write_evt1(const std::filesystem::path& path, const EventStream& stream) {
  auto out = open_out(path);
  write_evt1(out, stream);
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

EventStream read_evt1(std::istream& in) {
  bin::expect_magic(in, "EVT1", "EVT1");
  const auto version = bin::read<std::uint32_t>(in, "version");
  if (version != kEvt1Version) {
    throw FormatError("EVT1: unsupported version " + std::to_string(version));
  }
  EventStream stream;
  stream.geometry.width = bin::read<std::uint16_t>(in, "width");
  stream.geometry.height = bin::read<std::uint16_t>(in, "height");
  if (stream.geometry.width == 0 || stream.geometry.height == 0) {
    throw FormatError("EVT1: zero sensor dimension");
  }
  const auto count = bin::read<std::uint64_t>(in, "event count");

  // Reject a count that the remaining payload cannot hold before allocating.
  const auto here = in.tellg();
  if (here != std::streampos(-1)) {
    in.seekg(0, std::ios::end);
    const auto end = in.tellg();
    in.seekg(here);
    const auto available = static_cast<std::uint64_t>(end - here);
    if (count > available / kEvt1RecordBytes) {
      throw FormatError("EVT1: truncated payload (header declares " + std::to_string(count) +
                        " events, file holds " + std::to_string(available / kEvt1RecordBytes) + ")");
    }
    stream.events.reserve(count);
  }

  for (std::uint64_t i = 0; i < count; ++i) {
    char rec[kEvt1RecordBytes];
    in.read(rec, kEvt1RecordBytes);
    if (in.gcount() != static_cast<std::streamsize>(kEvt1RecordBytes)) {
      throw FormatError("EVT1: truncated payload at record " + std::to_string(i));
    }
    std::istringstream r(std::string(rec, kEvt1RecordBytes));
    Event e;
    e.t = static_cast<double>(bin::read<std::uint64_t>(r, "t"));
    e.x = bin::read<std::uint16_t>(r, "x");
    e.y = bin::read<std::uint16_t>(r, "y");
    e.p = bin::read<std::int8_t>(r, "p");
    const auto pad = bin::read<std::uint8_t>(r, "pad");
    if (e.p != 1 && e.p != -1) {
      throw FormatError("EVT1: bad polarity " + std::to_string(static_cast<int>(e.p)) +
                        " at record " + std::to_string(i));
    }
    if (pad != 0) throw FormatError("EVT1: nonzero pad byte at record " + std::to_string(i));
    stream.events.push_back(e);
  }
  return canonicalize(std::move(stream));
}

EventStream read_evt1(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_evt1(in);
}

void write_events_csv(std::ostream& out, const EventStream& stream) {
  out << "t_us,x,y,p\n";
  // Shortest round-trip formatting keeps the CSV lossless.
  auto put = [&out](double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    out.write(buf, ptr - buf);
  };
  for (const Event& e : stream.events) {
    put(e.t);
    out << ',';
    put(e.x);
    out << ',';
    put(e.y);
    out << ',' << static_cast<int>(e.p) << '\n';
  }
}

EventStream read_events_csv(std::istream& in, SensorGeometry geometry) {
  validate(geometry);
  std::string line;
  if (!std::getline(in, line)) throw FormatError("CSV: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t_us,x,y,p") throw FormatError("CSV: expected header 't_us,x,y,p'");

  EventStream stream;
  stream.geometry = geometry;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    double fields[4];
    const char* cur = line.data();
    const char* end = line.data() + line.size();
    for (int k = 0; k < 4; ++k) {
      auto [ptr, ec] = std::from_chars(cur, end, fields[k]);
      if (ec != std::errc() || (k < 3 && (ptr == end || *ptr != ',')) || (k == 3 && ptr != end)) {
        throw FormatError("CSV: malformed line " + std::to_string(lineno));
      }
      cur = ptr + 1;
    }
    if (fields[3] != 1.0 && fields[3] != -1.0) {
      throw FormatError("CSV: bad polarity on line " + std::to_string(lineno));
    }
    stream.events.push_back({fields[0], fields[1], fields[2], static_cast<std::int8_t>(fields[3])});
  }
  return canonicalize(std::move(stream));
}

EventStream read_events(const std::filesystem::path& path, SensorGeometry csv_geometry) {
  if (path.extension() == ".csv") {
    auto in = open_in(path);
    return read_events_csv(in, csv_geometry);
  }
  return read_evt1(path);
}

}  // namespace tnt
