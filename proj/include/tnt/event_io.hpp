#pragma once

#include <filesystem>
#include <iosfwd>

#include "tnt/event.hpp"

namespace tnt {

// EVT1 binary layout, little-endian:
//   "EVT1" | u32 version=1 | u16 W | u16 H | u64 count |
//   count x { u64 t_us | u16 x | u16 y | i8 p | u8 pad=0 }   (14 bytes each)
inline constexpr std::uint32_t kEvt1Version = 1;
inline constexpr std::size_t kEvt1HeaderBytes = 20;
inline constexpr std::size_t kEvt1RecordBytes = 14;

// Writing requires a microsecond stream with integral, in-range coordinates
// and non-negative integral timestamps; anything else throws ValidationError.
void write_evt1(std::ostream& out, const EventStream& stream);
void write_evt1(const std::filesystem::path& path, const EventStream& stream);

// Reads and canonicalizes. Bad magic, bad version, bad polarity, nonzero pad
// and truncation each raise FormatError with a distinct message.
EventStream read_evt1(std::istream& in);
EventStream read_evt1(const std::filesystem::path& path);

// CSV with header "t_us,x,y,p". Geometry is not part of the CSV, so the
// reader takes it from the caller.
void write_events_csv(std::ostream& out, const EventStream& stream);
EventStream read_events_csv(std::istream& in, SensorGeometry geometry);

// Dispatches on extension: ".csv" uses CSV (geometry required), anything else EVT1.
EventStream read_events(const std::filesystem::path& path, SensorGeometry csv_geometry = {});

}  // namespace tnt
