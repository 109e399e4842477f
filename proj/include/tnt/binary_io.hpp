#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <type_traits>

#include "tnt/errors.hpp"

namespace tnt::bin {

// Fixed-endianness scalar codecs over std streams. Reads throw FormatError
// on a short read so callers can report truncation uniformly.

template <typename T>
  requires std::is_trivially_copyable_v<T>
T byteswap_if(T value, std::endian order) {
  if (order == std::endian::native || sizeof(T) == 1) return value;
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

template <typename T>
void write(std::ostream& out, T value, std::endian order = std::endian::little) {
  value = byteswap_if(value, order);
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read(std::istream& in, const char* what, std::endian order = std::endian::little) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (in.gcount() != static_cast<std::streamsize>(sizeof(T))) {
    throw FormatError(std::string("truncated input while reading ") + what);
  }
  return byteswap_if(value, order);
}

inline void read_bytes(std::istream& in, char* dst, std::size_t n, const char* what) {
  in.read(dst, static_cast<std::streamsize>(n));
  if (in.gcount() != static_cast<std::streamsize>(n)) {
    throw FormatError(std::string("truncated input while reading ") + what);
  }
}

// Consumes four magic bytes and throws if they differ from `expected`.
inline void expect_magic(std::istream& in, const char (&expected)[5], const char* format) {
  char got[4];
  read_bytes(in, got, 4, "magic");
  if (std::memcmp(got, expected, 4) != 0) {
    throw FormatError(std::string("bad magic: not a ") + format + " file");
  }
}

}  // namespace tnt::bin
