#include "tnt/idx.hpp"

#include <bit>
#include <fstream>
#include <sstream>

#include "tnt/binary_io.hpp"
#include "tnt/errors.hpp"

namespace tnt {

namespace {

constexpr auto kBig = std::endian::big;

std::uint32_t read_magic(std::istream& in, std::uint32_t expected, const char* what) {
  const auto magic = bin::read<std::uint32_t>(in, "IDX magic", kBig);
  if (magic != expected) {
    std::ostringstream msg;
    msg << "IDX: bad magic 0x" << std::hex << magic << " for " << what << " (expected 0x" << expected
        << ")";
    throw FormatError(msg.str());
  }
  return magic;
}

template <typename Fn>
auto with_file(const std::filesystem::path& path, Fn fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  return fn(in);
}

}  // namespace

IdxImages read_idx_images(std::istream& in) {
  read_magic(in, kIdxImagesMagic, "images");
  IdxImages images;
  images.count = bin::read<std::uint32_t>(in, "IDX image count", kBig);
  images.rows = bin::read<std::uint32_t>(in, "IDX rows", kBig);
  images.cols = bin::read<std::uint32_t>(in, "IDX cols", kBig);
  const auto total = static_cast<std::uint64_t>(images.count) * images.rows * images.cols;
  if (total > (std::uint64_t{1} << 34)) throw FormatError("IDX: implausible image tensor size");
  images.pixels.resize(total);
  bin::read_bytes(in, reinterpret_cast<char*>(images.pixels.data()), total, "IDX pixels");
  return images;
}

IdxImages read_idx_images(const std::filesystem::path& path) {
  return with_file(path, [](std::istream& in) { return read_idx_images(in); });
}

std::vector<std::uint8_t> read_idx_labels(std::istream& in) {
  read_magic(in, kIdxLabelsMagic, "labels");
  const auto count = bin::read<std::uint32_t>(in, "IDX label count", kBig);
  std::vector<std::uint8_t> labels(count);
  bin::read_bytes(in, reinterpret_cast<char*>(labels.data()), count, "IDX labels");
  return labels;
}

std::vector<std::uint8_t> read_idx_labels(const std::filesystem::path& path) {
  return with_file(path, [](std::istream& in) { return read_idx_labels(in); });
}

void write_idx_images(std::ostream& out, const IdxImages& images) {
  bin::write<std::uint32_t>(out, kIdxImagesMagic, kBig);
  bin::write<std::uint32_t>(out, images.count, kBig);
  bin::write<std::uint32_t>(out, images.rows, kBig);
  bin::write<std::uint32_t>(out, images.cols, kBig);
  out.write(reinterpret_cast<const char*>(images.pixels.data()),
            static_cast<std::streamsize>(images.pixels.size()));
}

void write_idx_labels(std::ostream& out, const std::vector<std::uint8_t>& labels) {
  bin::write<std::uint32_t>(out, kIdxLabelsMagic, kBig);
  bin::write<std::uint32_t>(out, static_cast<std::uint32_t>(labels.size()), kBig);
  out.write(reinterpret_cast<const char*>(labels.data()), static_cast<std::streamsize>(labels.size()));
}

}  // namespace tnt
