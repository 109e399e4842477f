#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace tnt {

// MNIST IDX containers: big-endian, magic 0x00000803 (u8, rank 3) for
// images and 0x00000801 (u8, rank 1) for labels.
inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

struct IdxImages {
  std::uint32_t count = 0;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<std::uint8_t> pixels;  // count * rows * cols, row-major

  const std::uint8_t* image(std::size_t i) const { return pixels.data() + i * rows * cols; }
};

IdxImages read_idx_images(std::istream& in);
IdxImages read_idx_images(const std::filesystem::path& path);
std::vector<std::uint8_t> read_idx_labels(std::istream& in);
std::vector<std::uint8_t> read_idx_labels(const std::filesystem::path& path);

void write_idx_images(std::ostream& out, const IdxImages& images);
void write_idx_labels(std::ostream& out, const std::vector<std::uint8_t>& labels);

}  // namespace tnt
