#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace covergen {

/// 8-bit RGB, row-major, no padding.
struct CoverImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  CoverImage() = default;
  /// Zero-filled image; throws InputError unless width, height > 0.
  CoverImage(int width, int height);

  std::size_t byte_size() const noexcept { return static_cast<std::size_t>(width) * height * 3; }
  bool valid() const noexcept { return width > 0 && height > 0 && rgb.size() == byte_size(); }

  friend bool operator==(const CoverImage&, const CoverImage&) = default;
};

inline constexpr int kDefaultCoverSize = 256;

/// Deterministic PNG (8-bit RGB, no ancillary chunks).
std::vector<std::uint8_t> encode_png(const CoverImage& image);
/// Any PNG libpng understands, converted to 8-bit RGB. Throws DecodeError.
CoverImage decode_png(std::span<const std::uint8_t> bytes);

}  // namespace covergen
