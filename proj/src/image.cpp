#include "covergen/image.hpp"

#include <png.h>

#include <cstring>

#include "covergen/errors.hpp"

namespace covergen {

CoverImage::CoverImage(int w, int h) : width(w), height(h) {
  if (w <= 0 || h <= 0) throw InputError("image dimensions must be positive");
  rgb.assign(byte_size(), 0);
}

std::vector<std::uint8_t> encode_png(const CoverImage& image) {
  if (!image.valid()) throw InputError("cannot encode an invalid image");
  png_image desc;
  std::memset(&desc, 0, sizeof desc);
  desc.version = PNG_IMAGE_VERSION;
  desc.width = static_cast<png_uint_32>(image.width);
  desc.height = static_cast<png_uint_32>(image.height);
  desc.format = PNG_FORMAT_RGB;

  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&desc, nullptr, &size, 0, image.rgb.data(), 0, nullptr))
    throw Error(std::string("png encode: ") + desc.message);
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&desc, out.data(), &size, 0, image.rgb.data(), 0, nullptr))
    throw Error(std::string("png encode: ") + desc.message);
  out.resize(size);
  return out;
}

CoverImage decode_png(std::span<const std::uint8_t> bytes) {
  png_image desc;
  std::memset(&desc, 0, sizeof desc);
  desc.version = PNG_IMAGE_VERSION;
  if (bytes.empty() || !png_image_begin_read_from_memory(&desc, bytes.data(), bytes.size()))
    throw DecodeError(std::string("png decode: ") + (bytes.empty() ? "empty input" : desc.message));
  desc.format = PNG_FORMAT_RGB;
  if (desc.width == 0 || desc.height == 0 || desc.width > (1u << 15) || desc.height > (1u << 15)) {
    png_image_free(&desc);
    throw DecodeError("png decode: unsupported dimensions");
  }
  CoverImage img(static_cast<int>(desc.width), static_cast<int>(desc.height));
  if (!png_image_finish_read(&desc, nullptr, img.rgb.data(), 0, nullptr)) {
    const std::string msg = desc.message;
    png_image_free(&desc);
    throw DecodeError("png decode: " + msg);
  }
  return img;
}

}  // namespace covergen
