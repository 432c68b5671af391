#include "pforge/image.hpp"

#include <stdexcept>
#include <string>

namespace pforge {

namespace {

std::size_t checked_byte_count(int width, int height) {
  if (width < 1 || height < 1) {
    throw std::invalid_argument("image dimensions must be positive, got " + std::to_string(width) +
                                "x" + std::to_string(height));
  }
  return static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3;
}

}  // namespace

Image::Image(int width, int height)
    : width_(width), height_(height), pixels_(checked_byte_count(width, height), 0) {}

Image::Image(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (pixels_.size() != checked_byte_count(width, height)) {
    throw std::invalid_argument("pixel buffer holds " + std::to_string(pixels_.size()) +
                                " bytes, expected " +
                                std::to_string(checked_byte_count(width, height)));
  }
}

Image Image::filled(int width, int height, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  Image img(width, height);
  auto px = img.pixels();
  for (std::size_t i = 0; i < px.size(); i += 3) {
    px[i] = r;
    px[i + 1] = g;
    px[i + 2] = b;
  }
  return img;
}

}  // namespace pforge
