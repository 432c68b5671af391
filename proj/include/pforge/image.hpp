#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace pforge {

/// Packed row-major RGB8 image, 3 bytes per pixel, no alpha or padding.
class Image {
 public:
  Image() = default;
  Image(int width, int height);
  Image(int width, int height, std::vector<std::uint8_t> pixels);

  static Image filled(int width, int height, std::uint8_t r, std::uint8_t g, std::uint8_t b);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return pixels_.empty(); }
  std::size_t size_bytes() const noexcept { return pixels_.size(); }
  std::size_t row_bytes() const noexcept { return static_cast<std::size_t>(width_) * 3; }

  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
  std::span<std::uint8_t> pixels() noexcept { return pixels_; }

  const std::uint8_t* at(int x, int y) const noexcept {
    return pixels_.data() + (static_cast<std::size_t>(y) * width_ + x) * 3;
  }
  std::uint8_t* at(int x, int y) noexcept {
    return pixels_.data() + (static_cast<std::size_t>(y) * width_ + x) * 3;
  }

  bool same_size(const Image& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

/// One sub-aperture view of the light field.
using ViewImage = Image;

/// Composited red/cyan stereo frame; same layout as a view.
using AnaglyphFrame = Image;

}  // namespace pforge
