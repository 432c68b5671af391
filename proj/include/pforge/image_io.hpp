#pragma once

#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pforge/image.hpp"

namespace pforge {

/// Raised when a file cannot be read or is not a supported PNG/PPM image.
class ImageDecodeError : public std::runtime_error {
 public:
  ImageDecodeError(std::filesystem::path file, const std::string& what);
  const std::filesystem::path& file() const noexcept { return file_; }

 private:
  std::filesystem::path file_;
};

// Binary PPM (P6, maxval 255). Comments in the header are accepted.
Image decode_ppm(std::span<const std::uint8_t> bytes, const std::filesystem::path& origin = {});
std::vector<std::uint8_t> encode_ppm(const Image& image);
Image read_ppm(const std::filesystem::path& path);
void write_ppm(const std::filesystem::path& path, const Image& image);

// PNG of any colour type or bit depth. Palette and gray are expanded, alpha
// is dropped and 16-bit samples keep their high byte.
Image read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const Image& image);

/// Dispatches on the file signature, not the extension.
Image read_image(const std::filesystem::path& path);

}  // namespace pforge
