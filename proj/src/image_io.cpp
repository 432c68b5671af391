#include "pforge/image_io.hpp"

#include <png.h>

#include <array>
#include <cctype>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>

namespace pforge {

ImageDecodeError::ImageDecodeError(std::filesystem::path file, const std::string& what)
    : std::runtime_error(file.empty() ? what : file.string() + ": " + what), file_(std::move(file)) {}

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept {
    if (f != nullptr) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageDecodeError(path, "cannot open file");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Header tokenizer for the netpbm family: whitespace separated, '#' to EOL is a comment.
class PnmHeader {
 public:
  PnmHeader(std::span<const std::uint8_t> bytes, const std::filesystem::path& origin)
      : bytes_(bytes), origin_(origin) {}

  std::string token() {
    skip_space_and_comments();
    std::string out;
    while (pos_ < bytes_.size() && !std::isspace(bytes_[pos_]) && bytes_[pos_] != '#') {
      out.push_back(static_cast<char>(bytes_[pos_++]));
    }
    if (out.empty()) throw ImageDecodeError(origin_, "truncated PPM header");
    return out;
  }

  long number() {
    const std::string tok = token();
    long value = 0;
    for (char c : tok) {
      if (c < '0' || c > '9' || value > 1'000'000'000L) {
        throw ImageDecodeError(origin_, "bad PPM header field '" + tok + "'");
      }
      value = value * 10 + (c - '0');
    }
    return value;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t raster_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw ImageDecodeError(origin_, "missing separator before PPM raster");
    }
    return pos_ + 1;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  const std::filesystem::path& origin_;
  std::size_t pos_ = 0;
};

struct PngContext {
  png_structp png = nullptr;
  png_infop info = nullptr;
  bool writing = false;
  char message[256] = {};
  std::vector<std::uint8_t> pixels;
  std::vector<png_bytep> rows;

  ~PngContext() {
    if (writing) {
      png_destroy_write_struct(&png, info != nullptr ? &info : nullptr);
    } else {
      png_destroy_read_struct(&png, info != nullptr ? &info : nullptr, nullptr);
    }
  }
};

void png_error_handler(png_structp png, png_const_charp msg) {
  auto* ctx = static_cast<PngContext*>(png_get_error_ptr(png));
  std::snprintf(ctx->message, sizeof(ctx->message), "%s", msg);
  png_longjmp(png, 1);
}

void png_warning_handler(png_structp, png_const_charp) {}

constexpr std::array<std::uint8_t, 8> kPngSignature = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

}  // namespace

Image decode_ppm(std::span<const std::uint8_t> bytes, const std::filesystem::path& origin) {
  PnmHeader header(bytes, origin);
  if (header.token() != "P6") throw ImageDecodeError(origin, "not a binary PPM (P6)");
  const long width = header.number();
  const long height = header.number();
  const long maxval = header.number();
  if (width < 1 || height < 1) throw ImageDecodeError(origin, "PPM dimensions must be positive");
  if (maxval != 255) throw ImageDecodeError(origin, "unsupported PPM maxval " + std::to_string(maxval));
  const std::size_t offset = header.raster_offset();
  const std::size_t expected = static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3;
  if (bytes.size() - offset < expected) throw ImageDecodeError(origin, "truncated PPM raster");
  std::vector<std::uint8_t> pixels(bytes.begin() + static_cast<std::ptrdiff_t>(offset),
                                   bytes.begin() + static_cast<std::ptrdiff_t>(offset + expected));
  return Image(static_cast<int>(width), static_cast<int>(height), std::move(pixels));
}

std::vector<std::uint8_t> encode_ppm(const Image& image) {
  const std::string header =
      "P6\n" + std::to_string(image.width()) + " " + std::to_string(image.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), image.pixels().begin(), image.pixels().end());
  return out;
}

Image read_ppm(const std::filesystem::path& path) {
  const auto bytes = slurp(path);
  return decode_ppm(bytes, path);
}

void write_ppm(const std::filesystem::path& path, const Image& image) {
  const auto bytes = encode_ppm(image);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed to write " + path.string());
}

Image read_png(const std::filesystem::path& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw ImageDecodeError(path, "cannot open file");

  std::array<std::uint8_t, 8> sig{};
  if (std::fread(sig.data(), 1, sig.size(), fp.get()) != sig.size() || sig != kPngSignature) {
    throw ImageDecodeError(path, "not a PNG file");
  }

  auto ctx = std::make_unique<PngContext>();
  ctx->png = png_create_read_struct(PNG_LIBPNG_VER_STRING, ctx.get(), png_error_handler,
                                    png_warning_handler);
  if (ctx->png == nullptr) throw ImageDecodeError(path, "libpng initialisation failed");
  ctx->info = png_create_info_struct(ctx->png);
  if (ctx->info == nullptr) throw ImageDecodeError(path, "libpng initialisation failed");

  // Only heap state (ctx) is touched between setjmp and a possible longjmp.
  if (setjmp(png_jmpbuf(ctx->png))) {
    throw ImageDecodeError(path, ctx->message);
  }

  png_init_io(ctx->png, fp.get());
  png_set_sig_bytes(ctx->png, static_cast<int>(sig.size()));
  png_read_info(ctx->png, ctx->info);

  const png_byte color_type = png_get_color_type(ctx->png, ctx->info);
  const png_byte bit_depth = png_get_bit_depth(ctx->png, ctx->info);

  if (bit_depth == 16) png_set_strip_16(ctx->png);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(ctx->png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(ctx->png);
  if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
    png_set_gray_to_rgb(ctx->png);
  }
  if ((color_type & PNG_COLOR_MASK_ALPHA) != 0) png_set_strip_alpha(ctx->png);
  png_set_interlace_handling(ctx->png);
  png_read_update_info(ctx->png, ctx->info);

  const png_uint_32 width = png_get_image_width(ctx->png, ctx->info);
  const png_uint_32 height = png_get_image_height(ctx->png, ctx->info);
  const std::size_t rowbytes = png_get_rowbytes(ctx->png, ctx->info);
  if (rowbytes != static_cast<std::size_t>(width) * 3) {
    throw ImageDecodeError(path, "unexpected PNG row layout after RGB8 conversion");
  }

  ctx->pixels.resize(rowbytes * height);
  ctx->rows.resize(height);
  for (png_uint_32 y = 0; y < height; ++y) ctx->rows[y] = ctx->pixels.data() + rowbytes * y;
  png_read_image(ctx->png, ctx->rows.data());
  png_read_end(ctx->png, nullptr);

  return Image(static_cast<int>(width), static_cast<int>(height), std::move(ctx->pixels));
}

void write_png(const std::filesystem::path& path, const Image& image) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw std::runtime_error("cannot open " + path.string() + " for writing");

  auto ctx = std::make_unique<PngContext>();
  ctx->writing = true;
  ctx->png = png_create_write_struct(PNG_LIBPNG_VER_STRING, ctx.get(), png_error_handler,
                                     png_warning_handler);
  if (ctx->png == nullptr) throw std::runtime_error("libpng initialisation failed");
  ctx->info = png_create_info_struct(ctx->png);
  if (ctx->info == nullptr) throw std::runtime_error("libpng initialisation failed");

  ctx->rows.resize(static_cast<std::size_t>(image.height()));
  for (int y = 0; y < image.height(); ++y) {
    ctx->rows[static_cast<std::size_t>(y)] = const_cast<png_bytep>(image.at(0, y));
  }

  if (setjmp(png_jmpbuf(ctx->png))) {
    throw std::runtime_error(path.string() + ": " + ctx->message);
  }

  png_init_io(ctx->png, fp.get());
  png_set_IHDR(ctx->png, ctx->info, static_cast<png_uint_32>(image.width()),
               static_cast<png_uint_32>(image.height()), 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(ctx->png, ctx->info);
  png_write_image(ctx->png, ctx->rows.data());
  png_write_end(ctx->png, nullptr);
}

Image read_image(const std::filesystem::path& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw ImageDecodeError(path, "cannot open file");
  std::array<std::uint8_t, 8> head{};
  const std::size_t got = std::fread(head.data(), 1, head.size(), fp.get());
  fp.reset();

  if (got == head.size() && head == kPngSignature) return read_png(path);
  if (got >= 2 && head[0] == 'P' && head[1] == '6') return read_ppm(path);
  throw ImageDecodeError(path, "unrecognised image format (expected PNG or binary PPM)");
}

}  // namespace pforge
