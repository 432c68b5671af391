#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include "pforge/display.hpp"
#include "pforge/gaze_mapping.hpp"
#include "pforge/image.hpp"
#include "pforge/image_io.hpp"

namespace pforge::test {

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("pforge-test-" + std::to_string(rd()) + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline Image random_image(int w, int h, std::mt19937& rng) {
  Image img(w, h);
  for (auto& b : img.pixels()) b = static_cast<std::uint8_t>(rng());
  return img;
}

inline std::vector<std::uint8_t> read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_bytes(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

/// Random rows x cols light field written as one PNG atlas; returns the atlas.
inline Image write_random_atlas(const std::filesystem::path& path, int rows, int cols, int view_w,
                                int view_h, std::uint32_t seed) {
  std::mt19937 rng(seed);
  Image atlas = random_image(cols * view_w, rows * view_h, rng);
  write_png(path, atlas);
  return atlas;
}

/// Keeps every presented frame in memory.
class RecordingSink final : public FrameSink {
 public:
  void present(const AnaglyphFrame& frame, std::uint64_t) override { frames.push_back(frame); }
  std::vector<Image> frames;
};

// ---------------------------------------------------------------------------
// Oracles. Deliberately naive and independent of the library's code paths.
// ---------------------------------------------------------------------------

/// Exhaustive nearest grid point, rows outer / cols inner, strict improvement
/// only, so the first minimum (smallest row, then column) wins.
inline ViewIndex brute_force_nearest(double x, double y, int rows, int cols, double alpha,
                                     double cx, double cy, bool mirror_x, bool invert_y) {
  const double sx = mirror_x ? -1.0 : 1.0;
  const double sy = invert_y ? -1.0 : 1.0;
  ViewIndex best{};
  double best_d = INFINITY;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double px = cx + sx * (c - (cols - 1) / 2.0) * alpha;
      const double py = cy + sy * (r - (rows - 1) / 2.0) * alpha;
      const double d = (x - px) * (x - px) + (y - py) * (y - py);
      if (d < best_d) {
        best_d = d;
        best = {r, c};
      }
    }
  }
  return best;
}

inline ViewIndex brute_force_nearest(PixelPos p, const GridConfig& cfg) {
  return brute_force_nearest(p.x, p.y, cfg.rows, cfg.cols, cfg.alpha, cfg.center.x, cfg.center.y,
                             cfg.mirror_x, cfg.invert_y);
}

/// Plain left-to-right re-summation of the last min(count, k) inputs.
inline double resum_mean(const std::vector<double>& history, int k) {
  const std::size_t n = std::min<std::size_t>(history.size(), static_cast<std::size_t>(k));
  double sum = 0.0;
  for (std::size_t i = history.size() - n; i < history.size(); ++i) sum += history[i];
  return sum / static_cast<double>(n);
}

/// Column transitions of one eye over one full period of an x sweep starting
/// at x0 with amplitude A, assuming per-frame motion below alpha: every
/// column boundary strictly inside the reachable range (x0 - A, x0 + A) is
/// crossed twice. Boundaries sit midway between adjacent grid x positions.
inline int analytic_sweep_transitions(double x0, double amplitude, int cols, double alpha,
                                      double cx, int frame_w) {
  const double lo = std::max(0.0, x0 - amplitude);
  const double hi = std::min(static_cast<double>(frame_w), x0 + amplitude);
  int crossed = 0;
  for (int j = 0; j + 1 < cols; ++j) {
    const double b = cx + (j + 0.5 - (cols - 1) / 2.0) * alpha;
    if (b > lo && b < hi && b != x0) ++crossed;
  }
  return 2 * crossed;
}

}  // namespace pforge::test
