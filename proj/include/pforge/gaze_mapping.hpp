#pragma once

#include <cstdint>
#include <vector>

namespace pforge {

struct PixelPos {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const PixelPos&, const PixelPos&) = default;
};

/// Eye centres of one camera frame, already averaged from the periocular
/// landmarks by the tracker.
struct EyeSample {
  std::int64_t t_us = 0;  // monotonic source clock
  PixelPos left;
  PixelPos right;
  int frame_w = 640;
  int frame_h = 480;
  double confidence = 1.0;

  friend bool operator==(const EyeSample&, const EyeSample&) = default;
};

/// Clamps both eyes into [0, frame_w) x [0, frame_h).
EyeSample clamp_to_frame(EyeSample sample);

/// Samples below this confidence count as tracking loss.
inline constexpr double kMinTrackingConfidence = 0.5;

/// k-frame moving average over each eye coordinate independently. The
/// window starts empty, so the first k-1 outputs average what exists.
class SmoothingFilter {
 public:
  static constexpr int kDefaultWindow = 5;

  explicit SmoothingFilter(int k = kDefaultWindow);

  EyeSample smooth(const EyeSample& sample);
  void reset() noexcept;

  int window() const noexcept { return k_; }
  int count() const noexcept { return count_; }

 private:
  static constexpr int kCoords = 4;  // lx, ly, rx, ry
  double mean_of(int coord) const noexcept;

  int k_;
  int count_ = 0;
  int head_ = 0;  // slot for the next write
  std::vector<double> ring_;  // k frames x kCoords, fixed at construction
};

struct GridConfig {
  int rows = 9;
  int cols = 9;
  double alpha = 40.0;  // camera-frame pixels between adjacent grid points
  int frame_w = 640;
  int frame_h = 480;
  PixelPos center{320.0, 240.0};
  bool mirror_x = true;
  bool invert_y = true;

  /// Config for a frame with the grid centred on it.
  static GridConfig centered(int rows, int cols, double alpha, int frame_w = 640,
                             int frame_h = 480);

  /// Throws std::invalid_argument when alpha <= 0 or the grid is empty.
  void validate() const;

  /// Overlay position of grid point (row, col) in the camera frame.
  PixelPos grid_point(int row, int col) const noexcept;
};

struct ViewIndex {
  int row = 0;
  int col = 0;
  friend bool operator==(const ViewIndex&, const ViewIndex&) = default;
};

struct ViewSelection {
  ViewIndex left;
  ViewIndex right;
  friend bool operator==(const ViewSelection&, const ViewSelection&) = default;
};

/// Nearest grid point to pos (after clamping pos into the frame). Ties go to
/// the smaller row, then the smaller column.
ViewIndex map_eye_to_view(PixelPos pos, const GridConfig& cfg) noexcept;

/// Maps each eye independently; no minimum disparity is enforced.
ViewSelection select_views(const EyeSample& sample, const GridConfig& cfg) noexcept;

}  // namespace pforge
