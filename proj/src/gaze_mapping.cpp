#include "pforge/gaze_mapping.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pforge {

namespace {

double clamp_coord(double v, int extent) noexcept {
  const double hi = std::nextafter(static_cast<double>(extent), 0.0);
  if (std::isnan(v)) return 0.0;
  return std::clamp(v, 0.0, hi) + 0.0;  // folds -0.0 into +0.0
}

PixelPos clamp_pos(PixelPos p, int frame_w, int frame_h) noexcept {
  return {clamp_coord(p.x, frame_w), clamp_coord(p.y, frame_h)};
}

double axis_point(double center, double sign, double alpha, int index, int count) noexcept {
  return center + sign * (index - (count - 1) / 2.0) * alpha;
}

// The overlay is a rectangular lattice, so the 2D nearest point is the
// per-axis nearest pair, and the row-then-column tie-break reduces to
// "smaller index wins" on each axis.
int nearest_on_axis(double coord, double center, double sign, double alpha, int count) noexcept {
  const double u = sign * (coord - center) / alpha + (count - 1) / 2.0;
  int guess = 0;
  if (u >= count - 1) {
    guess = count - 1;
  } else if (u > 0.0) {
    guess = static_cast<int>(std::floor(u));
  }
  const int lo = std::max(0, guess - 1);
  const int hi = std::min(count - 1, guess + 2);
  int best = lo;
  double best_dist = std::abs(coord - axis_point(center, sign, alpha, lo, count));
  for (int i = lo + 1; i <= hi; ++i) {
    const double d = std::abs(coord - axis_point(center, sign, alpha, i, count));
    if (d < best_dist) {
      best = i;
      best_dist = d;
    }
  }
  return best;
}

}  // namespace

EyeSample clamp_to_frame(EyeSample sample) {
  sample.left = clamp_pos(sample.left, sample.frame_w, sample.frame_h);
  sample.right = clamp_pos(sample.right, sample.frame_w, sample.frame_h);
  return sample;
}

SmoothingFilter::SmoothingFilter(int k) : k_(k) {
  if (k < 1) throw std::invalid_argument("smoothing window k must be >= 1, got " + std::to_string(k));
  ring_.assign(static_cast<std::size_t>(k) * kCoords, 0.0);
}

void SmoothingFilter::reset() noexcept {
  count_ = 0;
  head_ = 0;
}

// Mean taken as oldest + mean(deviation from oldest): exact when the window
// is constant, and no running sum to drift.
double SmoothingFilter::mean_of(int coord) const noexcept {
  const int oldest = (head_ - count_ + k_) % k_;
  const double base = ring_[static_cast<std::size_t>(oldest) * kCoords + coord];
  double dev = 0.0;
  for (int i = 1; i < count_; ++i) {
    const int slot = (oldest + i) % k_;
    dev += ring_[static_cast<std::size_t>(slot) * kCoords + coord] - base;
  }
  return base + dev / count_;
}

EyeSample SmoothingFilter::smooth(const EyeSample& sample) {
  double* slot = ring_.data() + static_cast<std::size_t>(head_) * kCoords;
  slot[0] = sample.left.x;
  slot[1] = sample.left.y;
  slot[2] = sample.right.x;
  slot[3] = sample.right.y;
  head_ = (head_ + 1) % k_;
  count_ = std::min(count_ + 1, k_);

  EyeSample out = sample;
  out.left = {mean_of(0), mean_of(1)};
  out.right = {mean_of(2), mean_of(3)};
  return out;
}

GridConfig GridConfig::centered(int rows, int cols, double alpha, int frame_w, int frame_h) {
  GridConfig cfg;
  cfg.rows = rows;
  cfg.cols = cols;
  cfg.alpha = alpha;
  cfg.frame_w = frame_w;
  cfg.frame_h = frame_h;
  cfg.center = {frame_w / 2.0, frame_h / 2.0};
  return cfg;
}

void GridConfig::validate() const {
  if (rows < 1 || cols < 1) throw std::invalid_argument("grid needs rows, cols >= 1");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("grid spacing alpha must be positive and finite");
  }
  if (frame_w < 1 || frame_h < 1) throw std::invalid_argument("camera frame must be non-empty");
  if (!std::isfinite(center.x) || !std::isfinite(center.y)) {
    throw std::invalid_argument("grid center must be finite");
  }
}

PixelPos GridConfig::grid_point(int row, int col) const noexcept {
  return {axis_point(center.x, mirror_x ? -1.0 : 1.0, alpha, col, cols),
          axis_point(center.y, invert_y ? -1.0 : 1.0, alpha, row, rows)};
}

ViewIndex map_eye_to_view(PixelPos pos, const GridConfig& cfg) noexcept {
  const PixelPos p = clamp_pos(pos, cfg.frame_w, cfg.frame_h);
  return {nearest_on_axis(p.y, cfg.center.y, cfg.invert_y ? -1.0 : 1.0, cfg.alpha, cfg.rows),
          nearest_on_axis(p.x, cfg.center.x, cfg.mirror_x ? -1.0 : 1.0, cfg.alpha, cfg.cols)};
}

ViewSelection select_views(const EyeSample& sample, const GridConfig& cfg) noexcept {
  return {map_eye_to_view(sample.left, cfg), map_eye_to_view(sample.right, cfg)};
}

}  // namespace pforge
