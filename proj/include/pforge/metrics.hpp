#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pforge/gaze_mapping.hpp"

namespace pforge {

enum class Stage : std::size_t { Ingest, Smooth, Map, Compose, Present };
inline constexpr std::size_t kStageCount = 5;
std::string_view to_string(Stage stage);

using StageTimes = std::array<double, kStageCount>;  // microseconds

/// Fixed-capacity ring of the most recent values. Never allocates after
/// construction.
class RollingSeries {
 public:
  explicit RollingSeries(std::size_t capacity);

  void push(double v) noexcept;
  std::size_t size() const noexcept { return size_; }
  std::size_t capacity() const noexcept { return values_.size(); }
  double mean() const noexcept;
  /// Nearest-rank percentile over the retained values, p in [0,1].
  double percentile(double p) const;
  /// Retained values, oldest first.
  std::vector<double> values() const;

 private:
  std::vector<double> values_;
  std::size_t head_ = 0;
  std::size_t size_ = 0;
};

/// Per-frame telemetry of the render loop.
class FrameMetrics {
 public:
  using Clock = std::chrono::steady_clock;

  static constexpr std::size_t kFpsWindow = 120;
  static constexpr std::size_t kDefaultHistory = 4096;

  explicit FrameMetrics(std::size_t stage_history = kDefaultHistory,
                        std::size_t fps_window = kFpsWindow);

  void record_frame(const StageTimes& stage_us, Clock::time_point presented_at,
                    const ViewSelection& selection) noexcept;
  void record_sample_arrival(Clock::time_point at) noexcept;

  std::uint64_t frames() const noexcept { return frames_; }
  std::uint64_t samples() const noexcept { return samples_; }
  std::uint64_t transitions_left() const noexcept { return transitions_left_; }
  std::uint64_t transitions_right() const noexcept { return transitions_right_; }

  /// Presents per second over the last fps_window frame intervals.
  double fps() const noexcept;
  /// Tracker samples per second over the same window length.
  double sample_fps() const noexcept;

  const RollingSeries& stage(Stage s) const noexcept { return stages_[static_cast<std::size_t>(s)]; }

 private:
  std::array<RollingSeries, kStageCount> stages_;
  RollingSeries present_times_;  // seconds since epoch_
  RollingSeries sample_times_;
  Clock::time_point epoch_;
  bool have_epoch_ = false;
  std::uint64_t frames_ = 0;
  std::uint64_t samples_ = 0;
  std::uint64_t transitions_left_ = 0;
  std::uint64_t transitions_right_ = 0;
  ViewSelection last_selection_;

  double seconds_since_epoch(Clock::time_point t) noexcept;
};

/// {fps, sample_fps, frames, stages: {name: {mean_us, p99_us}}, transitions: {left, right}}
nlohmann::json report_metrics(const FrameMetrics& metrics);

}  // namespace pforge
