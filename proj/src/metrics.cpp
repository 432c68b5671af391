#include "pforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pforge {

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::Ingest:
      return "ingest";
    case Stage::Smooth:
      return "smooth";
    case Stage::Map:
      return "map";
    case Stage::Compose:
      return "compose";
    case Stage::Present:
      return "present";
  }
  return "?";
}

RollingSeries::RollingSeries(std::size_t capacity) : values_(capacity, 0.0) {
  if (capacity == 0) throw std::invalid_argument("rolling series capacity must be > 0");
}

void RollingSeries::push(double v) noexcept {
  values_[head_] = v;
  head_ = (head_ + 1) % values_.size();
  size_ = std::min(size_ + 1, values_.size());
}

double RollingSeries::mean() const noexcept {
  if (size_ == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < size_; ++i) sum += values_[i];
  return sum / static_cast<double>(size_);
}

std::vector<double> RollingSeries::values() const {
  std::vector<double> out;
  out.reserve(size_);
  const std::size_t oldest = (head_ + values_.size() - size_) % values_.size();
  for (std::size_t i = 0; i < size_; ++i) out.push_back(values_[(oldest + i) % values_.size()]);
  return out;
}

double RollingSeries::percentile(double p) const {
  if (size_ == 0) return 0.0;
  std::vector<double> sorted(values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(size_));
  std::sort(sorted.begin(), sorted.end());
  const double rank = std::ceil(std::clamp(p, 0.0, 1.0) * static_cast<double>(size_));
  const std::size_t idx = rank < 1.0 ? 0 : static_cast<std::size_t>(rank) - 1;
  return sorted[std::min(idx, size_ - 1)];
}

FrameMetrics::FrameMetrics(std::size_t stage_history, std::size_t fps_window)
    : stages_{RollingSeries(stage_history), RollingSeries(stage_history),
              RollingSeries(stage_history), RollingSeries(stage_history),
              RollingSeries(stage_history)},
      present_times_(fps_window + 1),
      sample_times_(fps_window + 1) {}

double FrameMetrics::seconds_since_epoch(Clock::time_point t) noexcept {
  if (!have_epoch_) {
    epoch_ = t;
    have_epoch_ = true;
  }
  return std::chrono::duration<double>(t - epoch_).count();
}

void FrameMetrics::record_frame(const StageTimes& stage_us, Clock::time_point presented_at,
                                const ViewSelection& selection) noexcept {
  for (std::size_t i = 0; i < kStageCount; ++i) stages_[i].push(std::max(0.0, stage_us[i]));
  present_times_.push(seconds_since_epoch(presented_at));
  if (frames_ > 0) {
    if (!(selection.left == last_selection_.left)) ++transitions_left_;
    if (!(selection.right == last_selection_.right)) ++transitions_right_;
  }
  last_selection_ = selection;
  ++frames_;
}

void FrameMetrics::record_sample_arrival(Clock::time_point at) noexcept {
  sample_times_.push(seconds_since_epoch(at));
  ++samples_;
}

namespace {

// Intervals in the window divided by the wall time they span.
double rate_of(const RollingSeries& times) {
  if (times.size() < 2) return 0.0;
  const std::vector<double> t = times.values();
  const double span = t.back() - t.front();
  return span > 0.0 ? static_cast<double>(t.size() - 1) / span : 0.0;
}

}  // namespace

double FrameMetrics::fps() const noexcept { return rate_of(present_times_); }
double FrameMetrics::sample_fps() const noexcept { return rate_of(sample_times_); }

nlohmann::json report_metrics(const FrameMetrics& metrics) {
  nlohmann::json stages = nlohmann::json::object();
  for (std::size_t i = 0; i < kStageCount; ++i) {
    const auto s = static_cast<Stage>(i);
    stages[std::string(to_string(s))] = {{"mean_us", metrics.stage(s).mean()},
                                         {"p99_us", metrics.stage(s).percentile(0.99)}};
  }
  return {
      {"fps", metrics.fps()},
      {"sample_fps", metrics.sample_fps()},
      {"frames", metrics.frames()},
      {"stages", std::move(stages)},
      {"transitions",
       {{"left", metrics.transitions_left()}, {"right", metrics.transitions_right()}}},
  };
}

}  // namespace pforge
