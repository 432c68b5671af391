#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "pforge/anaglyph.hpp"
#include "pforge/display.hpp"
#include "pforge/gaze_mapping.hpp"
#include "pforge/lightfield_store.hpp"
#include "pforge/metrics.hpp"
#include "pforge/tracker_protocol.hpp"

namespace pforge {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct LightFieldSpec {
  enum class Layout { Pattern, Atlas };
  std::filesystem::path path;
  Layout layout = Layout::Atlas;
  std::string pattern;  // for Layout::Pattern
  int rows = 9;
  int cols = 9;
};

struct TrackerSpec {
  enum class Kind { Udp, Stdin, Replay, Synth };
  Kind kind = Kind::Udp;
  std::uint16_t port = UdpSource::kDefaultPort;
  std::filesystem::path replay_path;
  bool realtime = false;
  TrajectorySpec synth;  // center and frame are taken from the grid config at run time
  bool synth_paced = true;
};

struct DisplaySpec {
  enum class Mode { Windowed, Fullscreen, Headless };
  Mode mode = Mode::Windowed;
  std::filesystem::path out_dir;  // headless only
};

struct ViewerConfig {
  LightFieldSpec lightfield;
  GridConfig grid;  // rows/cols are overwritten from lightfield
  int smooth_k = SmoothingFilter::kDefaultWindow;
  TrackerSpec tracker;
  DisplaySpec display;
  std::optional<std::uint64_t> frame_limit;
  double present_rate_hz = 0.0;  // 0: present once per new tracker sample
  std::optional<std::filesystem::path> metrics_path;
};

// Parsers for the command-line grammar; all throw ConfigError.
LightFieldSpec::Layout parse_layout(std::string_view text, std::string& pattern_out);
/// udp:PORT | stdin | replay:PATH[,realtime] | synth:KIND,AMP,PERIOD,SEP,RATE,DURATION
/// A synth RATE of 0 means free-running at nominal 30 Hz timestamps.
TrackerSpec parse_tracker(std::string_view text);
PixelPos parse_center(std::string_view text);
/// "WxH"
std::pair<int, int> parse_frame_size(std::string_view text);

LightFieldGrid load_lightfield(const LightFieldSpec& spec);
std::unique_ptr<SampleSource> make_source(const TrackerSpec& spec, const GridConfig& grid);

/// One render-loop iteration at a time: smooth, map, compose, present.
/// Owns every per-frame buffer, so steady-state steps do not allocate.
class RenderPipeline {
 public:
  RenderPipeline(const LightFieldGrid& grid, const GridConfig& cfg, int smooth_k, FrameSink& sink,
                 FrameMetrics& metrics);

  /// sample == nullptr means no new tracker data: the last smoothed position
  /// is held. Samples below kMinTrackingConfidence are treated the same way.
  void step(const EyeSample* sample, double ingest_us);

  const ViewSelection& selection() const noexcept { return selection_; }
  const AnaglyphFrame& frame() const noexcept { return frame_; }
  const EyeSample& held_position() const noexcept { return held_; }
  std::uint64_t frames() const noexcept { return frame_index_; }

 private:
  const LightFieldGrid& grid_;
  GridConfig cfg_;
  SmoothingFilter filter_;
  FrameSink& sink_;
  FrameMetrics& metrics_;
  EyeSample held_;
  ViewSelection selection_;
  AnaglyphFrame frame_;
  std::uint64_t frame_index_ = 0;
};

struct ExitReport {
  std::uint64_t frames = 0;
  SessionReport source;
  nlohmann::json metrics;  // report_metrics() plus a "source" block
};

/// Runs the viewer until the source ends, the frame limit is reached, the
/// window is closed, or *stop becomes true. Writes cfg.metrics_path on exit.
ExitReport run(const ViewerConfig& cfg, const std::atomic<bool>* stop = nullptr);

/// Same, with a caller-provided sink (cfg.display is ignored).
ExitReport run(const ViewerConfig& cfg, FrameSink& sink, const std::atomic<bool>* stop = nullptr);

}  // namespace pforge
