#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "pforge/gaze_mapping.hpp"

namespace pforge {

// ---------------------------------------------------------------------------
// Wire format
//
// One JSON object per line (or per UDP datagram), canonical form:
//   {"t_us":1000,"lx":300,"ly":240,"rx":340,"ry":240,"w":640,"h":480,"conf":1}
// t_us/w/h are integers; coordinates and conf are shortest round-trip decimals.
// ---------------------------------------------------------------------------

/// Canonical LF-terminated message line.
std::string encode(const EyeSample& sample);

enum class DecodeStatus { Ok, Malformed, Stale };

struct DecodeResult {
  DecodeStatus status = DecodeStatus::Malformed;
  EyeSample sample;
  std::string error;

  bool ok() const noexcept { return status == DecodeStatus::Ok; }
};

/// Parses one message. Coordinates are clamped into the frame; a trailing
/// CR/LF is ignored. Never returns Stale (no stream state).
DecodeResult decode(std::string_view bytes);

/// Decoder for one session stream: also drops messages whose t_us does not
/// advance past the last accepted one.
class StreamDecoder {
 public:
  DecodeResult decode(std::string_view bytes);
  std::optional<std::int64_t> last_accepted() const noexcept { return last_t_us_; }

 private:
  std::optional<std::int64_t> last_t_us_;
};

// ---------------------------------------------------------------------------
// Synthetic trajectories
// ---------------------------------------------------------------------------

enum class TrajectoryKind { SweepX, SweepY, Circle, Hold };

std::optional<TrajectoryKind> parse_trajectory_kind(std::string_view name);
std::string_view to_string(TrajectoryKind kind);

struct TrajectorySpec {
  TrajectoryKind kind = TrajectoryKind::SweepX;
  double amplitude = 200.0;  // pixels
  double period_s = 4.0;
  PixelPos center{320.0, 240.0};
  double eye_separation = 65.0;  // pixels
  double rate_hz = 30.0;
  double duration_s = 10.0;
  int frame_w = 640;
  int frame_h = 480;

  void validate() const;
  /// floor(rate x duration), tolerant of binary rounding.
  std::int64_t sample_count() const noexcept;
};

/// Closed-form sample at time t. The viewer's left eye is placed at the
/// larger x (the camera image is not mirrored), the right eye at the smaller.
EyeSample synth_next(const TrajectorySpec& spec, double t_s);

/// Sample i of the sequence generated at spec.rate_hz.
EyeSample synth_sample(const TrajectorySpec& spec, std::int64_t index);

// ---------------------------------------------------------------------------
// Latest-sample slot (mailbox)
// ---------------------------------------------------------------------------

/// Single-slot channel: the writer overwrites, readers always copy out one
/// complete sample. In lockstep mode publish() additionally waits until the
/// previous sample has been taken by take(), which makes non-realtime
/// sources lossless.
class LatestSampleSlot {
 public:
  struct Snapshot {
    EyeSample sample;
    std::uint64_t seq = 0;  // 1-based publish counter
  };

  explicit LatestSampleSlot(bool lockstep = false) : lockstep_(lockstep) {}

  /// Returns false when the slot was closed before the sample could be stored.
  bool publish(const EyeSample& sample);

  std::optional<Snapshot> latest() const;
  std::uint64_t sequence() const;

  /// Blocks up to timeout until a sample newer than seq `after` exists or the
  /// slot is closed. Returns true when a newer sample is available.
  bool wait_for(std::uint64_t after, std::chrono::milliseconds timeout);

  /// Copies out the newest sample if it is newer than `after` and marks it
  /// consumed. Never blocks on the writer.
  std::optional<Snapshot> take(std::uint64_t after);

  /// wait_for() followed by take().
  std::optional<Snapshot> wait_newer(std::uint64_t after, std::chrono::milliseconds timeout);

  /// Ends the stream; wakes all waiters and unblocks a lockstep writer.
  void close();
  bool closed() const;

 private:
  mutable std::mutex mutex_;
  std::condition_variable cv_;
  bool lockstep_;
  bool closed_ = false;
  std::uint64_t seq_ = 0;
  std::uint64_t consumed_ = 0;
  EyeSample sample_;
};

// ---------------------------------------------------------------------------
// Sources
// ---------------------------------------------------------------------------

class SourceError : public std::runtime_error {
 public:
  enum class Kind { BindFailed, FileNotFound, InvalidSpec, Io };
  SourceError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

struct SessionReport {
  std::uint64_t accepted = 0;
  std::uint64_t malformed = 0;
  std::uint64_t stale = 0;
};

class SampleSource {
 public:
  virtual ~SampleSource() = default;
  /// Pushes samples into slot until exhausted or stop is set.
  virtual SessionReport run(LatestSampleSlot& slot, const std::atomic<bool>& stop) = 0;
  /// True when every sample is produced regardless of wall-clock timing
  /// (replay and synth), so a lockstep slot yields a reproducible sequence.
  virtual bool deterministic() const noexcept { return false; }
};

/// Runs source to completion and closes the slot.
SessionReport source_run(SampleSource& source, LatestSampleSlot& slot,
                         const std::atomic<bool>& stop);

/// One message per datagram on a local UDP port. Port 0 picks a free port.
class UdpSource final : public SampleSource {
 public:
  static constexpr std::uint16_t kDefaultPort = 9870;

  explicit UdpSource(std::uint16_t port = kDefaultPort, const std::string& bind_address = "127.0.0.1");
  ~UdpSource() override;
  UdpSource(const UdpSource&) = delete;
  UdpSource& operator=(const UdpSource&) = delete;

  std::uint16_t port() const noexcept { return port_; }
  SessionReport run(LatestSampleSlot& slot, const std::atomic<bool>& stop) override;

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

/// LF-delimited messages from a file descriptor (stdin by default).
class LineStreamSource final : public SampleSource {
 public:
  explicit LineStreamSource(int fd = 0) : fd_(fd) {}
  SessionReport run(LatestSampleSlot& slot, const std::atomic<bool>& stop) override;

 private:
  int fd_;
};

/// Replays a recorded message file, paced by t_us deltas when realtime.
class ReplaySource final : public SampleSource {
 public:
  ReplaySource(std::filesystem::path path, bool realtime);
  SessionReport run(LatestSampleSlot& slot, const std::atomic<bool>& stop) override;
  bool deterministic() const noexcept override { return true; }

 private:
  std::filesystem::path path_;
  bool realtime_;
};

/// Generates a trajectory at spec.rate_hz, or as fast as possible when not paced.
class SynthSource final : public SampleSource {
 public:
  SynthSource(TrajectorySpec spec, bool paced);
  SessionReport run(LatestSampleSlot& slot, const std::atomic<bool>& stop) override;
  bool deterministic() const noexcept override { return true; }
  const TrajectorySpec& spec() const noexcept { return spec_; }

 private:
  TrajectorySpec spec_;
  bool paced_;
};

}  // namespace pforge
