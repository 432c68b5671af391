#include "pforge/tracker_protocol.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <thread>

#include <json.hpp>

namespace pforge {

namespace {

using Clock = std::chrono::steady_clock;

void append_number(std::string& out, double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  out.append(buf.data(), res.ptr);
}

void append_number(std::string& out, std::int64_t v) {
  std::array<char, 24> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  out.append(buf.data(), res.ptr);
}

std::string_view trim_line(std::string_view s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool is_blank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

DecodeResult malformed(std::string why) {
  DecodeResult r;
  r.status = DecodeStatus::Malformed;
  r.error = std::move(why);
  return r;
}

// Sleeps in short slices so a stop request is honoured promptly.
bool sleep_until_or_stop(Clock::time_point deadline, const std::atomic<bool>& stop) {
  constexpr auto kSlice = std::chrono::milliseconds(20);
  while (!stop.load(std::memory_order_relaxed)) {
    const auto now = Clock::now();
    if (now >= deadline) return true;
    std::this_thread::sleep_until(std::min(deadline, now + kSlice));
  }
  return false;
}

void ingest_line(std::string_view line, StreamDecoder& decoder, LatestSampleSlot& slot,
                 SessionReport& report) {
  if (is_blank(line)) return;
  const DecodeResult r = decoder.decode(line);
  switch (r.status) {
    case DecodeStatus::Ok:
      ++report.accepted;
      slot.publish(r.sample);
      break;
    case DecodeStatus::Malformed:
      ++report.malformed;
      break;
    case DecodeStatus::Stale:
      ++report.stale;
      break;
  }
}

}  // namespace

std::string encode(const EyeSample& s) {
  std::string out;
  out.reserve(128);
  out += "{\"t_us\":";
  append_number(out, s.t_us);
  out += ",\"lx\":";
  append_number(out, s.left.x);
  out += ",\"ly\":";
  append_number(out, s.left.y);
  out += ",\"rx\":";
  append_number(out, s.right.x);
  out += ",\"ry\":";
  append_number(out, s.right.y);
  out += ",\"w\":";
  append_number(out, static_cast<std::int64_t>(s.frame_w));
  out += ",\"h\":";
  append_number(out, static_cast<std::int64_t>(s.frame_h));
  out += ",\"conf\":";
  append_number(out, s.confidence);
  out += "}\n";
  return out;
}

DecodeResult decode(std::string_view bytes) {
  using nlohmann::json;
  const std::string_view line = trim_line(bytes);
  json j = json::parse(line.begin(), line.end(), nullptr, false);
  if (j.is_discarded()) return malformed("not valid JSON");
  if (!j.is_object()) return malformed("message is not a JSON object");

  auto field = [&](const char* key) -> const json* {
    const auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
  };

  for (const char* key : {"t_us", "w", "h"}) {
    const json* v = field(key);
    if (v == nullptr) return malformed(std::string("missing key ") + key);
    if (!v->is_number_integer()) return malformed(std::string(key) + " must be an integer");
  }
  std::array<double, 5> reals{};
  const std::array<const char*, 5> real_keys = {"lx", "ly", "rx", "ry", "conf"};
  for (std::size_t i = 0; i < real_keys.size(); ++i) {
    const json* v = field(real_keys[i]);
    if (v == nullptr) return malformed(std::string("missing key ") + real_keys[i]);
    if (!v->is_number()) return malformed(std::string(real_keys[i]) + " must be a number");
    reals[i] = v->get<double>();
    if (!std::isfinite(reals[i])) return malformed(std::string(real_keys[i]) + " is not finite");
  }

  const json& t = *field("t_us");
  if (t.is_number_unsigned() && t.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
    return malformed("t_us out of range");
  }
  const json& w = *field("w");
  const json& h = *field("h");
  if (w.get<std::int64_t>() <= 0 || h.get<std::int64_t>() <= 0 ||
      w.get<std::int64_t>() > INT32_MAX || h.get<std::int64_t>() > INT32_MAX) {
    return malformed("frame dimensions must be positive");
  }
  const double conf = reals[4];
  if (conf < 0.0 || conf > 1.0) return malformed("conf outside [0,1]");

  EyeSample s;
  s.t_us = t.get<std::int64_t>();
  s.left = {reals[0], reals[1]};
  s.right = {reals[2], reals[3]};
  s.frame_w = static_cast<int>(w.get<std::int64_t>());
  s.frame_h = static_cast<int>(h.get<std::int64_t>());
  s.confidence = conf;

  DecodeResult r;
  r.status = DecodeStatus::Ok;
  r.sample = clamp_to_frame(s);
  return r;
}

DecodeResult StreamDecoder::decode(std::string_view bytes) {
  DecodeResult r = pforge::decode(bytes);
  if (!r.ok()) return r;
  if (last_t_us_ && r.sample.t_us <= *last_t_us_) {
    r.status = DecodeStatus::Stale;
    r.error = "t_us " + std::to_string(r.sample.t_us) + " does not advance past " +
              std::to_string(*last_t_us_);
    return r;
  }
  last_t_us_ = r.sample.t_us;
  return r;
}

std::optional<TrajectoryKind> parse_trajectory_kind(std::string_view name) {
  if (name == "sweep-x") return TrajectoryKind::SweepX;
  if (name == "sweep-y") return TrajectoryKind::SweepY;
  if (name == "circle") return TrajectoryKind::Circle;
  if (name == "hold") return TrajectoryKind::Hold;
  return std::nullopt;
}

std::string_view to_string(TrajectoryKind kind) {
  switch (kind) {
    case TrajectoryKind::SweepX:
      return "sweep-x";
    case TrajectoryKind::SweepY:
      return "sweep-y";
    case TrajectoryKind::Circle:
      return "circle";
    case TrajectoryKind::Hold:
      return "hold";
  }
  return "?";
}

void TrajectorySpec::validate() const {
  if (!(rate_hz > 0.0)) throw SourceError(SourceError::Kind::InvalidSpec, "synth rate must be > 0");
  if (!(amplitude >= 0.0)) throw SourceError(SourceError::Kind::InvalidSpec, "synth amplitude must be >= 0");
  if (!(eye_separation >= 0.0)) {
    throw SourceError(SourceError::Kind::InvalidSpec, "synth eye separation must be >= 0");
  }
  if (!(duration_s >= 0.0)) throw SourceError(SourceError::Kind::InvalidSpec, "synth duration must be >= 0");
  if (kind != TrajectoryKind::Hold && !(period_s > 0.0)) {
    throw SourceError(SourceError::Kind::InvalidSpec, "synth period must be > 0");
  }
  if (frame_w < 1 || frame_h < 1) throw SourceError(SourceError::Kind::InvalidSpec, "synth frame must be non-empty");
}

std::int64_t TrajectorySpec::sample_count() const noexcept {
  return static_cast<std::int64_t>(std::floor(rate_hz * duration_s + 1e-9));
}

EyeSample synth_next(const TrajectorySpec& spec, double t_s) {
  PixelPos mid = spec.center;
  const double phase = spec.period_s > 0.0 ? 2.0 * std::numbers::pi * t_s / spec.period_s : 0.0;
  switch (spec.kind) {
    case TrajectoryKind::SweepX:
      mid.x += spec.amplitude * std::sin(phase);
      break;
    case TrajectoryKind::SweepY:
      mid.y += spec.amplitude * std::sin(phase);
      break;
    case TrajectoryKind::Circle:
      mid.x += spec.amplitude * std::cos(phase);
      mid.y += spec.amplitude * std::sin(phase);
      break;
    case TrajectoryKind::Hold:
      break;
  }
  EyeSample s;
  s.t_us = std::llround(t_s * 1e6);
  s.left = {mid.x + spec.eye_separation / 2.0, mid.y};
  s.right = {mid.x - spec.eye_separation / 2.0, mid.y};
  s.frame_w = spec.frame_w;
  s.frame_h = spec.frame_h;
  s.confidence = 1.0;
  return clamp_to_frame(s);
}

EyeSample synth_sample(const TrajectorySpec& spec, std::int64_t index) {
  return synth_next(spec, static_cast<double>(index) / spec.rate_hz);
}

bool LatestSampleSlot::publish(const EyeSample& sample) {
  std::unique_lock lock(mutex_);
  if (lockstep_) cv_.wait(lock, [&] { return closed_ || consumed_ == seq_; });
  if (closed_) return false;
  sample_ = sample;
  ++seq_;
  lock.unlock();
  cv_.notify_all();
  return true;
}

std::optional<LatestSampleSlot::Snapshot> LatestSampleSlot::latest() const {
  std::lock_guard lock(mutex_);
  if (seq_ == 0) return std::nullopt;
  return Snapshot{sample_, seq_};
}

std::uint64_t LatestSampleSlot::sequence() const {
  std::lock_guard lock(mutex_);
  return seq_;
}

bool LatestSampleSlot::wait_for(std::uint64_t after, std::chrono::milliseconds timeout) {
  std::unique_lock lock(mutex_);
  cv_.wait_for(lock, timeout, [&] { return closed_ || seq_ > after; });
  return seq_ > after;
}

std::optional<LatestSampleSlot::Snapshot> LatestSampleSlot::take(std::uint64_t after) {
  std::unique_lock lock(mutex_);
  if (seq_ <= after) return std::nullopt;
  Snapshot snap{sample_, seq_};
  consumed_ = seq_;
  lock.unlock();
  if (lockstep_) cv_.notify_all();
  return snap;
}

std::optional<LatestSampleSlot::Snapshot> LatestSampleSlot::wait_newer(
    std::uint64_t after, std::chrono::milliseconds timeout) {
  if (!wait_for(after, timeout)) return std::nullopt;
  return take(after);
}

void LatestSampleSlot::close() {
  {
    std::lock_guard lock(mutex_);
    closed_ = true;
  }
  cv_.notify_all();
}

bool LatestSampleSlot::closed() const {
  std::lock_guard lock(mutex_);
  return closed_;
}

SessionReport source_run(SampleSource& source, LatestSampleSlot& slot,
                         const std::atomic<bool>& stop) {
  SessionReport report;
  try {
    report = source.run(slot, stop);
  } catch (...) {
    slot.close();
    throw;
  }
  slot.close();
  return report;
}

UdpSource::UdpSource(std::uint16_t port, const std::string& bind_address) {
  fd_ = ::socket(AF_INET, SOCK_DGRAM | SOCK_CLOEXEC, 0);
  if (fd_ < 0) {
    throw SourceError(SourceError::Kind::BindFailed, std::string("socket: ") + std::strerror(errno));
  }
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, bind_address.c_str(), &addr.sin_addr) != 1) {
    ::close(fd_);
    throw SourceError(SourceError::Kind::BindFailed, "bad bind address " + bind_address);
  }
  if (::bind(fd_, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) != 0) {
    const int err = errno;
    ::close(fd_);
    throw SourceError(SourceError::Kind::BindFailed, "bind " + bind_address + ":" +
                                                         std::to_string(port) + ": " +
                                                         std::strerror(err));
  }
  socklen_t len = sizeof(addr);
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

UdpSource::~UdpSource() {
  if (fd_ >= 0) ::close(fd_);
}

SessionReport UdpSource::run(LatestSampleSlot& slot, const std::atomic<bool>& stop) {
  SessionReport report;
  StreamDecoder decoder;
  std::array<char, 2048> buf{};
  while (!stop.load(std::memory_order_relaxed)) {
    pollfd pfd{fd_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, 100);
    if (ready < 0 && errno != EINTR) {
      throw SourceError(SourceError::Kind::Io, std::string("poll: ") + std::strerror(errno));
    }
    if (ready <= 0) continue;
    const ssize_t n = ::recv(fd_, buf.data(), buf.size(), 0);
    if (n < 0) continue;
    if (static_cast<std::size_t>(n) == buf.size()) {
      ++report.malformed;  // truncated datagram
      continue;
    }
    ingest_line(std::string_view(buf.data(), static_cast<std::size_t>(n)), decoder, slot, report);
  }
  return report;
}

SessionReport LineStreamSource::run(LatestSampleSlot& slot, const std::atomic<bool>& stop) {
  SessionReport report;
  StreamDecoder decoder;
  std::string pending;
  std::array<char, 4096> buf{};
  while (!stop.load(std::memory_order_relaxed)) {
    pollfd pfd{fd_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, 100);
    if (ready < 0 && errno != EINTR) {
      throw SourceError(SourceError::Kind::Io, std::string("poll: ") + std::strerror(errno));
    }
    if (ready <= 0) continue;
    const ssize_t n = ::read(fd_, buf.data(), buf.size());
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      throw SourceError(SourceError::Kind::Io, std::string("read: ") + std::strerror(errno));
    }
    if (n == 0) break;
    pending.append(buf.data(), static_cast<std::size_t>(n));
    std::size_t start = 0;
    for (std::size_t nl = pending.find('\n'); nl != std::string::npos;
         nl = pending.find('\n', start)) {
      ingest_line(std::string_view(pending).substr(start, nl - start), decoder, slot, report);
      start = nl + 1;
    }
    pending.erase(0, start);
  }
  if (!pending.empty()) ingest_line(pending, decoder, slot, report);
  return report;
}

ReplaySource::ReplaySource(std::filesystem::path path, bool realtime)
    : path_(std::move(path)), realtime_(realtime) {
  if (!std::filesystem::is_regular_file(path_)) {
    throw SourceError(SourceError::Kind::FileNotFound, "replay file not found: " + path_.string());
  }
}

SessionReport ReplaySource::run(LatestSampleSlot& slot, const std::atomic<bool>& stop) {
  std::ifstream in(path_);
  if (!in) throw SourceError(SourceError::Kind::FileNotFound, "cannot open " + path_.string());

  SessionReport report;
  StreamDecoder decoder;
  std::optional<std::int64_t> first_t_us;
  Clock::time_point start{};
  std::string line;
  while (!stop.load(std::memory_order_relaxed) && std::getline(in, line)) {
    if (is_blank(line)) continue;
    const DecodeResult r = decoder.decode(line);
    if (r.status == DecodeStatus::Malformed) {
      ++report.malformed;
      continue;
    }
    if (r.status == DecodeStatus::Stale) {
      ++report.stale;
      continue;
    }
    if (realtime_) {
      if (!first_t_us) {
        first_t_us = r.sample.t_us;
        start = Clock::now();
      }
      const auto offset = std::chrono::microseconds(r.sample.t_us - *first_t_us);
      if (!sleep_until_or_stop(start + offset, stop)) break;
    }
    ++report.accepted;
    slot.publish(r.sample);
  }
  return report;
}

SynthSource::SynthSource(TrajectorySpec spec, bool paced) : spec_(spec), paced_(paced) {
  spec_.validate();
}

SessionReport SynthSource::run(LatestSampleSlot& slot, const std::atomic<bool>& stop) {
  SessionReport report;
  const std::int64_t n = spec_.sample_count();
  const auto start = Clock::now();
  for (std::int64_t i = 0; i < n && !stop.load(std::memory_order_relaxed); ++i) {
    if (paced_) {
      const auto offset = std::chrono::duration_cast<Clock::duration>(
          std::chrono::duration<double>(static_cast<double>(i) / spec_.rate_hz));
      if (!sleep_until_or_stop(start + offset, stop)) break;
    }
    if (!slot.publish(synth_sample(spec_, i))) break;
    ++report.accepted;
  }
  return report;
}

}  // namespace pforge
