#include "pforge/viewer.hpp"

#include <algorithm>
#include <charconv>
#include <exception>
#include <fstream>
#include <thread>
#include <vector>

namespace pforge {

namespace {

using Clock = std::chrono::steady_clock;

double micros(Clock::duration d) { return std::chrono::duration<double, std::micro>(d).count(); }

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double parse_double(std::string_view text, std::string_view what) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end || text.empty()) {
    throw ConfigError("bad " + std::string(what) + " '" + std::string(text) + "'");
  }
  return v;
}

long parse_int(std::string_view text, std::string_view what) {
  long v = 0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end || text.empty()) {
    throw ConfigError("bad " + std::string(what) + " '" + std::string(text) + "'");
  }
  return v;
}

constexpr double kFreeRunTimestampHz = 30.0;

}  // namespace

LightFieldSpec::Layout parse_layout(std::string_view text, std::string& pattern_out) {
  if (text == "atlas") return LightFieldSpec::Layout::Atlas;
  constexpr std::string_view kPrefix = "pattern:";
  if (text.starts_with(kPrefix) && text.size() > kPrefix.size()) {
    pattern_out = std::string(text.substr(kPrefix.size()));
    return LightFieldSpec::Layout::Pattern;
  }
  throw ConfigError("layout must be 'atlas' or 'pattern:TEMPLATE', got '" + std::string(text) + "'");
}

TrackerSpec parse_tracker(std::string_view text) {
  TrackerSpec spec;
  if (text == "stdin") {
    spec.kind = TrackerSpec::Kind::Stdin;
    return spec;
  }
  const std::size_t colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw ConfigError("tracker must be udp:PORT, stdin, replay:PATH[,realtime] or synth:...");
  }
  const std::string_view kind = text.substr(0, colon);
  const std::string_view rest = text.substr(colon + 1);

  if (kind == "udp") {
    const long port = parse_int(rest, "UDP port");
    if (port < 0 || port > 65535) throw ConfigError("UDP port out of range");
    spec.kind = TrackerSpec::Kind::Udp;
    spec.port = static_cast<std::uint16_t>(port);
    return spec;
  }
  if (kind == "replay") {
    spec.kind = TrackerSpec::Kind::Replay;
    std::string_view path = rest;
    constexpr std::string_view kRealtime = ",realtime";
    if (path.ends_with(kRealtime)) {
      spec.realtime = true;
      path.remove_suffix(kRealtime.size());
    }
    if (path.empty()) throw ConfigError("replay needs a file path");
    spec.replay_path = std::string(path);
    return spec;
  }
  if (kind == "synth") {
    const auto fields = split(rest, ',');
    if (fields.size() != 6) {
      throw ConfigError("synth expects KIND,AMP,PERIOD,SEP,RATE,DURATION");
    }
    const auto traj = parse_trajectory_kind(fields[0]);
    if (!traj) throw ConfigError("unknown synth trajectory '" + std::string(fields[0]) + "'");
    spec.kind = TrackerSpec::Kind::Synth;
    spec.synth.kind = *traj;
    spec.synth.amplitude = parse_double(fields[1], "synth amplitude");
    spec.synth.period_s = parse_double(fields[2], "synth period");
    spec.synth.eye_separation = parse_double(fields[3], "synth eye separation");
    const double rate = parse_double(fields[4], "synth rate");
    spec.synth.duration_s = parse_double(fields[5], "synth duration");
    if (rate < 0.0) throw ConfigError("synth rate must be >= 0");
    spec.synth_paced = rate > 0.0;
    spec.synth.rate_hz = rate > 0.0 ? rate : kFreeRunTimestampHz;
    try {
      spec.synth.validate();
    } catch (const SourceError& e) {
      throw ConfigError(e.what());
    }
    return spec;
  }
  throw ConfigError("unknown tracker kind '" + std::string(kind) + "'");
}

PixelPos parse_center(std::string_view text) {
  const auto parts = split(text, ',');
  if (parts.size() != 2) throw ConfigError("center must be X,Y");
  return {parse_double(parts[0], "center x"), parse_double(parts[1], "center y")};
}

std::pair<int, int> parse_frame_size(std::string_view text) {
  const auto parts = split(text, 'x');
  if (parts.size() != 2) throw ConfigError("frame size must be WxH");
  const long w = parse_int(parts[0], "frame width");
  const long h = parse_int(parts[1], "frame height");
  if (w < 1 || h < 1 || w > 1'000'000 || h > 1'000'000) throw ConfigError("frame size out of range");
  return {static_cast<int>(w), static_cast<int>(h)};
}

LightFieldGrid load_lightfield(const LightFieldSpec& spec) {
  switch (spec.layout) {
    case LightFieldSpec::Layout::Atlas:
      return load_from_atlas(spec.path, spec.rows, spec.cols);
    case LightFieldSpec::Layout::Pattern:
      return load_from_directory(spec.path, spec.pattern, spec.rows, spec.cols);
  }
  throw ConfigError("unknown light field layout");
}

std::unique_ptr<SampleSource> make_source(const TrackerSpec& spec, const GridConfig& grid) {
  switch (spec.kind) {
    case TrackerSpec::Kind::Udp:
      return std::make_unique<UdpSource>(spec.port);
    case TrackerSpec::Kind::Stdin:
      return std::make_unique<LineStreamSource>(0);
    case TrackerSpec::Kind::Replay:
      return std::make_unique<ReplaySource>(spec.replay_path, spec.realtime);
    case TrackerSpec::Kind::Synth: {
      TrajectorySpec traj = spec.synth;
      traj.center = grid.center;
      traj.frame_w = grid.frame_w;
      traj.frame_h = grid.frame_h;
      return std::make_unique<SynthSource>(traj, spec.synth_paced);
    }
  }
  throw ConfigError("unknown tracker kind");
}

RenderPipeline::RenderPipeline(const LightFieldGrid& grid, const GridConfig& cfg, int smooth_k,
                               FrameSink& sink, FrameMetrics& metrics)
    : grid_(grid),
      cfg_(cfg),
      filter_(smooth_k),
      sink_(sink),
      metrics_(metrics),
      frame_(grid.view_width(), grid.view_height()) {
  cfg_.validate();
  if (cfg_.rows != grid.rows() || cfg_.cols != grid.cols()) {
    throw ConfigError("grid config is " + std::to_string(cfg_.rows) + "x" +
                      std::to_string(cfg_.cols) + " but the light field is " +
                      std::to_string(grid.rows()) + "x" + std::to_string(grid.cols()));
  }
  // Until the first confident sample both eyes sit on the grid centre.
  held_.left = held_.right = cfg_.center;
  held_.frame_w = cfg_.frame_w;
  held_.frame_h = cfg_.frame_h;
}

void RenderPipeline::step(const EyeSample* sample, double ingest_us) {
  StageTimes times{};
  times[static_cast<std::size_t>(Stage::Ingest)] = ingest_us;

  const auto t0 = Clock::now();
  if (sample != nullptr && sample->confidence >= kMinTrackingConfidence) {
    EyeSample s = *sample;
    if (s.frame_w != cfg_.frame_w || s.frame_h != cfg_.frame_h) {
      // Tracker camera resolution differs from the configured overlay frame.
      const double sx = static_cast<double>(cfg_.frame_w) / s.frame_w;
      const double sy = static_cast<double>(cfg_.frame_h) / s.frame_h;
      s.left = {s.left.x * sx, s.left.y * sy};
      s.right = {s.right.x * sx, s.right.y * sy};
      s.frame_w = cfg_.frame_w;
      s.frame_h = cfg_.frame_h;
    }
    held_ = filter_.smooth(s);
  }
  const auto t1 = Clock::now();
  selection_ = select_views(held_, cfg_);
  const auto t2 = Clock::now();
  compose_into(grid_.view(selection_.left.row, selection_.left.col),
               grid_.view(selection_.right.row, selection_.right.col), frame_);
  const auto t3 = Clock::now();
  sink_.present(frame_, frame_index_);
  const auto t4 = Clock::now();

  times[static_cast<std::size_t>(Stage::Smooth)] = micros(t1 - t0);
  times[static_cast<std::size_t>(Stage::Map)] = micros(t2 - t1);
  times[static_cast<std::size_t>(Stage::Compose)] = micros(t3 - t2);
  times[static_cast<std::size_t>(Stage::Present)] = micros(t4 - t3);
  metrics_.record_frame(times, t4, selection_);
  ++frame_index_;
}

namespace {

void check_config(const ViewerConfig& cfg) {
  if (cfg.smooth_k < 1) throw ConfigError("smoothing window must be >= 1");
  if (cfg.present_rate_hz < 0.0) throw ConfigError("present rate must be >= 0");
}

ExitReport run_loaded(const ViewerConfig& cfg, const LightFieldGrid& grid, FrameSink& sink,
                      const std::atomic<bool>* stop) {
  GridConfig grid_cfg = cfg.grid;
  grid_cfg.rows = grid.rows();
  grid_cfg.cols = grid.cols();
  grid_cfg.validate();

  std::unique_ptr<SampleSource> source = make_source(cfg.tracker, grid_cfg);
  const bool lockstep =
      cfg.display.mode == DisplaySpec::Mode::Headless && source->deterministic();
  LatestSampleSlot slot(lockstep);

  std::size_t history = FrameMetrics::kDefaultHistory;
  if (cfg.frame_limit) {
    history = static_cast<std::size_t>(std::clamp<std::uint64_t>(*cfg.frame_limit, 1, 1u << 20));
  }
  FrameMetrics metrics(history);
  RenderPipeline pipeline(grid, grid_cfg, cfg.smooth_k, sink, metrics);

  std::atomic<bool> source_stop{false};
  SessionReport source_report;
  std::exception_ptr source_error;
  std::thread ingestion([&] {
    try {
      source_report = source_run(*source, slot, source_stop);
    } catch (...) {
      source_error = std::current_exception();
    }
  });

  auto stop_requested = [&] {
    return (stop != nullptr && stop->load(std::memory_order_relaxed)) || sink.wants_close();
  };
  auto limit_reached = [&] { return cfg.frame_limit && pipeline.frames() >= *cfg.frame_limit; };

  std::uint64_t seen = 0;
  try {
    if (cfg.present_rate_hz > 0.0) {
      const auto period = std::chrono::duration_cast<Clock::duration>(
          std::chrono::duration<double>(1.0 / cfg.present_rate_hz));
      auto next = Clock::now();
      while (!limit_reached() && !stop_requested()) {
        std::this_thread::sleep_until(next);
        next += period;
        const auto t0 = Clock::now();
        const auto snap = slot.take(seen);
        const auto t1 = Clock::now();
        if (snap) {
          seen = snap->seq;
          metrics.record_sample_arrival(t1);
          pipeline.step(&snap->sample, micros(t1 - t0));
        } else {
          if (slot.closed()) break;
          pipeline.step(nullptr, micros(t1 - t0));
        }
      }
    } else {
      while (!limit_reached() && !stop_requested()) {
        if (!slot.wait_for(seen, std::chrono::milliseconds(50))) {
          if (slot.closed()) break;
          continue;
        }
        const auto t0 = Clock::now();
        const auto snap = slot.take(seen);
        const auto t1 = Clock::now();
        if (!snap) continue;
        seen = snap->seq;
        metrics.record_sample_arrival(t1);
        pipeline.step(&snap->sample, micros(t1 - t0));
      }
    }
  } catch (...) {
    source_stop = true;
    slot.close();
    ingestion.join();
    throw;
  }

  source_stop = true;
  slot.close();
  ingestion.join();
  if (source_error) std::rethrow_exception(source_error);

  ExitReport report;
  report.frames = pipeline.frames();
  report.source = source_report;
  report.metrics = report_metrics(metrics);
  report.metrics["source"] = {{"accepted", source_report.accepted},
                              {"malformed", source_report.malformed},
                              {"stale", source_report.stale}};
  if (cfg.metrics_path) {
    std::ofstream out(*cfg.metrics_path, std::ios::trunc);
    out << report.metrics.dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write metrics to " + cfg.metrics_path->string());
  }
  return report;
}

}  // namespace

ExitReport run(const ViewerConfig& cfg, FrameSink& sink, const std::atomic<bool>* stop) {
  check_config(cfg);
  const LightFieldGrid grid = load_lightfield(cfg.lightfield);
  return run_loaded(cfg, grid, sink, stop);
}

ExitReport run(const ViewerConfig& cfg, const std::atomic<bool>* stop) {
  check_config(cfg);
  const LightFieldGrid grid = load_lightfield(cfg.lightfield);
  std::unique_ptr<FrameSink> sink;
  switch (cfg.display.mode) {
    case DisplaySpec::Mode::Headless:
      if (cfg.display.out_dir.empty()) throw ConfigError("headless mode needs an output directory");
      sink = std::make_unique<HeadlessSink>(cfg.display.out_dir);
      break;
    case DisplaySpec::Mode::Windowed:
    case DisplaySpec::Mode::Fullscreen:
      sink = make_window_sink(grid.view_width(), grid.view_height(),
                              cfg.display.mode == DisplaySpec::Mode::Fullscreen);
      break;
  }
  return run_loaded(cfg, grid, *sink, stop);
}

}  // namespace pforge
