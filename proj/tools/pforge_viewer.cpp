// Head-coupled light-field viewer.
//
//   pforge_viewer --lightfield scene.png --layout atlas --rows 9 --cols 9 \
//                 --tracker udp:9870 --alpha 40
//   pforge_viewer --lightfield views/ --layout 'pattern:input_Cam{index:03}.png' \
//                 --tracker synth:sweep-x,200,4,65,30,10 --headless out/ --metrics m.json
//
// Every flag can also be given through the environment as PFORGE_<FLAG>,
// e.g. PFORGE_ALPHA=60. Flags on the command line win.

#include <csignal>
#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "pforge/viewer.hpp"

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop.store(true); }

std::string env_name(const std::string& flag) {
  std::string out = "PFORGE_";
  for (char c : flag) out.push_back(c == '-' ? '_' : static_cast<char>(std::toupper(c)));
  return out;
}

void print_summary(const pforge::ExitReport& report) {
  const auto& m = report.metrics;
  std::printf("frames %llu  fps %.2f  sample_fps %.2f\n",
              static_cast<unsigned long long>(report.frames), m["fps"].get<double>(),
              m["sample_fps"].get<double>());
  std::printf("%-8s %12s %12s\n", "stage", "mean_us", "p99_us");
  for (std::size_t i = 0; i < pforge::kStageCount; ++i) {
    const std::string name(pforge::to_string(static_cast<pforge::Stage>(i)));
    const auto& s = m["stages"][name];
    std::printf("%-8s %12.1f %12.1f\n", name.c_str(), s["mean_us"].get<double>(),
                s["p99_us"].get<double>());
  }
  std::printf("transitions left %llu right %llu\n",
              static_cast<unsigned long long>(m["transitions"]["left"].get<std::uint64_t>()),
              static_cast<unsigned long long>(m["transitions"]["right"].get<std::uint64_t>()));
  std::printf("source accepted %llu malformed %llu stale %llu\n",
              static_cast<unsigned long long>(report.source.accepted),
              static_cast<unsigned long long>(report.source.malformed),
              static_cast<unsigned long long>(report.source.stale));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Head-coupled red/cyan light-field viewer"};

  std::string lightfield;
  std::string layout = "atlas";
  int rows = 9;
  int cols = 9;
  double alpha = 40.0;
  int smooth_k = pforge::SmoothingFilter::kDefaultWindow;
  bool mirror_x = true;
  bool invert_y = true;
  std::string center;
  std::string frame = "640x480";
  std::string tracker = "udp:9870";
  std::string headless;
  std::uint64_t frames = 0;
  std::string metrics;
  bool fullscreen = false;
  double present_rate = 0.0;

  auto opt = [&](CLI::Option* o, const std::string& flag) { return o->envname(env_name(flag)); };

  opt(app.add_option("--lightfield", lightfield, "Atlas image or directory of views")->required(),
      "lightfield");
  opt(app.add_option("--layout", layout, "atlas | pattern:TEMPLATE ({row},{col} or {index[:NN]})"),
      "layout");
  opt(app.add_option("--rows", rows, "Vertical angular resolution M")->check(CLI::PositiveNumber),
      "rows");
  opt(app.add_option("--cols", cols, "Horizontal angular resolution N")->check(CLI::PositiveNumber),
      "cols");
  opt(app.add_option("--alpha", alpha, "Grid spacing in camera pixels")->check(CLI::PositiveNumber),
      "alpha");
  opt(app.add_option("--smooth-k", smooth_k, "Moving-average window in frames")
          ->check(CLI::PositiveNumber),
      "smooth-k");
  opt(app.add_option("--mirror-x", mirror_x, "Mirror the grid horizontally"), "mirror-x");
  opt(app.add_option("--invert-y", invert_y, "Invert the grid vertically"), "invert-y");
  opt(app.add_option("--center", center, "Grid centre X,Y in camera pixels (default: frame centre)"),
      "center");
  opt(app.add_option("--frame", frame, "Camera frame size WxH"), "frame");
  opt(app.add_option("--tracker", tracker,
                     "udp:PORT | stdin | replay:PATH[,realtime] | "
                     "synth:KIND,AMP,PERIOD,SEP,RATE,DURATION"),
      "tracker");
  auto* headless_opt =
      opt(app.add_option("--headless", headless, "Write frames as PPM into OUT_DIR"), "headless");
  opt(app.add_option("--frames", frames, "Stop after N frames"), "frames");
  opt(app.add_option("--metrics", metrics, "Write metrics JSON on exit"), "metrics");
  opt(app.add_flag("--fullscreen", fullscreen, "Fullscreen window")->excludes(headless_opt),
      "fullscreen");
  opt(app.add_option("--present-rate", present_rate,
                     "Present at a fixed rate in Hz (default: once per tracker sample)")
          ->check(CLI::NonNegativeNumber),
      "present-rate");

  CLI11_PARSE(app, argc, argv);

  try {
    pforge::ViewerConfig cfg;
    cfg.lightfield.path = lightfield;
    cfg.lightfield.layout = pforge::parse_layout(layout, cfg.lightfield.pattern);
    cfg.lightfield.rows = rows;
    cfg.lightfield.cols = cols;

    const auto [fw, fh] = pforge::parse_frame_size(frame);
    cfg.grid = pforge::GridConfig::centered(rows, cols, alpha, fw, fh);
    if (!center.empty()) cfg.grid.center = pforge::parse_center(center);
    cfg.grid.mirror_x = mirror_x;
    cfg.grid.invert_y = invert_y;
    cfg.smooth_k = smooth_k;
    cfg.tracker = pforge::parse_tracker(tracker);
    cfg.present_rate_hz = present_rate;
    if (frames > 0) cfg.frame_limit = frames;
    if (!metrics.empty()) cfg.metrics_path = metrics;

    if (!headless.empty()) {
      cfg.display.mode = pforge::DisplaySpec::Mode::Headless;
      cfg.display.out_dir = headless;
    } else {
      cfg.display.mode = fullscreen ? pforge::DisplaySpec::Mode::Fullscreen
                                    : pforge::DisplaySpec::Mode::Windowed;
    }

    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    const pforge::ExitReport report = pforge::run(cfg, &g_stop);
    print_summary(report);
  } catch (const std::exception& e) {
    std::cerr << "pforge_viewer: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
