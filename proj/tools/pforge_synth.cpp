// Emits a synthetic eye trajectory as wire messages, to stdout (one per
// line, usable as a replay file or piped into --tracker stdin) or as UDP
// datagrams to a running viewer.

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "pforge/tracker_protocol.hpp"
#include "pforge/viewer.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Synthetic eye-sample generator"};

  std::string kind = "sweep-x";
  pforge::TrajectorySpec spec;
  std::string center;
  std::string frame = "640x480";
  std::string udp;
  bool paced = false;

  app.add_option("--kind", kind, "sweep-x | sweep-y | circle | hold");
  app.add_option("--amp", spec.amplitude, "Amplitude in pixels");
  app.add_option("--period", spec.period_s, "Period in seconds");
  app.add_option("--sep", spec.eye_separation, "Eye separation in pixels");
  app.add_option("--rate", spec.rate_hz, "Samples per second");
  app.add_option("--duration", spec.duration_s, "Seconds of trajectory");
  app.add_option("--center", center, "Trajectory centre X,Y (default: frame centre)");
  app.add_option("--frame", frame, "Camera frame size WxH");
  app.add_option("--udp", udp, "Send datagrams to HOST:PORT instead of printing");
  app.add_flag("--paced", paced, "Emit in real time at --rate");
  CLI11_PARSE(app, argc, argv);

  try {
    const auto parsed = pforge::parse_trajectory_kind(kind);
    if (!parsed) throw pforge::ConfigError("unknown trajectory kind '" + kind + "'");
    spec.kind = *parsed;
    std::tie(spec.frame_w, spec.frame_h) = pforge::parse_frame_size(frame);
    spec.center = center.empty() ? pforge::PixelPos{spec.frame_w / 2.0, spec.frame_h / 2.0}
                                 : pforge::parse_center(center);
    spec.validate();

    int fd = -1;
    sockaddr_in dest{};
    if (!udp.empty()) {
      const auto colon = udp.rfind(':');
      if (colon == std::string::npos) throw pforge::ConfigError("--udp expects HOST:PORT");
      dest.sin_family = AF_INET;
      dest.sin_port = htons(static_cast<std::uint16_t>(std::stoi(udp.substr(colon + 1))));
      if (inet_pton(AF_INET, udp.substr(0, colon).c_str(), &dest.sin_addr) != 1) {
        throw pforge::ConfigError("bad host in --udp");
      }
      fd = ::socket(AF_INET, SOCK_DGRAM, 0);
      if (fd < 0) throw std::runtime_error("socket() failed");
    }

    const auto start = std::chrono::steady_clock::now();
    for (std::int64_t i = 0; i < spec.sample_count(); ++i) {
      if (paced) {
        std::this_thread::sleep_until(start + std::chrono::duration_cast<std::chrono::nanoseconds>(
                                                  std::chrono::duration<double>(i / spec.rate_hz)));
      }
      const std::string line = pforge::encode(pforge::synth_sample(spec, i));
      if (fd >= 0) {
        ::sendto(fd, line.data(), line.size(), 0, reinterpret_cast<const sockaddr*>(&dest),
                 sizeof(dest));
      } else {
        std::fwrite(line.data(), 1, line.size(), stdout);
        if (paced) std::fflush(stdout);
      }
    }
    if (fd >= 0) ::close(fd);
  } catch (const std::exception& e) {
    std::cerr << "pforge_synth: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
