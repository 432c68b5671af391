#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

#include "pforge/image.hpp"

namespace pforge {

/// Where composed frames go. Owned and driven by the render loop only.
class FrameSink {
 public:
  virtual ~FrameSink() = default;
  virtual void present(const AnaglyphFrame& frame, std::uint64_t index) = 0;
  /// The user asked to quit (window closed, Esc pressed).
  virtual bool wants_close() { return false; }
};

/// Writes each frame as <out_dir>/frame_NNNNNN.ppm (binary P6).
class HeadlessSink final : public FrameSink {
 public:
  explicit HeadlessSink(std::filesystem::path out_dir);
  void present(const AnaglyphFrame& frame, std::uint64_t index) override;

  static std::string frame_name(std::uint64_t index);
  const std::filesystem::path& out_dir() const noexcept { return out_dir_; }

 private:
  std::filesystem::path out_dir_;
  std::string path_;        // reused: "<dir>/frame_" + digits + ".ppm"
  std::size_t digits_at_;   // offset of the six index digits in path_
};

bool window_sink_available() noexcept;

/// Native window surface with nearest-neighbour scaling. Throws
/// std::runtime_error when no display is available or the build lacks X11.
std::unique_ptr<FrameSink> make_window_sink(int width, int height, bool fullscreen,
                                            const std::string& title = "pforge");

}  // namespace pforge
