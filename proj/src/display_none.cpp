#include <stdexcept>

#include "pforge/display.hpp"

namespace pforge {

bool window_sink_available() noexcept { return false; }

std::unique_ptr<FrameSink> make_window_sink(int, int, bool, const std::string&) {
  throw std::runtime_error("built without a window surface; use --headless OUT_DIR");
}

}  // namespace pforge
