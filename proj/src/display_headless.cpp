#include <cstdio>
#include <memory>
#include <stdexcept>

#include "pforge/display.hpp"

namespace pforge {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept {
    if (f != nullptr) std::fclose(f);
  }
};

}  // namespace

HeadlessSink::HeadlessSink(std::filesystem::path out_dir) : out_dir_(std::move(out_dir)) {
  std::filesystem::create_directories(out_dir_);
  path_ = (out_dir_ / "frame_").string();
  digits_at_ = path_.size();
  path_ += "000000.ppm";
}

std::string HeadlessSink::frame_name(std::uint64_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%06llu.ppm", static_cast<unsigned long long>(index));
  return buf;
}

void HeadlessSink::present(const AnaglyphFrame& frame, std::uint64_t index) {
  if (index < 1'000'000) {
    std::uint64_t v = index;
    for (int i = 5; i >= 0; --i) {
      path_[digits_at_ + static_cast<std::size_t>(i)] = static_cast<char>('0' + v % 10);
      v /= 10;
    }
  } else {
    path_ = (out_dir_ / frame_name(index)).string();
  }

  char header[48];
  const int header_len = std::snprintf(header, sizeof(header), "P6\n%d %d\n255\n", frame.width(),
                                       frame.height());

  std::unique_ptr<std::FILE, FileCloser> f(std::fopen(path_.c_str(), "wb"));
  if (!f) throw std::runtime_error("cannot write frame " + path_);
  const auto px = frame.pixels();
  if (std::fwrite(header, 1, static_cast<std::size_t>(header_len), f.get()) !=
          static_cast<std::size_t>(header_len) ||
      std::fwrite(px.data(), 1, px.size(), f.get()) != px.size()) {
    throw std::runtime_error("short write on " + path_);
  }

  if (index >= 1'000'000) {
    path_ = (out_dir_ / "frame_").string() + "000000.ppm";
  }
}

}  // namespace pforge
