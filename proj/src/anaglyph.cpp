#include "pforge/anaglyph.hpp"

#include <string>

namespace pforge {

namespace {

void check_sizes(const ViewImage& left, const ViewImage& right) {
  if (!left.same_size(right) || left.empty()) {
    throw AnaglyphSizeError("anaglyph views differ in size: " + std::to_string(left.width()) + "x" +
                            std::to_string(left.height()) + " vs " +
                            std::to_string(right.width()) + "x" + std::to_string(right.height()));
  }
}

void route_channels(const std::uint8_t* __restrict l, const std::uint8_t* __restrict r,
                    std::uint8_t* __restrict o, std::size_t bytes) noexcept {
  for (std::size_t i = 0; i < bytes; i += 3) {
    o[i] = l[i];
    o[i + 1] = r[i + 1];
    o[i + 2] = r[i + 2];
  }
}

}  // namespace

AnaglyphFrame compose(const ViewImage& left, const ViewImage& right) {
  AnaglyphFrame out;
  compose_into(left, right, out);
  return out;
}

void compose_into(const ViewImage& left, const ViewImage& right, AnaglyphFrame& out) {
  check_sizes(left, right);
  if (!out.same_size(left)) out = AnaglyphFrame(left.width(), left.height());
  // route_channels() takes restrict pointers.
  if (out.pixels().data() == left.pixels().data() || out.pixels().data() == right.pixels().data()) {
    throw std::invalid_argument("anaglyph output must not alias an input view");
  }
  route_channels(left.pixels().data(), right.pixels().data(), out.pixels().data(),
                 out.size_bytes());
}

}  // namespace pforge
