#include <chrono>

#include <doctest.h>

#include "pforge/anaglyph.hpp"
#include "support.hpp"

using namespace pforge;

TEST_CASE("solid red left and solid cyan right give white") {
  const Image out = compose(Image::filled(4, 4, 255, 0, 0), Image::filled(4, 4, 0, 255, 255));
  CHECK(out == Image::filled(4, 4, 255, 255, 255));
}

TEST_CASE("black left and white right give cyan") {
  const Image out = compose(Image::filled(3, 2, 0, 0, 0), Image::filled(3, 2, 255, 255, 255));
  CHECK(out == Image::filled(3, 2, 0, 255, 255));
}

TEST_CASE("single pixel channel routing") {
  const Image out = compose(Image(1, 1, {10, 20, 30}), Image(1, 1, {40, 50, 60}));
  CHECK(out == Image(1, 1, {10, 50, 60}));
}

TEST_CASE("mismatched sizes are rejected") {
  CHECK_THROWS_AS(compose(Image(4, 4), Image(4, 5)), AnaglyphSizeError);
  Image out(1, 1);
  CHECK_THROWS_AS(compose_into(Image(3, 3), Image(2, 3), out), AnaglyphSizeError);
}

TEST_CASE("compose_into refuses an output aliasing an input") {
  Image a = Image::filled(2, 2, 1, 2, 3);
  const Image b = Image::filled(2, 2, 4, 5, 6);
  CHECK_THROWS_AS(compose_into(a, b, a), std::invalid_argument);
}

TEST_CASE("property: per-pixel channel identities on random pairs") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const int w = 1 + static_cast<int>(rng() % 64);
    const int h = 1 + static_cast<int>(rng() % 64);
    const Image l = test::random_image(w, h, rng);
    const Image r = test::random_image(w, h, rng);
    const Image out = compose(l, r);
    REQUIRE(out.width() == w);
    REQUIRE(out.height() == h);
    bool ok = true;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        ok = ok && out.at(x, y)[0] == l.at(x, y)[0] && out.at(x, y)[1] == r.at(x, y)[1] &&
             out.at(x, y)[2] == r.at(x, y)[2];
      }
    }
    CHECK(ok);
    CHECK(compose(l, r) == out);
    CHECK(compose(l, l) == l);
  }
}

TEST_CASE("compose_into matches compose and reuses a correctly sized buffer") {
  std::mt19937 rng(23);
  Image out(1, 1);
  compose_into(test::random_image(32, 16, rng), test::random_image(32, 16, rng), out);
  CHECK(out.width() == 32);
  const std::uint8_t* buffer = out.pixels().data();
  for (int i = 0; i < 10; ++i) {
    const Image l = test::random_image(32, 16, rng);
    const Image r = test::random_image(32, 16, rng);
    compose_into(l, r, out);
    CHECK(out.pixels().data() == buffer);
    CHECK(out.size_bytes() == 32u * 16u * 3u);
    CHECK(out == compose(l, r));
  }
}

TEST_CASE("512x512 compose stays well inside a 30 Hz frame budget") {
  std::mt19937 rng(1);
  const Image l = test::random_image(512, 512, rng);
  const Image r = test::random_image(512, 512, rng);
  Image out(512, 512);
  double worst_ms = 0;
  for (int i = 0; i < 20; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    compose_into(l, r, out);
    const auto t1 = std::chrono::steady_clock::now();
    worst_ms = std::max(worst_ms, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  CHECK(worst_ms < 33.3);
}
