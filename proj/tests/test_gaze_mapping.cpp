#include <cmath>
#include <limits>

#include <doctest.h>

#include "pforge/gaze_mapping.hpp"
#include "support.hpp"

using namespace pforge;

namespace {

EyeSample both(double x, double y, std::int64_t t = 0) {
  EyeSample s;
  s.t_us = t;
  s.left = {x, y};
  s.right = {x, y};
  return s;
}

GridConfig plain(double alpha) {
  GridConfig cfg = GridConfig::centered(9, 9, alpha);
  cfg.mirror_x = false;
  cfg.invert_y = false;
  return cfg;
}

}  // namespace

TEST_CASE("smoothing with k=1 is the identity") {
  SmoothingFilter f(1);
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(-1000, 1000);
  for (int i = 0; i < 50; ++i) {
    EyeSample s;
    s.left = {u(rng), u(rng)};
    s.right = {u(rng), u(rng)};
    const EyeSample out = f.smooth(s);
    CHECK(out.left == s.left);
    CHECK(out.right == s.right);
  }
}

TEST_CASE("smoothing k=3 primes over what exists then slides") {
  SmoothingFilter f(3);
  const double xs[] = {0, 10, 20, 30};
  const double want[] = {0, 5, 10, 20};
  for (int i = 0; i < 4; ++i) {
    CHECK(f.smooth(both(xs[i], 0)).left.x == doctest::Approx(want[i]).epsilon(1e-12));
  }
  f.reset();
  CHECK(f.count() == 0);
  CHECK(f.smooth(both(7, 0)).left.x == 7.0);
}

TEST_CASE("smoothing passes through timestamp and confidence") {
  SmoothingFilter f(5);
  EyeSample s = both(1, 2, 1234);
  s.confidence = 0.75;
  const EyeSample out = f.smooth(s);
  CHECK(out.t_us == 1234);
  CHECK(out.confidence == 0.75);
}

TEST_CASE("property: constant input is reproduced exactly") {
  for (int k : {1, 2, 3, 5, 7, 30}) {
    SmoothingFilter f(k);
    for (int i = 0; i < 200; ++i) {
      const EyeSample out = f.smooth(both(0.1, 317.3));
      REQUIRE(out.left.x == 0.1);
      REQUIRE(out.left.y == 317.3);
    }
  }
}

TEST_CASE("property: smoothing matches naive re-summation") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> u(0, 640);
  for (int k : {1, 3, 5, 30}) {
    SmoothingFilter f(k);
    std::vector<double> lx, ry;
    for (int i = 0; i < 2000; ++i) {
      EyeSample s;
      s.left = {u(rng), u(rng)};
      s.right = {u(rng), u(rng)};
      lx.push_back(s.left.x);
      ry.push_back(s.right.y);
      const EyeSample out = f.smooth(s);
      REQUIRE(std::abs(out.left.x - test::resum_mean(lx, k)) < 1e-9);
      REQUIRE(std::abs(out.right.y - test::resum_mean(ry, k)) < 1e-9);
    }
  }
}

TEST_CASE("smoothing rejects a non-positive window") {
  CHECK_THROWS_AS(SmoothingFilter(0), std::invalid_argument);
  CHECK(SmoothingFilter().window() == 5);
}

TEST_CASE("grid config defaults and validation") {
  const GridConfig cfg;
  CHECK(cfg.rows == 9);
  CHECK(cfg.cols == 9);
  CHECK(cfg.alpha == 40.0);
  CHECK(cfg.mirror_x);
  CHECK(cfg.invert_y);
  CHECK(cfg.center == PixelPos{320, 240});

  GridConfig bad = cfg;
  bad.alpha = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.cols = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("grid points honour mirror and invert") {
  GridConfig cfg = plain(40);
  CHECK(cfg.grid_point(4, 4) == PixelPos{320, 240});
  CHECK(cfg.grid_point(0, 0) == PixelPos{160, 80});
  cfg.mirror_x = true;
  cfg.invert_y = true;
  CHECK(cfg.grid_point(0, 0) == PixelPos{480, 400});
}

TEST_CASE("mapping examples") {
  CHECK(map_eye_to_view({480, 240}, plain(40)) == ViewIndex{4, 8});
  CHECK(map_eye_to_view({320, 240}, GridConfig{}) == ViewIndex{4, 4});
  // With alpha=200 the corner grid point lies far outside the frame; the
  // nearest point to the frame origin is (3,2) at (-80, 40).
  CHECK(map_eye_to_view({0, 0}, plain(200)) == ViewIndex{3, 2});
  CHECK(map_eye_to_view({0, 0}, plain(20)) == ViewIndex{0, 0});
  // Mirrored: a position at the right of the frame picks a low column.
  CHECK(map_eye_to_view({480, 240}, GridConfig{}) == ViewIndex{4, 0});
}

TEST_CASE("select_views maps each eye independently") {
  GridConfig cfg;
  cfg.invert_y = false;
  EyeSample s;
  // Both positions sit exactly on column boundaries; ties go to the smaller column.
  s.left = {300, 240};
  s.right = {340, 240};
  CHECK(select_views(s, cfg) == ViewSelection{{4, 4}, {4, 3}});
  s.left = {295, 240};
  s.right = {345, 240};
  CHECK(select_views(s, cfg) == ViewSelection{{4, 5}, {4, 3}});

  // Eyes close together relative to alpha may share a view.
  s.left = {352.5, 240};
  s.right = {287.5, 240};
  CHECK(select_views(s, GridConfig::centered(9, 9, 200)) == ViewSelection{{4, 4}, {4, 4}});
}

TEST_CASE("property: mapping equals brute force over every frame pixel") {
  for (double alpha : {20.0, 40.0, 120.0}) {
    for (int flags = 0; flags < 4; ++flags) {
      GridConfig cfg = GridConfig::centered(9, 9, alpha);
      cfg.mirror_x = flags & 1;
      cfg.invert_y = flags & 2;
      CAPTURE(alpha);
      CAPTURE(flags);
      int mismatches = 0;
      for (int y = 0; y < cfg.frame_h; ++y) {
        for (int x = 0; x < cfg.frame_w; ++x) {
          const PixelPos p{x + 0.0, y + 0.0};
          if (!(map_eye_to_view(p, cfg) == test::brute_force_nearest(p, cfg))) ++mismatches;
        }
      }
      CHECK(mismatches == 0);
    }
  }
}

TEST_CASE("property: random real positions and grid shapes match brute force") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> dim(1, 12);
  std::uniform_real_distribution<double> a(1.0, 150.0);
  for (int trial = 0; trial < 200; ++trial) {
    GridConfig cfg = GridConfig::centered(dim(rng), dim(rng), a(rng));
    cfg.center = {std::uniform_real_distribution<double>(0, 640)(rng),
                  std::uniform_real_distribution<double>(0, 480)(rng)};
    cfg.mirror_x = rng() & 1;
    cfg.invert_y = rng() & 1;
    std::uniform_real_distribution<double> ux(0, 640), uy(0, 480);
    for (int i = 0; i < 500; ++i) {
      const PixelPos p{ux(rng), uy(rng)};
      REQUIRE(map_eye_to_view(p, cfg) == test::brute_force_nearest(p, cfg));
    }
  }
}

TEST_CASE("property: result is always inside the grid") {
  const GridConfig cfg;
  const double inf = std::numeric_limits<double>::infinity();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (PixelPos p : {PixelPos{-1e9, -1e9}, PixelPos{1e9, 1e9}, PixelPos{-inf, inf},
                     PixelPos{nan, nan}, PixelPos{640, 480}, PixelPos{-0.0, 1e300}}) {
    const ViewIndex v = map_eye_to_view(p, cfg);
    CHECK(v.row >= 0);
    CHECK(v.row < cfg.rows);
    CHECK(v.col >= 0);
    CHECK(v.col < cfg.cols);
  }
}

TEST_CASE("property: column changes only at midpoints between grid points") {
  // Non-mirrored so column increases with x; walk x in quarter-pixel steps.
  for (double alpha : {20.0, 40.0, 60.0}) {
    const GridConfig cfg = plain(alpha);
    int prev = map_eye_to_view({0, 240}, cfg).col;
    for (int i = 1; i < 640 * 4; ++i) {
      const double x = i / 4.0;
      const int col = map_eye_to_view({x, 240}, cfg).col;
      if (col != prev) {
        CHECK(col == prev + 1);
        const double boundary = cfg.center.x + (prev + 0.5 - 4.0) * alpha;
        // The change happens at the first sample strictly past the boundary.
        CHECK(x > boundary);
        CHECK(x - 0.25 <= boundary);
      }
      prev = col;
    }
  }
}

TEST_CASE("property: integer grid-step shifts move the view by whole steps") {
  const GridConfig cfg = plain(40);
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> ux(170, 470), uy(90, 390);
  for (int i = 0; i < 2000; ++i) {
    const PixelPos p{ux(rng), uy(rng)};
    const ViewIndex v = map_eye_to_view(p, cfg);
    const ViewIndex shifted = map_eye_to_view({p.x + 40, p.y - 40}, cfg);
    if (v.col < 8 && v.row > 0) {
      CHECK(shifted.col == v.col + 1);
      CHECK(shifted.row == v.row - 1);
    }
  }
}

TEST_CASE("property: stereo baseline spans floor or ceil of d/alpha columns") {
  std::mt19937 rng(12);
  for (double alpha : {20.0, 40.0}) {
    const GridConfig cfg = GridConfig::centered(9, 9, alpha);
    for (double d : {30.0, 65.0, 130.0}) {
      const double half = (cfg.cols - 1) / 2.0 * alpha;
      std::uniform_real_distribution<double> mid(cfg.center.x - half + d / 2 + 1,
                                                 cfg.center.x + half - d / 2 - 1);
      for (int i = 0; i < 500; ++i) {
        const double m = mid(rng);
        EyeSample s;
        s.left = {m + d / 2, 240};
        s.right = {m - d / 2, 240};
        const ViewSelection sel = select_views(s, cfg);
        const int gap = std::abs(sel.left.col - sel.right.col);
        CHECK((gap == static_cast<int>(std::floor(d / alpha)) ||
               gap == static_cast<int>(std::ceil(d / alpha))));
      }
    }
  }
}

TEST_CASE("clamp_to_frame keeps positions inside the half-open frame") {
  EyeSample s;
  s.left = {-5, 480};
  s.right = {640, -0.0};
  const EyeSample c = clamp_to_frame(s);
  CHECK(c.left.x == 0.0);
  CHECK(c.left.y < 480.0);
  CHECK(c.left.y > 479.0);
  CHECK(c.right.x < 640.0);
  CHECK(c.right.y == 0.0);
  CHECK(!std::signbit(c.right.y));
}
