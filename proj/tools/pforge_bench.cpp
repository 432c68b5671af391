// Stage timing benchmark for the render path (smooth, map, compose) on a
// generated light field. Prints mean / p99 per stage and the equivalent
// frame rate, the same columns the viewer's metrics report carries.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <random>

#include <CLI11.hpp>
#include <json.hpp>

#include "pforge/anaglyph.hpp"
#include "pforge/gaze_mapping.hpp"
#include "pforge/lightfield_store.hpp"
#include "pforge/metrics.hpp"
#include "pforge/tracker_protocol.hpp"

namespace {

using Clock = std::chrono::steady_clock;

pforge::LightFieldGrid make_grid(int rows, int cols, int w, int h, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::vector<pforge::ViewImage> views;
  for (int i = 0; i < rows * cols; ++i) {
    pforge::ViewImage v(w, h);
    for (auto& b : v.pixels()) b = static_cast<std::uint8_t>(rng());
    views.push_back(std::move(v));
  }
  return pforge::LightFieldGrid(rows, cols, std::move(views), "bench");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Render-path stage benchmark"};
  int rows = 9, cols = 9, width = 512, height = 512, iterations = 1000, k = 5;
  double alpha = 40.0;
  bool json_out = false;
  app.add_option("--rows", rows)->check(CLI::PositiveNumber);
  app.add_option("--cols", cols)->check(CLI::PositiveNumber);
  app.add_option("--width", width, "View width")->check(CLI::PositiveNumber);
  app.add_option("--height", height, "View height")->check(CLI::PositiveNumber);
  app.add_option("--iterations", iterations)->check(CLI::PositiveNumber);
  app.add_option("--alpha", alpha)->check(CLI::PositiveNumber);
  app.add_option("--smooth-k", k)->check(CLI::PositiveNumber);
  app.add_flag("--json", json_out, "Print JSON instead of a table");
  CLI11_PARSE(app, argc, argv);

  const auto grid = make_grid(rows, cols, width, height, 7);
  const auto cfg = pforge::GridConfig::centered(rows, cols, alpha);
  pforge::TrajectorySpec traj;
  traj.kind = pforge::TrajectoryKind::Circle;
  traj.amplitude = alpha * cols / 2.0;
  traj.period_s = 2.0;

  pforge::SmoothingFilter filter(k);
  pforge::AnaglyphFrame frame(width, height);
  const auto n = static_cast<std::size_t>(iterations);
  pforge::RollingSeries smooth_us(n), map_us(n), compose_us(n), combined_us(n);

  for (int i = 0; i < iterations; ++i) {
    const auto sample = pforge::synth_sample(traj, i);
    const auto t0 = Clock::now();
    const auto smoothed = filter.smooth(sample);
    const auto t1 = Clock::now();
    const auto sel = pforge::select_views(smoothed, cfg);
    const auto t2 = Clock::now();
    pforge::compose_into(grid.view(sel.left.row, sel.left.col),
                         grid.view(sel.right.row, sel.right.col), frame);
    const auto t3 = Clock::now();
    auto us = [](Clock::duration d) { return std::chrono::duration<double, std::micro>(d).count(); };
    smooth_us.push(us(t1 - t0));
    map_us.push(us(t2 - t1));
    compose_us.push(us(t3 - t2));
    combined_us.push(us(t3 - t1));
  }

  const std::pair<const char*, const pforge::RollingSeries*> rows_out[] = {
      {"smooth", &smooth_us}, {"map", &map_us}, {"compose", &compose_us},
      {"map+compose", &combined_us}};

  if (json_out) {
    nlohmann::json j;
    for (const auto& [name, s] : rows_out) {
      j[name] = {{"mean_us", s->mean()}, {"p99_us", s->percentile(0.99)}};
    }
    std::cout << j.dump(2) << '\n';
    return 0;
  }
  std::printf("%dx%d views of %dx%d, %d iterations\n", rows, cols, width, height, iterations);
  std::printf("%-12s %12s %12s %14s\n", "stage", "mean_us", "p99_us", "equiv_fps");
  for (const auto& [name, s] : rows_out) {
    const double mean = s->mean();
    std::printf("%-12s %12.2f %12.2f %14.0f\n", name, mean, s->percentile(0.99),
                mean > 0 ? 1e6 / mean : 0.0);
  }
  return 0;
}
