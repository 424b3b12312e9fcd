#include <string>

#include "doctest.h"
#include "forestflight/error.hpp"
#include "forestflight/render.hpp"

using namespace forestflight;

namespace {

std::string group(const std::string& svg, const std::string& cls) {
  const auto open = svg.find("<g class=\"" + cls + "\"");
  REQUIRE(open != std::string::npos);
  const auto close = svg.find("</g>", open);
  return svg.substr(open, close - open);
}

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

}  // namespace

TEST_SUITE("render") {

TEST_CASE("empty forest has empty groups") {
  forest::Forest f;
  f.window = {10, 20};
  const auto svg = render::shadow_svg(f, shadow::build_shadow_set(f, 2.0));
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(count(group(svg, "shadows"), "<polygon") == 0);
  CHECK(count(group(svg, "trees"), "<polygon") == 0);
}

TEST_CASE("single tree shadow apex") {
  forest::Forest f;
  f.window = {10, 10};
  f.centers = {{5, 5}};
  const auto set = shadow::build_shadow_set(f, 1.0);
  const auto svg = render::shadow_svg(f, set);
  const auto shadows = group(svg, "shadows");
  CHECK(count(shadows, "<polygon") == 1);
  // r / sin(alpha/2) = sqrt(2) at nu = 1.
  CHECK(shadows.find("3.5858,5") != std::string::npos);
  CHECK(count(group(svg, "trees"), "<polygon") == 1);
  CHECK(render::shadow_svg(f, set) == svg);
}

TEST_CASE("phase plot") {
  experiment::PhaseTable t;
  t.densities = {0.01};
  t.speeds = {20};
  experiment::PhasePoint p;
  p.density = 0.01;
  p.speed = 20;
  p.mean = 0.4;
  t.points = {p};
  const auto svg = render::phase_svg(t, {});
  CHECK(count(svg, "class=\"contour\"") == render::kContourLevels);
  CHECK(render::kContourLevels == 9);
  CHECK(render::phase_svg(t, {}) == svg);

  experiment::PhaseTable grid;
  grid.densities = {0.003, 0.01, 0.017};
  grid.speeds = {10, 30, 100};
  for (double rho : grid.densities) {
    for (double nu : grid.speeds) {
      experiment::PhasePoint q;
      q.density = rho;
      q.speed = nu;
      q.mean = std::min(1.0, rho * nu / 0.5);
      grid.points.push_back(q);
    }
  }
  const auto rows = bounds::phase_boundary_table(0.003, 0.017, 1.0, bounds::BoundConfig{}, 8);
  const auto big = render::phase_svg(grid, rows);
  CHECK(big.find("class=\"bounds\"") != std::string::npos);
  CHECK(count(group(big, "heatmap"), "<rect") == 64 * 64);

  experiment::PhaseTable empty;
  CHECK_THROWS_AS(render::phase_svg(empty, {}), ValidationError);
}

}
