#include <cmath>
#include <vector>

#include "doctest.h"
#include "forestflight/continuum.hpp"
#include "forestflight/error.hpp"
#include "forestflight/forest.hpp"

using namespace forestflight;
using namespace forestflight::continuum;

namespace {

GilbertSpec disks(double intensity, double side) {
  GilbertSpec s;
  s.shape = Shape::disk;
  s.a = 1.0;
  s.intensity = intensity;
  s.window = {side, side};
  return s;
}

}  // namespace

TEST_SUITE("continuum") {

TEST_CASE("degree convention") {
  GilbertSpec d = disks(0.1, 10);
  CHECK(degree(d) == doctest::Approx(0.1 * std::acos(-1.0) * 4.0));
  CHECK(intensity_for_degree(d, degree(d)) == doctest::Approx(0.1));
  GilbertSpec sq = d;
  sq.shape = Shape::square;
  CHECK(degree(sq) == doctest::Approx(0.4));
  CHECK(half_extent(sq).x == doctest::Approx(0.5));
  CHECK(parse_shape("square") == Shape::square);
  CHECK(std::string(shape_name(Shape::disk)) == "disk");
  CHECK_THROWS_AS(parse_shape("hexagon"), ValidationError);
}

TEST_CASE("empty intensity") {
  const auto s = disks(0.0, 10);
  const auto occ = occupied_components(s, 1);
  CHECK(occ.components.empty());
  CHECK(vacant_crossing(s, occ));
}

TEST_CASE("overlap and components by hand") {
  const auto s = disks(0.0, 10);
  CHECK(shapes_overlap(s, {0, 0}, {1.9, 0}));
  CHECK_FALSE(shapes_overlap(s, {0, 0}, {2.1, 0}));
  const auto two = occupied_components(s, std::vector<Point>{{3, 3}, {4.9, 3}});
  CHECK(two.components.size() == 1);
  const auto apart = occupied_components(s, std::vector<Point>{{3, 3}, {6, 3}});
  CHECK(apart.components.size() == 2);

  GilbertSpec sq;
  sq.shape = Shape::square;
  sq.a = 1.0;
  sq.window = {10, 10};
  std::vector<Point> column;
  for (int k = 0; k <= 10; ++k) column.push_back({5, 0.5 + 0.95 * k});
  const auto occ = occupied_components(sq, column);
  REQUIRE(occ.components.size() == 1);
  CHECK(spans_height(sq, occ.components[0]));
  CHECK_FALSE(vacant_crossing(sq, occ));
  column.erase(column.begin() + 5);
  CHECK(vacant_crossing(sq, occupied_components(sq, column)));
}

TEST_CASE("union-find matches pairwise closure") {
  const auto s = disks(0.3, 12);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto pts = sample_points(s, seed);
    const auto occ = occupied_components(s, pts);
    REQUIRE(occ.component_of.size() == pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t j = i + 1; j < pts.size(); ++j) {
        if (shapes_overlap(s, pts[i], pts[j])) CHECK(occ.component_of[i] == occ.component_of[j]);
      }
    }
    // Every component is connected: its members are reachable through
    // overlaps.
    for (const auto& c : occ.components) {
      std::vector<char> seen(pts.size(), 0);
      std::vector<std::size_t> stack{c.members.front()};
      seen[c.members.front()] = 1;
      std::size_t reached = 0;
      while (!stack.empty()) {
        const std::size_t v = stack.back();
        stack.pop_back();
        ++reached;
        for (std::size_t w : c.members) {
          if (!seen[w] && shapes_overlap(s, pts[v], pts[w])) {
            seen[w] = 1;
            stack.push_back(w);
          }
        }
      }
      CHECK(reached == c.members.size());
    }
  }
}

TEST_CASE("mean neighbour count equals the degree") {
  const auto s = disks(0.2, 60);
  double neighbours = 0.0;
  double interior = 0.0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto pts = sample_points(s, seed);
    for (const Point& p : pts) {
      if (p.x < 3 || p.x > 57 || p.y < 3 || p.y > 57) continue;
      interior += 1.0;
      for (const Point& q : pts) {
        if (&p != &q && shapes_overlap(s, p, q)) neighbours += 1.0;
      }
    }
  }
  CHECK(neighbours / interior == doctest::Approx(degree(s)).epsilon(0.03));
}

TEST_CASE("deep supercritical disks block") {
  GilbertSpec s;
  s.shape = Shape::disk;
  s.a = 0.5;
  s.window = {40, 40};
  s.intensity = intensity_for_degree(s, 6.0);
  int crossings = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) crossings += vacant_crossing(s, seed);
  CHECK(crossings < 10);
}

TEST_CASE("critical degree on a small window") {
  DegreeOptions opt;
  opt.trials = 300;
  const auto d = estimate_critical_degree(Shape::disk, 16, opt);
  CHECK(d.converged);
  CHECK(std::abs(d.estimate - 4.512) < 0.4);
  const auto q = estimate_critical_degree(Shape::square, 16, opt);
  CHECK(std::abs(q.estimate - 4.395) < 0.4);
  CHECK(to_json(q).find("\"estimate\"") != std::string::npos);
  CHECK_THROWS_AS(estimate_critical_degree(Shape::rectangle, 16, opt), ValidationError);
}

TEST_CASE("critical trial is a threshold") {
  for (std::uint64_t t = 0; t < 20; ++t) {
    const double below = critical_degree_trial(Shape::disk, 10, 9.0, 3, t);
    CHECK(below > 0.0);
    const double again = critical_degree_trial(Shape::disk, 10, 9.0, 3, t);
    CHECK(below == again);
  }
}

TEST_CASE("shadow rectangles") {
  const auto spec = shadow_rectangle_spec(0.01, 1.0, 2.0, {50, 100});
  CHECK(spec.a == doctest::Approx(std::sqrt(5.0)));
  CHECK(spec.b == doctest::Approx(std::sqrt(5.0) / 2));
  CHECK(shadow_rectangle_model(0.0, 1.0, 2.0, {50, 100}, 1));

  // Scaling by (1/a, 1/b) gives unit squares at intensity 2 rho r^2 / sin(alpha).
  const double rho = 0.05;
  const double nu = 3.0;
  const auto cone = geometry::cone_params(nu);
  const forest::Window w{30, 60};
  const auto rect = shadow_rectangle_spec(rho, 1.0, nu, w);
  CHECK(rho * rect.a * rect.b == doctest::Approx(2.0 * rho / cone.sin_alpha));
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto f = forest::sample_poisson_forest(rho, w, 1.0, seed);
    GilbertSpec unit;
    unit.shape = Shape::square;
    unit.a = 1.0;
    unit.window = {w.width / rect.b, w.length / rect.a};
    unit.intensity = 2.0 * rho / cone.sin_alpha;
    std::vector<Point> scaled;
    for (const Point& c : f.centers) scaled.push_back({c.x / rect.a, c.y / rect.b});
    CHECK(shadow_rectangle_model(rho, 1.0, nu, w, seed) ==
          vacant_crossing(unit, occupied_components(unit, scaled)));
  }
}

TEST_CASE("blocking grows with density and speed") {
  const forest::Window w{40, 80};
  auto blocked = [&](double rho, double nu) {
    int n = 0;
    for (std::uint64_t s = 0; s < 100; ++s) n += !shadow_rectangle_model(rho, 1.0, nu, w, s);
    return n;
  };
  const int low = blocked(0.02, 10);
  const int mid = blocked(0.05, 10);
  const int high = blocked(0.1, 10);
  CHECK(low <= mid);
  CHECK(mid <= high);
  CHECK(blocked(0.05, 4) <= blocked(0.05, 20));
}

}
