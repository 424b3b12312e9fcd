#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "forestflight/forest.hpp"
#include "forestflight/rng.hpp"
#include "forestflight/shadow.hpp"
#include "forestflight/sweep_oracle.hpp"
#include "forestflight/validation.hpp"

using namespace forestflight;
using namespace forestflight::shadow;

namespace {

forest::Forest hand_forest(std::vector<Point> centers, forest::Window w = {20, 20}) {
  forest::Forest f;
  f.window = w;
  f.tree_radius = 1.0;
  f.centers = std::move(centers);
  return f;
}

bool on_line(Point p, Point through, double slope) {
  return std::abs(p.y - through.y - slope * (p.x - through.x)) < 1e-9;
}

}  // namespace

TEST_SUITE("shadow") {

TEST_CASE("left primary shadow geometry") {
  const auto c1 = geometry::cone_params(1.0);
  const auto s = left_primary_shadow({{0, 0}, 1.0}, c1, 0);
  CHECK(s.kind == ShadowKind::left_primary);
  CHECK(s.apex.x == doctest::Approx(-1.41421).epsilon(1e-5));
  CHECK(s.apex.y == doctest::Approx(0.0));
  CHECK(s.top.end.x == doctest::Approx(-0.70711).epsilon(1e-5));
  CHECK(s.top.end.y == doctest::Approx(0.70711).epsilon(1e-5));
  CHECK(s.bottom.end.y == doctest::Approx(-0.70711).epsilon(1e-5));

  const auto c2 = geometry::cone_params(2.0);
  const auto s2 = left_primary_shadow({{0, 0}, 1.0}, c2);
  CHECK(s2.apex.x == doctest::Approx(-std::sqrt(5.0)));
  CHECK(geometry::distance(s2.apex, {0, 0}) == doctest::Approx(1.0 / c2.sin_half));
  // Boundary slopes are +-1/nu.
  for (const auto* seg : {&s2.top, &s2.bottom}) {
    CHECK(seg->end.x > seg->start.x);
    const double slope = (seg->end.y - seg->start.y) / (seg->end.x - seg->start.x);
    CHECK(std::abs(slope - seg->slope_sign * 0.5) < 1e-9);
  }
}

TEST_CASE("primary shadows are translation equivariant") {
  const auto cone = geometry::cone_params(3.0);
  const auto a = left_primary_shadow({{0, 0}, 1.0}, cone);
  const auto b = left_primary_shadow({{5, 3}, 1.0}, cone);
  CHECK(b.apex.x == doctest::Approx(a.apex.x + 5));
  CHECK(b.apex.y == doctest::Approx(a.apex.y + 3));
  rng::Stream s(1, "shadow.translate", 0);
  for (int i = 0; i < 500; ++i) {
    const Point p{s.uniform(-6, 2), s.uniform(-2, 2)};
    CHECK(a.contains(p, cone) == b.contains({p.x + 5, p.y + 3}, cone));
  }
}

TEST_CASE("right primary mirrors the left one") {
  const auto c1 = geometry::cone_params(1.0);
  const auto r = right_primary_shadow({{0, 0}, 1.0}, c1);
  CHECK(r.kind == ShadowKind::right_primary);
  CHECK(r.mirrored);
  CHECK(r.apex.x == doctest::Approx(1.41421).epsilon(1e-5));
  CHECK(geometry::distance(r.apex, {0, 0}) ==
        doctest::Approx(geometry::distance(left_primary_shadow({{0, 0}, 1.0}, c1).apex, {0, 0})));

  rng::Stream s(2, "shadow.mirror", 0);
  for (int t = 0; t < 100; ++t) {
    const auto cone = geometry::cone_params(s.uniform(0.5, 10));
    const Point c{s.uniform(-10, 10), s.uniform(-10, 10)};
    const auto right = right_primary_shadow({c, 1.0}, cone);
    const auto left = left_primary_shadow({{-c.x, c.y}, 1.0}, cone);
    CHECK(right.apex.x == doctest::Approx(-left.apex.x));
    for (int k = 0; k < 20; ++k) {
      const Point p{c.x + s.uniform(-3, 12), c.y + s.uniform(-2, 2)};
      CHECK(right.contains(p, cone) == left.contains({-p.x, p.y}, cone));
    }
  }
}

TEST_CASE("induced shadow apex by hand") {
  // Parents with apexes (0, 2) and (0, 0) at nu = 1: the boundary lines y = 2 + x
  // and y = -x meet at (-1, 1).
  const auto cone = geometry::cone_params(1.0);
  const double r = 1.2;
  const double d = r / cone.sin_half;
  const auto up = left_primary_shadow({{d, 2}, r}, cone, 0);
  const auto low = left_primary_shadow({{d, 0}, r}, cone, 1);
  CHECK(up.apex.x == doctest::Approx(0.0));
  const auto ind = induced_shadow(up, low, cone);
  REQUIRE(ind);
  CHECK(ind->kind == ShadowKind::induced);
  CHECK(ind->apex.x == doctest::Approx(-1.0));
  CHECK(ind->apex.y == doctest::Approx(1.0));
  const auto swapped = induced_shadow(low, up, cone);
  REQUIRE(swapped);
  CHECK(swapped->apex.x == doctest::Approx(ind->apex.x));
  CHECK(swapped->apex.y == doctest::Approx(ind->apex.y));
  CHECK(swapped->key == ind->key);
}

TEST_CASE("separated parents induce nothing") {
  const auto cone = geometry::cone_params(1.0);
  const auto a = left_primary_shadow({{0, 0}, 1.0}, cone, 0);
  const auto b = left_primary_shadow({{0, 10}, 1.0}, cone, 1);
  CHECK_FALSE(induced_shadow(a, b, cone));
  CHECK(induced_shadows(a, b, cone).empty());
  const auto c = left_primary_shadow({{40, 0.5}, 1.0}, cone, 2);
  CHECK_FALSE(induced_shadow(a, c, cone));
}

TEST_CASE("build: single tree and a crossing pair") {
  const auto one = build_shadow_set(hand_forest({{10, 5}}), 1.0);
  CHECK(one.shadows().size() == 1);
  CHECK(one.components().size() == 1);

  const auto f = hand_forest({{10, 0}, {10, 1}});
  const auto two = build_shadow_set(f, 1.0);
  CHECK(two.shadows().size() == 3);
  CHECK(two.components().size() == 1);
  const auto& ind = two.shadows()[2];
  REQUIRE(ind.kind == ShadowKind::induced);
  // The oracle's doomed set becomes connected exactly at the induced apex.
  CHECK(oracle::oracle_is_doomed({ind.apex.x + 0.01, ind.apex.y}, f, 1.0, 1e-3));
  CHECK_FALSE(oracle::oracle_is_doomed({ind.apex.x - 0.01, ind.apex.y}, f, 1.0, 1e-3));
}

TEST_CASE("build: cascade through an induced shadow") {
  const auto f = hand_forest({{10, 0}, {10, 1.6}, {10, 3.2}});
  const auto s = build_shadow_set(f, 1.0);
  CHECK(s.shadows().size() >= 5);
  CHECK(s.components().size() == 1);
  // The deepest apex comes from pairing an induced shadow with a primary.
  const Shadow* deepest = &s.shadows().front();
  for (const auto& sh : s.shadows()) {
    if (sh.apex.x < deepest->apex.x) deepest = &sh;
  }
  REQUIRE(deepest->kind == ShadowKind::induced);
  CHECK(deepest->apex.x == doctest::Approx(10.0 - std::sqrt(2.0) - 1.6));
  CHECK(oracle::oracle_is_doomed({deepest->apex.x + 0.01, deepest->apex.y}, f, 1.0, 1e-3));
  CHECK_FALSE(oracle::oracle_is_doomed({deepest->apex.x - 0.01, deepest->apex.y}, f, 1.0, 1e-3));
}

TEST_CASE("components and widths") {
  const auto far = build_shadow_set(hand_forest({{10, 2}, {10, 15}}), 1.0);
  REQUIRE(far.components().size() == 2);
  for (const auto& c : far.components()) CHECK(c.lateral_extent() == doctest::Approx(2.0));

  const auto empty = build_shadow_set(hand_forest({}), 1.0);
  CHECK(empty.components().empty());
  CHECK(max_normalized_width(empty, 20.0) == 0.0);
  CHECK(crossing_exists(hand_forest({}), 1.0));

  const auto single = hand_forest({{100, 250}}, {500, 500});
  for (double nu : {1.0, 3.0, 30.0}) {
    CHECK(max_normalized_width(build_shadow_set(single, nu), 500.0) == doctest::Approx(0.004));
  }

  std::vector<Point> wall;
  for (double y = 0.0; y <= 20.0; y += 1.5) wall.push_back({10, y});
  const auto blocked = hand_forest(wall);
  CHECK(max_normalized_width(build_shadow_set(blocked, 2.0), 20.0) >= 1.0);
  CHECK_FALSE(crossing_exists(blocked, 2.0));
}

TEST_CASE("doomed points") {
  const auto f = hand_forest({{10, 5}});
  const auto s = build_shadow_set(f, 1.0);
  CHECK(s.is_doomed({10, 5}));
  CHECK(s.is_doomed({10.5, 5.5}));
  CHECK(s.is_doomed(s.shadows()[0].apex));
  CHECK_FALSE(s.is_doomed({s.shadows()[0].apex.x - 1e-6, 5}));
  CHECK_FALSE(s.is_doomed({12, 5}));
  CHECK_FALSE(s.is_doomed({9, 7}));
}

TEST_CASE("structural invariants on random forests") {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const auto f = validation::fixed_count_forest(30, {40, 40}, 1.0, seed);
    for (double nu : {1.0, 2.0, 5.0}) {
      const auto cone = geometry::cone_params(nu);
      const auto s = build_shadow_set(f, nu);
      std::set<std::array<std::size_t, 4>> keys;
      for (std::size_t i = 0; i < s.shadows().size(); ++i) {
        const auto& sh = s.shadows()[i];
        CHECK(keys.insert(sh.key).second);
        if (sh.kind != ShadowKind::induced) continue;
        REQUIRE(sh.parents);
        const auto& [u, l] = *sh.parents;
        REQUIRE(u < s.shadows().size());
        REQUIRE(l < s.shadows().size());
        CHECK(s.component_of(u) == s.component_of(i));
        CHECK(s.component_of(l) == s.component_of(i));
        // The apex lies on the upper parent's top line and the lower parent's
        // bottom line.
        CHECK(on_line(sh.apex, s.shadows()[u].apex, cone.slope()));
        CHECK(on_line(sh.apex, s.shadows()[l].apex, -cone.slope()));
        // Left of the later parent apex; right of the earlier one only when
        // the pocket's apex already sits inside that parent.
        const auto& pu = s.shadows()[u];
        const auto& pl = s.shadows()[l];
        CHECK(sh.apex.x < std::max(pu.apex.x, pl.apex.x));
        if (sh.apex.x >= pu.apex.x) CHECK(pu.contains(sh.apex, cone));
        if (sh.apex.x >= pl.apex.x) CHECK(pl.contains(sh.apex, cone));
      }
      for (const auto& c : s.components()) {
        for (std::size_t m : c.members) {
          const auto& sh = s.shadows()[m];
          if (!sh.tree) continue;
          const Point t = f.centers[*sh.tree];
          CHECK(c.y_min <= t.y - 1.0 + 1e-9);
          CHECK(c.y_max >= t.y + 1.0 - 1e-9);
        }
      }
      CHECK(s.stats().extent_escapes == 0);
    }
  }
}

TEST_CASE("component-only build keeps the partition") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto f = validation::fixed_count_forest(60, {40, 40}, 1.0, 100 + seed);
    const auto all = build_shadow_set(f, 3.0);
    const auto comp = build_shadow_set(f, 3.0, -std::numeric_limits<double>::infinity(), Regions::components);
    CHECK(comp.shadows().size() <= all.shadows().size());
    REQUIRE(comp.components().size() == all.components().size());
    std::vector<double> a, b;
    for (const auto& c : all.components()) a.push_back(c.lateral_extent());
    for (const auto& c : comp.components()) b.push_back(c.lateral_extent());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]));
  }
}

TEST_CASE("doomed sets grow with speed") {
  rng::Stream s(3, "shadow.monotone", 0);
  std::vector<Point> grid;
  for (int i = 0; i < 40; ++i) {
    for (int j = 0; j < 40; ++j) grid.push_back({i + 0.5, j + 0.5});
  }
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto f = validation::fixed_count_forest(20, {40, 40}, 1.0, 500 + seed);
    std::vector<std::uint8_t> prev(grid.size(), 0);
    double prev_width = 0.0;
    for (double nu : {0.5, 1.0, 2.0, 5.0, 10.0}) {
      const auto set = build_shadow_set(f, nu);
      const auto doomed = set.classify(grid);
      for (std::size_t i = 0; i < grid.size(); ++i) CHECK(doomed[i] >= prev[i]);
      const double w = max_normalized_width(set, 40.0);
      CHECK(w >= prev_width - 1e-12);
      prev = doomed;
      prev_width = w;
    }
  }
}

TEST_CASE("scaling radius and coordinates together keeps the verdict") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto f = forest::sample_poisson_forest(0.05, {30, 60}, 1.0, seed);
    auto g = forest::scale_forest(f, 2.0, 2.0);
    g.tree_radius = 2.0;
    for (double nu : {2.0, 8.0}) CHECK(crossing_exists(f, nu) == crossing_exists(g, nu));
  }
}

TEST_CASE("lateral range, polygons and intersections") {
  const auto cone = geometry::cone_params(2.0);
  const auto a = left_primary_shadow({{0, 0}, 1.0}, cone, 0);
  const auto [lo, hi] = lateral_range(a, cone, -1e9);
  CHECK(lo == doctest::Approx(-1.0));
  CHECK(hi == doctest::Approx(1.0));
  const auto clipped = lateral_range(a, cone, 5.0);
  CHECK(clipped.first > clipped.second);

  const auto b = left_primary_shadow({{0.5, 1.5}, 1.0}, cone, 1);
  const auto c = left_primary_shadow({{0, 10}, 1.0}, cone, 2);
  CHECK(regions_intersect(a, b, cone));
  CHECK(regions_intersect(b, a, cone));
  CHECK_FALSE(regions_intersect(a, c, cone));

  const auto poly = region_polygon(a, cone, -1e9, 16);
  REQUIRE(poly.size() > 4);
  for (const Point& p : poly) {
    CHECK(p.x >= a.apex.x - 1e-9);
    CHECK(p.x <= 1.0 + 1e-9);
    CHECK(std::abs(p.y) <= 1.0 + 1e-9);
  }
}

}
