#include <cmath>
#include <filesystem>
#include <vector>

#include "doctest.h"
#include "forestflight/error.hpp"
#include "forestflight/forest.hpp"

using namespace forestflight;
using namespace forestflight::forest;

namespace {

// Pearson statistic of center counts over a 10 x 10 cell partition.
double chi_square_10x10(const std::vector<Forest>& forests) {
  std::vector<double> counts(100, 0.0);
  double total = 0.0;
  for (const Forest& f : forests) {
    for (const Point& c : f.centers) {
      const int i = std::min(9, static_cast<int>(10.0 * c.x / f.window.length));
      const int j = std::min(9, static_cast<int>(10.0 * c.y / f.window.width));
      counts[static_cast<std::size_t>(10 * i + j)] += 1.0;
      total += 1.0;
    }
  }
  const double expected = total / 100.0;
  double chi = 0.0;
  for (double c : counts) chi += (c - expected) * (c - expected) / expected;
  return chi;
}

// 99.9% quantile of chi-square with 99 degrees of freedom.
constexpr double kChi99 = 148.23;

}  // namespace

TEST_SUITE("forest") {

TEST_CASE("empty and expected counts") {
  CHECK(sample_poisson_forest(0.0, {500, 1000}, 1.0, 1).size() == 0);
  // Expected count rho * w * l.
  const Window full{500.0, 10000.0};
  CHECK(0.01 * full.width * full.length == doctest::Approx(50000.0));
  CHECK(50000.0 / (0.003 * 500.0) == doctest::Approx(33333.333).epsilon(1e-6));
}

TEST_CASE("count statistics over seeds") {
  const int seeds = 1000;
  double sum = 0.0;
  for (int s = 0; s < seeds; ++s) sum += static_cast<double>(sample_poisson_forest(0.01, {100, 100}, 1.0, s).size());
  const double mean = sum / seeds;
  CHECK(std::abs(mean - 100.0) < 3.0 * std::sqrt(100.0 / seeds));
}

TEST_CASE("centers are inside the window and uniform") {
  std::vector<Forest> forests;
  for (int s = 0; s < 200; ++s) {
    forests.push_back(sample_poisson_forest(0.01, {50, 200}, 1.0, 1000 + s));
    for (const Point& c : forests.back().centers) {
      REQUIRE(c.x >= 0.0);
      REQUIRE(c.x <= 200.0);
      REQUIRE(c.y >= 0.0);
      REQUIRE(c.y <= 50.0);
    }
  }
  CHECK(chi_square_10x10(forests) < kChi99);
}

TEST_CASE("determinism") {
  const auto a = sample_poisson_forest(0.02, {30, 40}, 1.5, 77);
  const auto b = sample_poisson_forest(0.02, {30, 40}, 1.5, 77);
  const auto c = sample_poisson_forest(0.02, {30, 40}, 1.5, 78);
  CHECK(a.centers == b.centers);
  CHECK(a.centers != c.centers);
}

TEST_CASE("invalid parameters") {
  CHECK_THROWS_AS(sample_poisson_forest(-0.1, {10, 10}, 1.0, 1), ValidationError);
  CHECK_THROWS_AS(sample_poisson_forest(0.1, {0, 10}, 1.0, 1), ValidationError);
  CHECK_THROWS_AS(sample_poisson_forest(0.1, {10, 10}, 0.0, 1), ValidationError);
  CHECK_THROWS_AS(sample_mixed_forest(0.1, 0.2, 1.5, {10, 10}, 1.0, 1), ValidationError);
}

TEST_CASE("mixture branches") {
  for (int s = 0; s < 50; ++s) {
    CHECK(sample_mixed_forest(0.002, 0.05, 1.0, {50, 50}, 1.0, s).branch == MixtureBranch::first);
    CHECK(sample_mixed_forest(0.002, 0.05, 0.0, {50, 50}, 1.0, s).branch == MixtureBranch::second);
  }
  int first = 0;
  for (int s = 0; s < 1000; ++s) {
    const auto f = sample_mixed_forest(0.002, 0.05, 0.5, {50, 50}, 1.0, s);
    if (f.branch == MixtureBranch::first) {
      ++first;
      CHECK(f.density == 0.002);
    } else {
      CHECK(f.density == 0.05);
    }
  }
  CHECK(std::abs(first / 1000.0 - 0.5) < 0.05);
}

TEST_CASE("scaling") {
  const auto f = sample_poisson_forest(0.01, {100, 100}, 1.0, 4);
  const auto same = scale_forest(f, 1.0, 1.0);
  CHECK(same.centers == f.centers);
  CHECK(same.density == f.density);
  const auto g = scale_forest(f, 2.0, 2.0);
  CHECK(g.density == doctest::Approx(0.0025));
  CHECK(g.window.width == 200.0);
  CHECK(g.window.length == 200.0);
  REQUIRE(g.size() == f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(g.centers[i].x == 2.0 * f.centers[i].x);
    CHECK(g.centers[i].y == 2.0 * f.centers[i].y);
  }
  // Cell counts are carried over one to one.
  CHECK(chi_square_10x10({f}) == doctest::Approx(chi_square_10x10({g})));
  CHECK_THROWS_AS(scale_forest(f, 0.0, 1.0), ValidationError);
}

TEST_CASE("csv round trip") {
  const auto f = sample_poisson_forest(0.03, {20, 30}, 0.75, 123);
  const auto g = from_csv(to_csv(f));
  CHECK(g.centers == f.centers);
  CHECK(g.window.width == f.window.width);
  CHECK(g.window.length == f.window.length);
  CHECK(g.tree_radius == f.tree_radius);
  CHECK(g.density == f.density);
  CHECK(g.seed == f.seed);

  Forest empty;
  empty.window = {5, 6};
  const auto e = from_csv(to_csv(empty));
  CHECK(e.size() == 0);
  CHECK(e.window.length == 6);

  const auto dir = std::filesystem::temp_directory_path() / "forestflight_forest_test";
  std::filesystem::create_directories(dir);
  save_forest(f, dir / "f.csv");
  CHECK(load_forest(dir / "f.csv").centers == f.centers);
  CHECK_THROWS_AS(load_forest(dir / "missing.csv"), IoError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("csv rejects malformed files") {
  CHECK_THROWS_AS(from_csv("# forest v1, w=10, l=10, r=-1, rho=0.1, seed=1\n"), ValidationError);
  CHECK_THROWS_AS(from_csv("nonsense\n"), ValidationError);
  CHECK_THROWS_AS(from_csv("# forest v1, w=10, l=10, r=1, rho=0.1, seed=1\n1,2,\n"), ValidationError);
  CHECK_THROWS_AS(from_csv("# forest v1, w=10, l=10, r=1, rho=0.1, seed=1\n11,2\n"), ValidationError);
  CHECK_THROWS_AS(from_csv("# forest v1, w=10, r=1, rho=0.1, seed=1\n"), ValidationError);
}

}
