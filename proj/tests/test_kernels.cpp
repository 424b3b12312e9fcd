#include <cstdint>
#include <vector>

#include "doctest.h"
#include "forestflight/forest.hpp"
#include "forestflight/kernels.hpp"
#include "forestflight/rng.hpp"
#include "forestflight/shadow.hpp"

using namespace forestflight;
using namespace forestflight::kernels;

namespace {

struct Data {
  std::vector<double> xs;
  std::vector<double> ys;
};

// Random points with a share placed exactly on the tested boundaries.
Data make_data(std::size_t n, std::uint64_t seed) {
  rng::Stream s(seed, "kernels.data", n);
  Data d;
  for (std::size_t i = 0; i < n; ++i) {
    if (i % 7 == 3) {
      d.xs.push_back(1.0);  // on the circle of radius 1 around (1, 1) and on x_lo
      d.ys.push_back(2.0);
    } else {
      d.xs.push_back(s.uniform(-3, 5));
      d.ys.push_back(s.uniform(-3, 5));
    }
  }
  return d;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("dispatch reports a table") {
  CHECK(scalar_table().isa == Isa::scalar);
  if (avx2_table() != nullptr) CHECK(avx2_table()->isa == Isa::avx2);
  CHECK((avx2_table() != nullptr) == cpu_has_avx2());
  force_isa(Isa::scalar);
  CHECK(active().isa == Isa::scalar);
  clear_forced_isa();
  if (cpu_has_avx2()) CHECK(active().isa == Isa::avx2);
}

TEST_CASE("vector kernels equal the scalar reference") {
  const Table* vec = avx2_table();
  if (vec == nullptr) {
    MESSAGE("no AVX2 on this machine; equivalence not exercised");
    return;
  }
  const Table& ref = scalar_table();
  for (std::size_t n = 0; n < 40; ++n) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const Data d = make_data(n, seed);
      std::vector<std::uint8_t> a(n, 0), b(n, 0);
      ref.disk_hits(d.xs.data(), d.ys.data(), n, 1.0, 1.0, 1.0, a.data());
      vec->disk_hits(d.xs.data(), d.ys.data(), n, 1.0, 1.0, 1.0, b.data());
      CHECK(a == b);

      std::fill(a.begin(), a.end(), 0);
      std::fill(b.begin(), b.end(), 0);
      ref.wedge_hits(d.xs.data(), d.ys.data(), n, -1.0, 0.5, 1.0, 4.0, 0.5, 1e-9, a.data());
      vec->wedge_hits(d.xs.data(), d.ys.data(), n, -1.0, 0.5, 1.0, 4.0, 0.5, 1e-9, b.data());
      CHECK(a == b);

      ref.below_mask(d.xs.data(), n, 1.0, a.data());
      vec->below_mask(d.xs.data(), n, 1.0, b.data());
      CHECK(a == b);

      CHECK(ref.count_within(d.xs.data(), d.ys.data(), n, 1.0, 1.0, 1.0) ==
            vec->count_within(d.xs.data(), d.ys.data(), n, 1.0, 1.0, 1.0));
    }
  }
}

TEST_CASE("hit kernels accumulate") {
  const Table& t = active();
  std::vector<double> xs{0.0, 10.0};
  std::vector<double> ys{0.0, 10.0};
  std::vector<std::uint8_t> hit{0, 1};
  t.disk_hits(xs.data(), ys.data(), 2, 0.0, 0.0, 1.0, hit.data());
  CHECK(hit[0] == 1);
  CHECK(hit[1] == 1);
}

TEST_CASE("disk boundary is inclusive, count is strict") {
  for (const Table* t : {&scalar_table(), avx2_table()}) {
    if (t == nullptr) continue;
    std::vector<double> xs{1.0, 0.0, 2.0, 0.5, 1.0, 1.0, 1.0, 1.0, 9.0};
    std::vector<double> ys{2.0, 1.0, 1.0, 1.0, 0.0, 1.0, 2.5, 1.5, 9.0};
    std::vector<std::uint8_t> hit(xs.size(), 0);
    t->disk_hits(xs.data(), ys.data(), xs.size(), 1.0, 1.0, 1.0, hit.data());
    CHECK(hit == std::vector<std::uint8_t>{1, 1, 1, 1, 1, 1, 0, 1, 0});
    CHECK(t->count_within(xs.data(), ys.data(), xs.size(), 1.0, 1.0, 1.0) == 3);
  }
}

TEST_CASE("batch classification is identical under both tables") {
  if (avx2_table() == nullptr) return;
  const auto f = forest::sample_poisson_forest(0.02, {40, 40}, 1.0, 3);
  const auto set = shadow::build_shadow_set(f, 2.0);
  rng::Stream s(8, "kernels.points", 0);
  std::vector<geometry::Point> pts(5000);
  for (auto& p : pts) p = {s.uniform(-5, 45), s.uniform(-5, 45)};
  force_isa(Isa::scalar);
  const auto a = set.classify(pts);
  clear_forced_isa();
  const auto b = set.classify(pts);
  CHECK(a == b);
  for (std::size_t i = 0; i < pts.size(); i += 50) CHECK(static_cast<bool>(a[i]) == set.is_doomed(pts[i]));
}

}
