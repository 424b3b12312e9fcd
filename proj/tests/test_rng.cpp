#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "forestflight/rng.hpp"

using namespace forestflight::rng;

TEST_SUITE("rng") {

// Known-answer vectors of the reference Philox4x32-10 implementation.
TEST_CASE("philox known answers") {
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == Counter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        Counter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        Counter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are addressed, not sequenced") {
  Stream a(7, "trial", 3);
  Stream b(7, "trial", 3);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  Stream c(7, "trial", 4);
  Stream d(7, "other", 3);
  Stream e(8, "trial", 3);
  Stream ref(7, "trial", 3);
  const auto x = ref.next_u64();
  CHECK(c.next_u64() != x);
  CHECK(d.next_u64() != x);
  CHECK(e.next_u64() != x);
}

TEST_CASE("uniform range and moments") {
  Stream s(1, "u", 0);
  double sum = 0.0;
  double sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    sq += u * u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(sq / n - (sum / n) * (sum / n) == doctest::Approx(1.0 / 12.0).epsilon(0.02));
}

TEST_CASE("poisson mean and variance on both branches") {
  for (double mean : {0.0, 0.7, 12.0, 29.5, 30.5, 250.0, 50000.0}) {
    Stream s(2, "poisson", static_cast<std::uint64_t>(mean * 10));
    const int n = 20000;
    double sum = 0.0;
    double sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const auto k = static_cast<double>(s.poisson(mean));
      sum += k;
      sq += k * k;
    }
    const double m = sum / n;
    const double v = sq / n - m * m;
    if (mean == 0.0) {
      CHECK(m == 0.0);
      continue;
    }
    // Five standard errors of the sample mean.
    CHECK(std::abs(m - mean) < 5.0 * std::sqrt(mean / n));
    CHECK(v == doctest::Approx(mean).epsilon(0.05));
  }
}

TEST_CASE("label hash is FNV-1a") {
  CHECK(label_hash("") == 0x811c9dc5u);
  CHECK(label_hash("a") == 0xe40c292cu);
}

}
