#include <cmath>

#include "internal.hpp"

namespace forestflight::kernels::detail {
namespace {

void disk_hits(const double* xs, const double* ys, std::size_t n, double cx, double cy, double r2,
               std::uint8_t* hit) {
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - cx;
    const double dy = ys[i] - cy;
    hit[i] |= static_cast<std::uint8_t>(dx * dx + dy * dy <= r2);
  }
}

void wedge_hits(const double* xs, const double* ys, std::size_t n, double ax, double ay,
                double x_lo, double x_hi, double slope, double tol, std::uint8_t* hit) {
  for (std::size_t i = 0; i < n; ++i) {
    const double x = xs[i];
    const double half = (x - ax) * slope + tol;
    const bool in = x >= x_lo && x <= x_hi && std::fabs(ys[i] - ay) <= half;
    hit[i] |= static_cast<std::uint8_t>(in);
  }
}

void below_mask(const double* u, std::size_t n, double p, std::uint8_t* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<std::uint8_t>(u[i] < p);
}

std::size_t count_within(const double* xs, const double* ys, std::size_t n, double cx, double cy,
                         double r2) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - cx;
    const double dy = ys[i] - cy;
    count += dx * dx + dy * dy < r2;
  }
  return count;
}

}  // namespace

const Table& scalar_impl() {
  static const Table table{Isa::scalar, disk_hits, wedge_hits, below_mask, count_within};
  return table;
}

}  // namespace forestflight::kernels::detail
