#include <immintrin.h>

#include <cmath>

#include "internal.hpp"

namespace forestflight::kernels::detail {
namespace {

// Lane results are 64-bit all-ones/all-zeros masks; movemask packs them into
// the low four bits.
inline void store_bits(int bits, std::uint8_t* out, bool accumulate) {
  for (int lane = 0; lane < 4; ++lane) {
    const auto v = static_cast<std::uint8_t>((bits >> lane) & 1);
    out[lane] = accumulate ? static_cast<std::uint8_t>(out[lane] | v) : v;
  }
}

void disk_hits(const double* xs, const double* ys, std::size_t n, double cx, double cy, double r2,
               std::uint8_t* hit) {
  const __m256d vcx = _mm256_set1_pd(cx);
  const __m256d vcy = _mm256_set1_pd(cy);
  const __m256d vr2 = _mm256_set1_pd(r2);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + i), vcx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + i), vcy);
    const __m256d d2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    store_bits(_mm256_movemask_pd(_mm256_cmp_pd(d2, vr2, _CMP_LE_OQ)), hit + i, true);
  }
  for (; i < n; ++i) {
    const double dx = xs[i] - cx;
    const double dy = ys[i] - cy;
    hit[i] |= static_cast<std::uint8_t>(dx * dx + dy * dy <= r2);
  }
}

void wedge_hits(const double* xs, const double* ys, std::size_t n, double ax, double ay,
                double x_lo, double x_hi, double slope, double tol, std::uint8_t* hit) {
  const __m256d vax = _mm256_set1_pd(ax);
  const __m256d vay = _mm256_set1_pd(ay);
  const __m256d vlo = _mm256_set1_pd(x_lo);
  const __m256d vhi = _mm256_set1_pd(x_hi);
  const __m256d vslope = _mm256_set1_pd(slope);
  const __m256d vtol = _mm256_set1_pd(tol);
  const __m256d sign = _mm256_set1_pd(-0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(xs + i);
    const __m256d half = _mm256_add_pd(_mm256_mul_pd(_mm256_sub_pd(x, vax), vslope), vtol);
    const __m256d dy = _mm256_andnot_pd(sign, _mm256_sub_pd(_mm256_loadu_pd(ys + i), vay));
    __m256d in = _mm256_and_pd(_mm256_cmp_pd(x, vlo, _CMP_GE_OQ), _mm256_cmp_pd(x, vhi, _CMP_LE_OQ));
    in = _mm256_and_pd(in, _mm256_cmp_pd(dy, half, _CMP_LE_OQ));
    store_bits(_mm256_movemask_pd(in), hit + i, true);
  }
  for (; i < n; ++i) {
    const double x = xs[i];
    const double half = (x - ax) * slope + tol;
    const bool in = x >= x_lo && x <= x_hi && std::fabs(ys[i] - ay) <= half;
    hit[i] |= static_cast<std::uint8_t>(in);
  }
}

void below_mask(const double* u, std::size_t n, double p, std::uint8_t* out) {
  const __m256d vp = _mm256_set1_pd(p);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    store_bits(_mm256_movemask_pd(_mm256_cmp_pd(_mm256_loadu_pd(u + i), vp, _CMP_LT_OQ)), out + i, false);
  }
  for (; i < n; ++i) out[i] = static_cast<std::uint8_t>(u[i] < p);
}

std::size_t count_within(const double* xs, const double* ys, std::size_t n, double cx, double cy,
                         double r2) {
  const __m256d vcx = _mm256_set1_pd(cx);
  const __m256d vcy = _mm256_set1_pd(cy);
  const __m256d vr2 = _mm256_set1_pd(r2);
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + i), vcx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + i), vcy);
    const __m256d d2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    count += static_cast<std::size_t>(__builtin_popcount(_mm256_movemask_pd(_mm256_cmp_pd(d2, vr2, _CMP_LT_OQ))));
  }
  for (; i < n; ++i) {
    const double dx = xs[i] - cx;
    const double dy = ys[i] - cy;
    count += dx * dx + dy * dy < r2;
  }
  return count;
}

}  // namespace

const Table& avx2_impl() {
  static const Table table{Isa::avx2, disk_hits, wedge_hits, below_mask, count_within};
  return table;
}

}  // namespace forestflight::kernels::detail
