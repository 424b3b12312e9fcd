#pragma once

#include <cstddef>
#include <cstdint>

// Data-parallel inner loops. Each kernel has a scalar reference version and,
// on x86-64, an AVX2 version chosen at runtime. Both produce identical
// outputs; tests/test_kernels.cpp checks that.
namespace forestflight::kernels {

enum class Isa { scalar, avx2 };

struct Table {
  Isa isa;
  // hit[i] |= (xs[i]-cx)^2 + (ys[i]-cy)^2 <= r2
  void (*disk_hits)(const double* xs, const double* ys, std::size_t n, double cx, double cy,
                    double r2, std::uint8_t* hit);
  // hit[i] |= x_lo <= xs[i] <= x_hi && |ys[i]-ay| <= (xs[i]-ax)*slope + tol
  void (*wedge_hits)(const double* xs, const double* ys, std::size_t n, double ax, double ay,
                     double x_lo, double x_hi, double slope, double tol, std::uint8_t* hit);
  // out[i] = u[i] < p
  void (*below_mask)(const double* u, std::size_t n, double p, std::uint8_t* out);
  // Number of i with (xs[i]-cx)^2 + (ys[i]-cy)^2 < r2.
  std::size_t (*count_within)(const double* xs, const double* ys, std::size_t n, double cx,
                              double cy, double r2);
};

const Table& scalar_table();
// nullptr when the binary or the CPU lacks AVX2.
const Table* avx2_table();

// Best table for this CPU unless overridden with force_isa.
const Table& active();
void force_isa(Isa isa);
void clear_forced_isa();

bool cpu_has_avx2();

}  // namespace forestflight::kernels
