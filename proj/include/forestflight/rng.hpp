#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace forestflight::rng {

// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as
// easy as 1, 2, 3"). Pure: the same (counter, key) always yields the same
// block.
using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;
Counter philox4x32(Counter counter, Key key) noexcept;

// 32-bit FNV-1a, used to turn a stream label into counter bits.
std::uint32_t label_hash(std::string_view label) noexcept;

// A reproducible random stream addressed by (master seed, purpose label,
// index). Two streams with different addresses never share counter space,
// so trials can be generated in any order or on any thread and still
// produce identical values.
class Stream {
 public:
  using result_type = std::uint64_t;

  Stream(std::uint64_t master_seed, std::string_view label, std::uint64_t index) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
  result_type operator()() noexcept { return next_u64(); }

  std::uint64_t next_u64() noexcept;

  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  // Bernoulli(p).
  bool bernoulli(double p) noexcept { return uniform() < p; }

  // Sequential CDF inversion below mean 30, Hormann's PTRS transformed
  // rejection above.
  std::uint64_t poisson(double mean);

 private:
  void refill() noexcept;

  Key key_{};
  Counter base_{};
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
};

}  // namespace forestflight::rng
