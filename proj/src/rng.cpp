#include "forestflight/rng.hpp"

#include <cmath>

#include "forestflight/error.hpp"

namespace forestflight::rng {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

double poisson_inversion(Stream& s, double mean) {
  const double u = s.uniform();
  double p = std::exp(-mean);
  double cdf = p;
  std::uint64_t k = 0;
  // The tail beyond k=200 has probability far below 2^-53 for mean < 30.
  while (u > cdf && k < 200) {
    ++k;
    p *= mean / static_cast<double>(k);
    cdf += p;
  }
  return static_cast<double>(k);
}

double poisson_ptrs(Stream& s, double mean) {
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = s.uniform() - 0.5;
    const double v = s.uniform();
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return k;
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -mean + k * loglam - std::lgamma(k + 1.0)) {
      return k;
    }
  }
}

}  // namespace

Counter philox4x32(Counter ctr, Key key) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

std::uint32_t label_hash(std::string_view label) noexcept {
  std::uint32_t h = 2166136261u;
  for (unsigned char c : label) {
    h ^= c;
    h *= 16777619u;
  }
  return h;
}

Stream::Stream(std::uint64_t master_seed, std::string_view label, std::uint64_t index) noexcept
    : key_{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32)} {
  // Counter words 2 and 3 hold the stream address; words 0 and 1 count blocks.
  base_[2] = static_cast<std::uint32_t>(index);
  base_[3] = label_hash(label) ^ (static_cast<std::uint32_t>(index >> 32) * 0x85EBCA6Bu);
}

void Stream::refill() noexcept {
  Counter ctr = base_;
  ctr[0] = static_cast<std::uint32_t>(block_);
  ctr[1] = static_cast<std::uint32_t>(block_ >> 32);
  ++block_;
  buffer_ = philox4x32(ctr, key_);
  used_ = 0;
}

std::uint64_t Stream::next_u64() noexcept {
  if (used_ > 2) refill();
  const std::uint64_t lo = buffer_[used_];
  const std::uint64_t hi = buffer_[used_ + 1];
  used_ += 2;
  return (hi << 32) | lo;
}

double Stream::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t Stream::poisson(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw ValidationError("poisson mean must be finite and non-negative");
  }
  if (mean == 0.0) return 0;
  const double k = mean < 30.0 ? poisson_inversion(*this, mean) : poisson_ptrs(*this, mean);
  return static_cast<std::uint64_t>(k);
}

}  // namespace forestflight::rng
