#include <atomic>

#include "internal.hpp"

namespace forestflight::kernels {
namespace {

// -1: automatic, otherwise an Isa value.
std::atomic<int> g_forced{-1};

}  // namespace

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  static const bool has = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") != 0;
  }();
  return has;
#else
  return false;
#endif
}

const Table& scalar_table() { return detail::scalar_impl(); }

const Table* avx2_table() {
#if defined(FORESTFLIGHT_BUILD_AVX2)
  if (cpu_has_avx2()) return &detail::avx2_impl();
#endif
  return nullptr;
}

const Table& active() {
  const int forced = g_forced.load(std::memory_order_relaxed);
  if (forced == static_cast<int>(Isa::scalar)) return scalar_table();
  if (const Table* t = avx2_table()) return *t;
  return scalar_table();
}

void force_isa(Isa isa) { g_forced.store(static_cast<int>(isa), std::memory_order_relaxed); }
void clear_forced_isa() { g_forced.store(-1, std::memory_order_relaxed); }

}  // namespace forestflight::kernels
