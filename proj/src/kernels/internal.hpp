#pragma once

#include "forestflight/kernels.hpp"

namespace forestflight::kernels::detail {

const Table& scalar_impl();
#if defined(FORESTFLIGHT_BUILD_AVX2)
const Table& avx2_impl();
#endif

}  // namespace forestflight::kernels::detail
