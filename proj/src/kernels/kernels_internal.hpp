#pragma once

#include "ixai/kernels.hpp"

namespace ixai::kernels::detail {

const KernelTable& scalar_table();
#if defined(IXAI_HAVE_AVX2_TU)
const KernelTable& avx2_table();
#endif

}  // namespace ixai::kernels::detail
