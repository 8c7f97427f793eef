#pragma once

#include "codim2/simd.hpp"

namespace codim2::simd::detail {

extern const KernelTable kScalarTable;
#ifdef CODIM2_HAVE_AVX2
extern const KernelTable kAvx2Table;
#endif

}  // namespace codim2::simd::detail
