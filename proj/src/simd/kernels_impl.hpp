// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The subgrade authors

#pragma once

#include "subgrade/simd/kernels.hpp"

namespace subgrade::simd {

namespace scalar {
extern const KernelTable table;
}

#if defined(SUBGRADE_HAVE_AVX2)
namespace avx2 {
extern const KernelTable table;
}
#endif

#if defined(SUBGRADE_HAVE_NEON)
namespace neon {
extern const KernelTable table;
}
#endif

} // namespace subgrade::simd
