#pragma once

// Per-ISA entry points. Defined in translation units compiled with the
// matching target flags; only referenced when the CPU supports them.

#include "histoprompt/simd/kernels.hpp"

namespace histoprompt::simd::detail {

#if defined(HISTOPROMPT_HAVE_AVX2)
const KernelTable& avx2_kernels() noexcept;
#endif

#if defined(HISTOPROMPT_HAVE_NEON)
const KernelTable& neon_kernels() noexcept;
#endif

}  // namespace histoprompt::simd::detail
