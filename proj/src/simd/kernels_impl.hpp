#pragma once

#include "nomf/simd/kernels.hpp"

namespace nomf::simd {

// Defined in kernels_avx2.cpp when built for x86-64; the table is only valid
// to call after a CPUID check.
const Kernels& compiled_avx2_kernels();

} // namespace nomf::simd
