#pragma once

// Byte-per-pixel inner loops shared by the filters, the framer and the IMC model.
//
// Every kernel has a portable scalar reference and, on x86-64, an AVX2 variant.
// The variant is selected once at runtime (CPUID) and can be overridden with the
// NOMF_SIMD environment variable ("scalar" or "avx2") or force_backend().
// All variants must produce identical bytes for identical inputs.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace nomf::simd {

struct Kernels {
    const char* name;

    /// out[i] = a[i] + b[i] (wrapping u8; callers keep sums below 256)
    void (*add_u8)(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out, std::size_t n);

    /// out[i] = sum of src[i .. i+width-1]; src must hold n + width - 1 bytes
    void (*window_sum_u8)(const std::uint8_t* src, std::uint8_t* out, std::size_t n, std::size_t width);

    /// out[i] = src[i] >= threshold ? 1 : 0
    void (*threshold_u8)(const std::uint8_t* src, std::uint8_t* out, std::size_t n, std::uint8_t threshold);

    /// number of non-zero bytes
    std::size_t (*count_nonzero_u8)(const std::uint8_t* src, std::size_t n);

    /// number of positions where a and b differ
    std::size_t (*count_diff_u8)(const std::uint8_t* a, const std::uint8_t* b, std::size_t n);
};

const Kernels& scalar_kernels();

/// nullptr when the AVX2 variant was not compiled in or the CPU lacks AVX2.
const Kernels* avx2_kernels();

/// The backend in use for this process.
const Kernels& active();

/// Pin the backend by name; returns false (and leaves the selection unchanged)
/// when the named backend is unavailable.
bool force_backend(std::string_view name);

} // namespace nomf::simd
