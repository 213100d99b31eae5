#include <immintrin.h>

#include "kernels_impl.hpp"

namespace nomf::simd {
namespace avx2 {

namespace {

inline __m256i load(const std::uint8_t* p) { return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p)); }
inline void store(std::uint8_t* p, __m256i v) { _mm256_storeu_si256(reinterpret_cast<__m256i*>(p), v); }

} // namespace

void add_u8(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 32 <= n; i += 32) store(out + i, _mm256_add_epi8(load(a + i), load(b + i)));
    for (; i < n; ++i) out[i] = static_cast<std::uint8_t>(a[i] + b[i]);
}

void window_sum_u8(const std::uint8_t* src, std::uint8_t* out, std::size_t n, std::size_t width) {
    std::size_t i = 0;
    for (; i + 32 <= n; i += 32) {
        __m256i acc = load(src + i);
        for (std::size_t k = 1; k < width; ++k) acc = _mm256_add_epi8(acc, load(src + i + k));
        store(out + i, acc);
    }
    for (; i < n; ++i) {
        unsigned acc = 0;
        for (std::size_t k = 0; k < width; ++k) acc += src[i + k];
        out[i] = static_cast<std::uint8_t>(acc);
    }
}

void threshold_u8(const std::uint8_t* src, std::uint8_t* out, std::size_t n, std::uint8_t threshold) {
    const __m256i thr = _mm256_set1_epi8(static_cast<char>(threshold));
    const __m256i one = _mm256_set1_epi8(1);
    std::size_t i = 0;
    for (; i + 32 <= n; i += 32) {
        const __m256i v = load(src + i);
        // v >= thr  <=>  max(v, thr) == v  (unsigned)
        const __m256i ge = _mm256_cmpeq_epi8(_mm256_max_epu8(v, thr), v);
        store(out + i, _mm256_and_si256(ge, one));
    }
    for (; i < n; ++i) out[i] = src[i] >= threshold ? 1 : 0;
}

std::size_t count_nonzero_u8(const std::uint8_t* src, std::size_t n) {
    const __m256i zero = _mm256_setzero_si256();
    std::size_t c = 0, i = 0;
    for (; i + 32 <= n; i += 32) {
        const auto zmask = static_cast<unsigned>(_mm256_movemask_epi8(_mm256_cmpeq_epi8(load(src + i), zero)));
        c += 32 - static_cast<std::size_t>(_mm_popcnt_u32(zmask));
    }
    for (; i < n; ++i) c += src[i] != 0;
    return c;
}

std::size_t count_diff_u8(const std::uint8_t* a, const std::uint8_t* b, std::size_t n) {
    std::size_t c = 0, i = 0;
    for (; i + 32 <= n; i += 32) {
        const auto eq = static_cast<unsigned>(_mm256_movemask_epi8(_mm256_cmpeq_epi8(load(a + i), load(b + i))));
        c += 32 - static_cast<std::size_t>(_mm_popcnt_u32(eq));
    }
    for (; i < n; ++i) c += a[i] != b[i];
    return c;
}

} // namespace avx2

const Kernels& compiled_avx2_kernels() {
    static const Kernels k{"avx2",
                           avx2::add_u8,
                           avx2::window_sum_u8,
                           avx2::threshold_u8,
                           avx2::count_nonzero_u8,
                           avx2::count_diff_u8};
    return k;
}

} // namespace nomf::simd
