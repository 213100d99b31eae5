#include "nomf/simd/kernels.hpp"
#include "kernels_impl.hpp"

namespace nomf::simd {
namespace scalar {

void add_u8(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<std::uint8_t>(a[i] + b[i]);
}

void window_sum_u8(const std::uint8_t* src, std::uint8_t* out, std::size_t n, std::size_t width) {
    if (n == 0) return;
    unsigned acc = 0;
    for (std::size_t k = 0; k < width; ++k) acc += src[k];
    out[0] = static_cast<std::uint8_t>(acc);
    for (std::size_t i = 1; i < n; ++i) {
        acc += src[i + width - 1];
        acc -= src[i - 1];
        out[i] = static_cast<std::uint8_t>(acc);
    }
}

void threshold_u8(const std::uint8_t* src, std::uint8_t* out, std::size_t n, std::uint8_t threshold) {
    for (std::size_t i = 0; i < n; ++i) out[i] = src[i] >= threshold ? 1 : 0;
}

std::size_t count_nonzero_u8(const std::uint8_t* src, std::size_t n) {
    std::size_t c = 0;
    for (std::size_t i = 0; i < n; ++i) c += src[i] != 0;
    return c;
}

std::size_t count_diff_u8(const std::uint8_t* a, const std::uint8_t* b, std::size_t n) {
    std::size_t c = 0;
    for (std::size_t i = 0; i < n; ++i) c += a[i] != b[i];
    return c;
}

} // namespace scalar

const Kernels& scalar_kernels() {
    static const Kernels k{"scalar",
                           scalar::add_u8,
                           scalar::window_sum_u8,
                           scalar::threshold_u8,
                           scalar::count_nonzero_u8,
                           scalar::count_diff_u8};
    return k;
}

} // namespace nomf::simd
