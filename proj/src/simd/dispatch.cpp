#include <atomic>
#include <cstdlib>

#include "kernels_impl.hpp"

namespace nomf::simd {

namespace {

bool cpu_has_avx2() {
#if defined(NOMF_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("popcnt");
#else
    return false;
#endif
}

const Kernels* pick_default() {
    const Kernels* best = avx2_kernels();
    if (const char* env = std::getenv("NOMF_SIMD")) {
        if (std::string_view(env) == "scalar") return &scalar_kernels();
    }
    return best ? best : &scalar_kernels();
}

std::atomic<const Kernels*>& selected() {
    static std::atomic<const Kernels*> sel{pick_default()};
    return sel;
}

} // namespace

const Kernels* avx2_kernels() {
#if defined(NOMF_HAVE_AVX2)
    static const bool ok = cpu_has_avx2();
    return ok ? &compiled_avx2_kernels() : nullptr;
#else
    return nullptr;
#endif
}

const Kernels& active() { return *selected().load(std::memory_order_relaxed); }

bool force_backend(std::string_view name) {
    const Kernels* k = nullptr;
    if (name == "scalar") k = &scalar_kernels();
    else if (name == "avx2") k = avx2_kernels();
    if (!k) return false;
    selected().store(k, std::memory_order_relaxed);
    return true;
}

} // namespace nomf::simd
