#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace nomf {

/// SplitMix64: small, fast generator used for per-kernel and per-chunk substreams.
/// Satisfies UniformRandomBitGenerator so it plugs into <random> distributions.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

/// Mixes a base seed with a path of indices into an independent substream seed.
/// Same inputs always give the same seed, whatever thread asks.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = base;
    for (auto v : path) {
        SplitMix64 mix(h ^ (v + 0x632be59bd9b4e019ULL + (h << 6) + (h >> 2)));
        h = mix();
    }
    return h;
}

} // namespace nomf
