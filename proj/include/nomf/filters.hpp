#pragma once

// Reference denoising algorithms: overlapping binary median, the non-overlap
// median filter (NOMF) and the nearest-neighbour event filter.

#include <cstdint>
#include <span>
#include <vector>

#include "nomf/event_io.hpp"
#include "nomf/framer.hpp"
#include "nomf/simd/kernels.hpp"

namespace nomf {

enum class KernelMode { overlap, non_overlap };

struct KernelConfig {
    std::uint32_t n = 3;
    KernelMode mode = KernelMode::non_overlap;

    /// n must be 3 or 5.
    void validate() const;
};

struct NnFiltConfig {
    std::uint64_t tau_us = kDefaultWindowUs; ///< correlation window
    std::uint32_t timestamp_bits = 16;       ///< storage width, used for cost accounting only
};

/// Majority threshold for a window of `pixels` binary values: ceil(pixels / 2).
constexpr std::uint32_t majority_threshold(std::uint32_t pixels) { return (pixels + 1) / 2; }

/// Stride-1 binary median. Pixels outside the image count as 0.
/// n must be odd and at most 15.
EbbiFrame median_overlap(const EbbiFrame& frame, std::uint32_t n,
                         const simd::Kernels& k = simd::active());

/// Ones-count of every n x n tile anchored at (0,0). Right and bottom tiles are
/// partial when the image size is not a multiple of n.
struct TileCounts {
    std::uint32_t n = 0;
    std::uint32_t tiles_x = 0;
    std::uint32_t tiles_y = 0;
    std::vector<std::uint8_t> ones;   ///< row-major over tiles
    std::vector<std::uint8_t> pixels; ///< pixel count of each tile

    std::size_t index(std::uint32_t tx, std::uint32_t ty) const { return std::size_t{ty} * tiles_x + tx; }
};

TileCounts count_tiles(const EbbiFrame& frame, std::uint32_t n, const simd::Kernels& k = simd::active());

/// Overwrites every pixel of `frame` inside tile (tx, ty) with `bit`.
void fill_tile(EbbiFrame& frame, std::uint32_t n, std::uint32_t tx, std::uint32_t ty, std::uint8_t bit);

/// Non-overlap median: each tile becomes uniformly 1 iff its ones-count reaches
/// ceil(tile pixels / 2). n must be 3 or 5.
EbbiFrame nomf(const EbbiFrame& frame, std::uint32_t n, const simd::Kernels& k = simd::active());

/// Dispatch on KernelConfig::mode.
EbbiFrame apply_median(const EbbiFrame& frame, const KernelConfig& cfg);

/// Passes an event iff one of its 8 neighbours fired at most tau_us earlier.
/// Every event, passed or not, refreshes its own pixel's timestamp.
std::vector<Event> nn_filt(std::span<const Event> events, const NnFiltConfig& cfg, SensorGeometry geometry);

/// Fraction of pixels that differ between two frames of the same geometry.
double flipped_fraction(const EbbiFrame& before, const EbbiFrame& after,
                        const simd::Kernels& k = simd::active());

} // namespace nomf
