#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "nomf/event_io.hpp"
#include "nomf/geometry.hpp"

namespace nomf {

/// Event-based binary image: one byte per pixel holding 0 or 1, row-major.
struct EbbiFrame {
    SensorGeometry geometry;
    std::vector<std::uint8_t> bits;
    std::uint64_t window_start = 0; ///< microseconds
    std::uint64_t window_len = 0;   ///< microseconds

    EbbiFrame() = default;
    explicit EbbiFrame(SensorGeometry g, std::uint64_t start = 0, std::uint64_t len = 0)
        : geometry(g), bits(g.pixel_count(), 0), window_start(start), window_len(len) {}

    std::uint32_t width() const { return geometry.width; }
    std::uint32_t height() const { return geometry.height; }

    std::uint8_t at(std::uint32_t x, std::uint32_t y) const { return bits[std::size_t{y} * geometry.width + x]; }
    void set(std::uint32_t x, std::uint32_t y, std::uint8_t v) { bits[std::size_t{y} * geometry.width + x] = v; }

    std::span<const std::uint8_t> row(std::uint32_t y) const {
        return {bits.data() + std::size_t{y} * geometry.width, geometry.width};
    }
    std::span<std::uint8_t> row(std::uint32_t y) {
        return {bits.data() + std::size_t{y} * geometry.width, geometry.width};
    }

    /// Frame number for windows anchored at multiples of window_len.
    std::uint64_t index() const { return window_len ? window_start / window_len : 0; }

    /// Number of 1 pixels.
    std::size_t popcount() const;

    /// True when geometry and bits agree (window metadata is ignored).
    bool same_pixels(const EbbiFrame& other) const { return geometry == other.geometry && bits == other.bits; }

    bool operator==(const EbbiFrame&) const = default;
};

struct FrameStats {
    std::uint64_t event_count = 0;
    std::uint64_t active_pixel_count = 0;
    double gamma_estimate = 0.0; ///< event_count / (W*H)
};

struct FramedWindow {
    EbbiFrame frame;
    FrameStats stats;
};

/// Default frame window; about 15 frames per second.
inline constexpr std::uint64_t kDefaultWindowUs = 66'000;

struct AccumulateOptions {
    /// First window start; defaults to the window containing the first event.
    /// Windows are always anchored at multiples of window_len.
    std::optional<std::uint64_t> start_us;
    /// Emit (possibly empty) frames until this time is covered.
    std::optional<std::uint64_t> end_us;
};

/// OR-accumulates a time-sorted event stream into contiguous binary frames of
/// `window_len` microseconds. Empty windows yield all-zero frames.
/// Throws InvalidArgument on unsorted input, window_len == 0 or events outside `geometry`.
std::vector<FramedWindow> accumulate(std::span<const Event> events, SensorGeometry geometry,
                                     std::uint64_t window_len = kDefaultWindowUs,
                                     const AccumulateOptions& opts = {});

} // namespace nomf
