#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

namespace nomf {

/// Pixel array dimensions of the sensor (and of the SRAM array that stores its frames).
struct SensorGeometry {
    std::uint32_t width = 320;
    std::uint32_t height = 240;

    std::size_t pixel_count() const { return std::size_t{width} * height; }
    bool contains(std::int64_t x, std::int64_t y) const {
        return x >= 0 && y >= 0 && x < std::int64_t{width} && y < std::int64_t{height};
    }
    bool operator==(const SensorGeometry&) const = default;
};

/// Axis-aligned box with inclusive pixel bounds.
struct BoundingBox {
    std::int32_t x_min = 0;
    std::int32_t y_min = 0;
    std::int32_t x_max = 0;
    std::int32_t y_max = 0;

    std::int64_t width() const { return std::int64_t{x_max} - x_min + 1; }
    std::int64_t height() const { return std::int64_t{y_max} - y_min + 1; }
    std::int64_t area() const { return width() * height(); }
    bool valid() const { return x_min <= x_max && y_min <= y_max; }
    bool operator==(const BoundingBox&) const = default;
};

/// Smallest box containing both.
inline BoundingBox unite(const BoundingBox& a, const BoundingBox& b) {
    return {std::min(a.x_min, b.x_min), std::min(a.y_min, b.y_min),
            std::max(a.x_max, b.x_max), std::max(a.y_max, b.y_max)};
}

/// Box restricted to the sensor, or nothing when it lies entirely outside.
inline std::optional<BoundingBox> clip(const BoundingBox& b, const SensorGeometry& g) {
    BoundingBox c{std::max(b.x_min, 0), std::max(b.y_min, 0),
                  std::min<std::int32_t>(b.x_max, std::int32_t(g.width) - 1),
                  std::min<std::int32_t>(b.y_max, std::int32_t(g.height) - 1)};
    if (!c.valid()) return std::nullopt;
    return c;
}

/// Boxes per frame, indexed by frame number.
using BoxSeries = std::vector<std::vector<BoundingBox>>;

} // namespace nomf
