#pragma once

// AER event streams: CSV and packed binary codecs, plus a seeded synthetic
// scene generator that produces events together with per-frame ground truth.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "nomf/geometry.hpp"

namespace nomf {

enum class Polarity : std::uint8_t { off = 0, on = 1 };

struct Event {
    std::uint32_t t = 0; ///< microseconds
    std::uint16_t x = 0;
    std::uint16_t y = 0;
    Polarity polarity = Polarity::on;

    bool operator==(const Event&) const = default;
};

struct ParseOptions {
    SensorGeometry geometry;
    /// Reject any event whose timestamp is smaller than its predecessor's.
    bool strict_time = false;
};

/// Size of one binary record: t (u32), x (u16), y (u16), p (u8), little-endian, unpadded.
inline constexpr std::size_t kBinaryRecordSize = 9;

/// Reads `t_us,x,y,p` lines. A first line whose leading field is not a number is
/// treated as a header. Blank lines are ignored.
std::vector<Event> parse_csv(std::istream& in, const ParseOptions& opts = {});
void write_csv(std::ostream& out, std::span<const Event> events, bool header = true);

std::vector<Event> parse_binary(std::istream& in, const ParseOptions& opts = {});
void write_binary(std::ostream& out, std::span<const Event> events);

/// True when timestamps never decrease.
bool is_time_sorted(std::span<const Event> events);

/// A rectangle moving at constant velocity whose boundary band emits events.
struct SyntheticObject {
    BoundingBox initial;   ///< position at t = 0, must lie inside the sensor
    double vx = 0.0;       ///< px/s
    double vy = 0.0;       ///< px/s
    double event_rate = 100.0; ///< events per boundary pixel per second

    BoundingBox at(double t_seconds) const;
};

struct SyntheticSceneConfig {
    SensorGeometry geometry;
    std::vector<SyntheticObject> objects;
    double noise_rate = 0.5;      ///< background events per pixel per second
    double duration = 5.0;        ///< seconds
    std::uint64_t seed = 1;
    std::uint32_t window_us = 66'000;  ///< frame window used for the ground-truth boxes
    std::uint32_t edge_width = 3;      ///< thickness of the emitting boundary band, pixels

    /// Throws InvalidArgument on negative rates, empty duration or out-of-bounds boxes.
    void validate() const;
};

struct SyntheticScene {
    std::vector<Event> events;   ///< time-sorted
    BoxSeries ground_truth;      ///< one entry per frame window of `window_us`
};

/// Deterministic for a fixed config (including seed). Boxes that drift out of the
/// sensor are clipped; frames where an object is invisible carry no box for it.
SyntheticScene generate_synthetic(const SyntheticSceneConfig& cfg);

/// Traffic-like scene: `object_count` boxes in separate horizontal lanes moving
/// left or right, with sizes and speeds drawn from `seed`.
SyntheticSceneConfig traffic_scene(std::uint64_t seed, std::uint32_t object_count,
                                   double duration, double noise_rate,
                                   SensorGeometry geometry = {});

} // namespace nomf
