#include "nomf/framer.hpp"

#include <string>

#include "nomf/error.hpp"
#include "nomf/simd/kernels.hpp"

namespace nomf {

std::size_t EbbiFrame::popcount() const {
    return simd::active().count_nonzero_u8(bits.data(), bits.size());
}

std::vector<FramedWindow> accumulate(std::span<const Event> events, SensorGeometry geometry,
                                     std::uint64_t window_len, const AccumulateOptions& opts) {
    if (window_len == 0) throw InvalidArgument("window_len must be > 0");
    if (!is_time_sorted(events)) throw InvalidArgument("events must be sorted by timestamp");

    std::vector<FramedWindow> out;
    if (events.empty() && !opts.start_us && !opts.end_us) return out;

    std::uint64_t first = opts.start_us ? *opts.start_us / window_len
                                        : (events.empty() ? 0 : events.front().t / window_len);
    if (!events.empty() && events.front().t / window_len < first)
        throw InvalidArgument("start_us is after the first event");
    std::uint64_t last = events.empty() ? first : events.back().t / window_len;
    if (opts.end_us && *opts.end_us > 0) last = std::max(last, (*opts.end_us - 1) / window_len);

    const double pixels = double(geometry.pixel_count());
    out.reserve(last - first + 1);
    for (std::uint64_t f = first; f <= last; ++f)
        out.push_back({EbbiFrame(geometry, f * window_len, window_len), {}});

    for (const auto& e : events) {
        if (!geometry.contains(e.x, e.y))
            throw InvalidArgument("event (" + std::to_string(e.x) + "," + std::to_string(e.y) +
                                  ") outside sensor geometry");
        auto& w = out[e.t / window_len - first];
        w.frame.set(e.x, e.y, 1);
        ++w.stats.event_count;
    }
    for (auto& w : out) {
        w.stats.active_pixel_count = w.frame.popcount();
        w.stats.gamma_estimate = pixels > 0 ? double(w.stats.event_count) / pixels : 0.0;
    }
    return out;
}

} // namespace nomf
