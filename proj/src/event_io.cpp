#include "nomf/event_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <iterator>
#include <limits>
#include <ostream>
#include <random>
#include <string>
#include <string_view>

#include "nomf/error.hpp"

namespace nomf {

namespace {

template <typename T>
bool parse_field(std::string_view s, T& out) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

Event checked_event(std::uint64_t t, std::uint64_t x, std::uint64_t y, std::uint64_t p,
                    const ParseOptions& opts, std::size_t line) {
    if (t > std::numeric_limits<std::uint32_t>::max())
        throw ParseError("timestamp " + std::to_string(t) + " exceeds 32 bits", line);
    if (x >= opts.geometry.width || y >= opts.geometry.height)
        throw ParseError("coordinate (" + std::to_string(x) + "," + std::to_string(y) +
                             ") out of bounds for " + std::to_string(opts.geometry.width) + "x" +
                             std::to_string(opts.geometry.height),
                         line);
    if (p > 1) throw ParseError("polarity must be 0 or 1, got " + std::to_string(p), line);
    return Event{static_cast<std::uint32_t>(t), static_cast<std::uint16_t>(x),
                 static_cast<std::uint16_t>(y), p ? Polarity::on : Polarity::off};
}

void check_order(const std::vector<Event>& events, const Event& e, const ParseOptions& opts,
                 std::size_t line) {
    if (opts.strict_time && !events.empty() && e.t < events.back().t)
        throw ParseError("timestamp " + std::to_string(e.t) + " decreases (previous " +
                             std::to_string(events.back().t) + ")",
                         line);
}

bool is_blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

} // namespace

std::vector<Event> parse_csv(std::istream& in, const ParseOptions& opts) {
    std::vector<Event> events;
    std::string line;
    std::size_t line_no = 0;
    bool seen_content = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        std::string_view rest(line);
        std::string_view fields[4];
        std::size_t count = 0;
        while (true) {
            auto comma = rest.find(',');
            if (count < 4) fields[count] = rest.substr(0, comma);
            ++count;
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (!seen_content) {
            seen_content = true;
            std::uint64_t probe;
            if (!parse_field(fields[0], probe)) continue; // header
        }
        if (count != 4)
            throw ParseError("expected 4 fields t_us,x,y,p, got " + std::to_string(count), line_no);
        std::uint64_t v[4];
        for (std::size_t i = 0; i < 4; ++i)
            if (!parse_field(fields[i], v[i]))
                throw ParseError("non-numeric field '" + std::string(fields[i]) + "'", line_no);
        Event e = checked_event(v[0], v[1], v[2], v[3], opts, line_no);
        check_order(events, e, opts, line_no);
        events.push_back(e);
    }
    return events;
}

void write_csv(std::ostream& out, std::span<const Event> events, bool header) {
    if (header) out << "t_us,x,y,p\n";
    for (const auto& e : events)
        out << e.t << ',' << e.x << ',' << e.y << ',' << static_cast<int>(e.polarity) << '\n';
}

std::vector<Event> parse_binary(std::istream& in, const ParseOptions& opts) {
    std::vector<unsigned char> buf{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    if (buf.size() % kBinaryRecordSize != 0)
        throw ParseError("truncated record: " + std::to_string(buf.size()) +
                             " bytes is not a multiple of " + std::to_string(kBinaryRecordSize),
                         buf.size() / kBinaryRecordSize + 1);
    std::vector<Event> events;
    events.reserve(buf.size() / kBinaryRecordSize);
    for (std::size_t off = 0, rec = 1; off < buf.size(); off += kBinaryRecordSize, ++rec) {
        const unsigned char* r = buf.data() + off;
        std::uint64_t t = std::uint64_t{r[0]} | std::uint64_t{r[1]} << 8 | std::uint64_t{r[2]} << 16 |
                          std::uint64_t{r[3]} << 24;
        std::uint64_t x = std::uint64_t{r[4]} | std::uint64_t{r[5]} << 8;
        std::uint64_t y = std::uint64_t{r[6]} | std::uint64_t{r[7]} << 8;
        Event e = checked_event(t, x, y, r[8], opts, rec);
        check_order(events, e, opts, rec);
        events.push_back(e);
    }
    return events;
}

void write_binary(std::ostream& out, std::span<const Event> events) {
    std::vector<char> buf(events.size() * kBinaryRecordSize);
    char* p = buf.data();
    for (const auto& e : events) {
        p[0] = char(e.t & 0xff);
        p[1] = char((e.t >> 8) & 0xff);
        p[2] = char((e.t >> 16) & 0xff);
        p[3] = char((e.t >> 24) & 0xff);
        p[4] = char(e.x & 0xff);
        p[5] = char(e.x >> 8);
        p[6] = char(e.y & 0xff);
        p[7] = char(e.y >> 8);
        p[8] = char(e.polarity == Polarity::on ? 1 : 0);
        p += kBinaryRecordSize;
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

bool is_time_sorted(std::span<const Event> events) {
    return std::is_sorted(events.begin(), events.end(),
                          [](const Event& a, const Event& b) { return a.t < b.t; });
}

BoundingBox SyntheticObject::at(double t_seconds) const {
    auto dx = static_cast<std::int32_t>(std::llround(vx * t_seconds));
    auto dy = static_cast<std::int32_t>(std::llround(vy * t_seconds));
    return {initial.x_min + dx, initial.y_min + dy, initial.x_max + dx, initial.y_max + dy};
}

void SyntheticSceneConfig::validate() const {
    if (geometry.width < 1 || geometry.height < 1) throw InvalidArgument("sensor geometry must be at least 1x1");
    if (geometry.width > 65536 || geometry.height > 65536)
        throw InvalidArgument("sensor geometry exceeds 16-bit coordinates");
    if (!(noise_rate >= 0.0)) throw InvalidArgument("noise_rate must be >= 0");
    if (!(duration > 0.0)) throw InvalidArgument("duration must be > 0");
    if (duration * 1e6 > double(std::numeric_limits<std::uint32_t>::max()))
        throw InvalidArgument("duration exceeds the 32-bit microsecond timestamp range");
    if (window_us == 0) throw InvalidArgument("window_us must be > 0");
    if (edge_width == 0) throw InvalidArgument("edge_width must be > 0");
    for (const auto& o : objects) {
        if (!(o.event_rate >= 0.0)) throw InvalidArgument("object event_rate must be >= 0");
        const auto& b = o.initial;
        if (!b.valid() || !geometry.contains(b.x_min, b.y_min) || !geometry.contains(b.x_max, b.y_max))
            throw InvalidArgument("object box must lie within the sensor at t=0");
    }
}

namespace {

constexpr std::uint32_t kStepUs = 1000;

// In-bounds pixels within `edge` of the (unclipped) box border.
void boundary_pixels(const BoundingBox& b, std::uint32_t edge, const SensorGeometry& g,
                     std::vector<std::pair<std::uint16_t, std::uint16_t>>& out) {
    out.clear();
    auto vis = clip(b, g);
    if (!vis) return;
    const std::int64_t e = edge;
    for (std::int32_t y = vis->y_min; y <= vis->y_max; ++y) {
        bool row_edge = y - b.y_min < e || b.y_max - y < e;
        for (std::int32_t x = vis->x_min; x <= vis->x_max; ++x) {
            if (row_edge || x - b.x_min < e || b.x_max - x < e)
                out.emplace_back(static_cast<std::uint16_t>(x), static_cast<std::uint16_t>(y));
        }
    }
}

} // namespace

SyntheticScene generate_synthetic(const SyntheticSceneConfig& cfg) {
    cfg.validate();
    const auto& g = cfg.geometry;
    const auto total_us = static_cast<std::uint32_t>(std::llround(cfg.duration * 1e6));
    const std::uint32_t steps = (total_us + kStepUs - 1) / kStepUs;
    const std::uint32_t frames = (total_us + cfg.window_us - 1) / cfg.window_us;

    std::mt19937_64 rng(cfg.seed);
    std::bernoulli_distribution coin(0.5);
    SyntheticScene scene;
    scene.ground_truth.assign(frames, {});

    std::vector<std::pair<std::uint16_t, std::uint16_t>> pixels;
    for (const auto& obj : cfg.objects) {
        std::vector<std::optional<BoundingBox>> frame_box(frames);
        for (std::uint32_t s = 0; s < steps; ++s) {
            const std::uint32_t t0 = s * kStepUs;
            const std::uint32_t t1 = std::min(t0 + kStepUs, total_us);
            const BoundingBox box = obj.at((t0 + t1) * 0.5e-6);

            for (std::uint32_t f = t0 / cfg.window_us; f <= (t1 - 1) / cfg.window_us; ++f)
                frame_box[f] = frame_box[f] ? unite(*frame_box[f], box) : box;

            boundary_pixels(box, cfg.edge_width, g, pixels);
            const double mean = obj.event_rate * double(pixels.size()) * (t1 - t0) * 1e-6;
            if (mean <= 0.0) continue;
            const auto k = std::poisson_distribution<std::uint64_t>(mean)(rng);
            std::uniform_int_distribution<std::size_t> pick(0, pixels.size() - 1);
            std::uniform_int_distribution<std::uint32_t> when(t0, t1 - 1);
            for (std::uint64_t i = 0; i < k; ++i) {
                auto [x, y] = pixels[pick(rng)];
                const std::uint32_t t = when(rng);
                scene.events.push_back({t, x, y, coin(rng) ? Polarity::on : Polarity::off});
            }
        }
        for (std::uint32_t f = 0; f < frames; ++f)
            if (frame_box[f])
                if (auto c = clip(*frame_box[f], g)) scene.ground_truth[f].push_back(*c);
    }

    const double noise_mean = cfg.noise_rate * double(g.pixel_count()) * total_us * 1e-6;
    if (noise_mean > 0.0) {
        const auto k = std::poisson_distribution<std::uint64_t>(noise_mean)(rng);
        std::uniform_int_distribution<std::uint32_t> when(0, total_us - 1);
        std::uniform_int_distribution<std::uint32_t> px(0, g.width - 1);
        std::uniform_int_distribution<std::uint32_t> py(0, g.height - 1);
        for (std::uint64_t i = 0; i < k; ++i) {
            const std::uint32_t t = when(rng);
            const auto x = static_cast<std::uint16_t>(px(rng));
            const auto y = static_cast<std::uint16_t>(py(rng));
            scene.events.push_back({t, x, y, coin(rng) ? Polarity::on : Polarity::off});
        }
    }

    std::stable_sort(scene.events.begin(), scene.events.end(),
                     [](const Event& a, const Event& b) { return a.t < b.t; });
    return scene;
}

SyntheticSceneConfig traffic_scene(std::uint64_t seed, std::uint32_t object_count, double duration,
                                   double noise_rate, SensorGeometry geometry) {
    SyntheticSceneConfig cfg;
    cfg.geometry = geometry;
    cfg.noise_rate = noise_rate;
    cfg.duration = duration;
    cfg.seed = seed;
    if (object_count == 0) return cfg;

    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    const std::int32_t W = std::int32_t(geometry.width);
    const std::int32_t lane_h = std::int32_t(geometry.height / object_count);
    if (lane_h < 12 || W < 80)
        throw InvalidArgument("sensor too small for " + std::to_string(object_count) + " traffic lanes");

    for (std::uint32_t i = 0; i < object_count; ++i) {
        auto uni = [&](std::int32_t lo, std::int32_t hi) {
            return std::uniform_int_distribution<std::int32_t>(lo, std::max(lo, hi))(rng);
        };
        const std::int32_t h = uni(std::max(10, lane_h * 2 / 5), std::min(40, lane_h * 4 / 5));
        const std::int32_t w = uni(std::min(30, W / 4), std::min(70, W / 3));
        const std::int32_t y0 = std::int32_t(i) * lane_h + uni(0, lane_h - h);
        const bool rightwards = std::bernoulli_distribution(0.5)(rng);
        const double speed = uni(15, 40);
        SyntheticObject obj;
        if (rightwards) {
            const std::int32_t x0 = uni(2, W / 4);
            obj.initial = {x0, y0, x0 + w - 1, y0 + h - 1};
            obj.vx = speed;
        } else {
            const std::int32_t x1 = uni(W * 3 / 4, W - 3);
            obj.initial = {x1 - w + 1, y0, x1, y0 + h - 1};
            obj.vx = -speed;
        }
        obj.event_rate = 100.0;
        cfg.objects.push_back(obj);
    }
    return cfg;
}

} // namespace nomf
