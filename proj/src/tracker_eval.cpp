#include "nomf/tracker_eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <deque>
#include <istream>
#include <ostream>
#include <string>
#include <tuple>

#include "nomf/error.hpp"

namespace nomf {

std::vector<Region> connected_components(const EbbiFrame& frame, int connectivity) {
    if (connectivity != 4 && connectivity != 8) throw InvalidArgument("connectivity must be 4 or 8");
    const std::int64_t W = frame.width(), H = frame.height();
    std::vector<std::uint8_t> seen(frame.bits.size(), 0);
    std::vector<Region> regions;
    std::deque<std::uint32_t> queue;

    for (std::int64_t start = 0; start < W * H; ++start) {
        if (!frame.bits[std::size_t(start)] || seen[std::size_t(start)]) continue;
        Region r;
        const auto sx = std::int32_t(start % W), sy = std::int32_t(start / W);
        r.box = {sx, sy, sx, sy};
        seen[std::size_t(start)] = 1;
        queue.push_back(std::uint32_t(start));
        while (!queue.empty()) {
            const std::uint32_t p = queue.front();
            queue.pop_front();
            r.pixels.push_back(p);
            const auto x = std::int32_t(p % W), y = std::int32_t(p / W);
            r.box = unite(r.box, {x, y, x, y});
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    if ((dx == 0 && dy == 0) || (connectivity == 4 && dx != 0 && dy != 0)) continue;
                    const std::int64_t nx = x + dx, ny = y + dy;
                    if (nx < 0 || ny < 0 || nx >= W || ny >= H) continue;
                    const auto q = std::size_t(ny * W + nx);
                    if (frame.bits[q] && !seen[q]) {
                        seen[q] = 1;
                        queue.push_back(std::uint32_t(q));
                    }
                }
        }
        std::sort(r.pixels.begin(), r.pixels.end());
        regions.push_back(std::move(r));
    }
    return regions;
}

std::vector<BoundingBox> propose_regions(const EbbiFrame& frame, std::int64_t min_area, int connectivity) {
    std::vector<BoundingBox> boxes;
    for (const auto& r : connected_components(frame, connectivity))
        if (r.box.area() >= min_area) boxes.push_back(r.box);
    return boxes;
}

double iou(const BoundingBox& a, const BoundingBox& b) {
    const std::int64_t ix = std::int64_t{std::min(a.x_max, b.x_max)} - std::max(a.x_min, b.x_min) + 1;
    const std::int64_t iy = std::int64_t{std::min(a.y_max, b.y_max)} - std::max(a.y_min, b.y_min) + 1;
    if (ix <= 0 || iy <= 0) return 0.0;
    const std::int64_t inter = ix * iy;
    return double(inter) / double(a.area() + b.area() - inter);
}

namespace {

struct Pair {
    double iou;
    std::size_t a, b;
};

// Greedy one-to-one matching by descending IoU over pairs with IoU > 0.
std::vector<Pair> greedy_match(const std::vector<BoundingBox>& as, const std::vector<BoundingBox>& bs) {
    std::vector<Pair> pairs;
    for (std::size_t i = 0; i < as.size(); ++i)
        for (std::size_t j = 0; j < bs.size(); ++j)
            if (double v = iou(as[i], bs[j]); v > 0.0) pairs.push_back({v, i, j});
    std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) {
        return std::tie(y.iou, x.a, x.b) < std::tie(x.iou, y.a, y.b);
    });
    std::vector<std::uint8_t> used_a(as.size(), 0), used_b(bs.size(), 0);
    std::vector<Pair> matched;
    for (const auto& p : pairs) {
        if (used_a[p.a] || used_b[p.b]) continue;
        used_a[p.a] = used_b[p.b] = 1;
        matched.push_back(p);
    }
    return matched;
}

} // namespace

EvalCurve evaluate(const BoxSeries& proposals, const BoxSeries& ground_truth, std::span<const double> thresholds,
                   std::int64_t min_area) {
    if (proposals.size() != ground_truth.size())
        throw InvalidArgument("proposal and ground-truth series cover " + std::to_string(proposals.size()) + " and " +
                              std::to_string(ground_truth.size()) + " frames");
    EvalCurve curve;
    curve.thresholds.assign(thresholds.begin(), thresholds.end());
    std::vector<double> matched_iou;
    for (std::size_t f = 0; f < proposals.size(); ++f) {
        std::vector<BoundingBox> kept;
        for (const auto& b : proposals[f])
            if (b.area() >= min_area) kept.push_back(b);
        curve.proposals += kept.size();
        curve.ground_truth += ground_truth[f].size();
        for (const auto& p : greedy_match(kept, ground_truth[f])) matched_iou.push_back(p.iou);
    }
    for (double t : curve.thresholds) {
        const auto tp = std::count_if(matched_iou.begin(), matched_iou.end(), [t](double v) { return v >= t; });
        curve.precision.push_back(curve.proposals ? double(tp) / double(curve.proposals) : 1.0);
        curve.recall.push_back(curve.ground_truth ? double(tp) / double(curve.ground_truth) : 1.0);
    }
    return curve;
}

std::vector<double> iou_grid(double lo, double hi, double step) {
    if (!(step > 0.0) || !(lo > 0.0) || !(hi <= 1.0) || lo > hi)
        throw InvalidArgument("IoU grid needs 0 < lo <= hi <= 1 and step > 0");
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<double> grid;
    for (std::size_t i = 0; i < count; ++i) grid.push_back(std::round((lo + double(i) * step) * 1e9) / 1e9);
    return grid;
}

std::vector<Track> track_overlap(const BoxSeries& per_frame) {
    std::vector<Track> tracks;
    std::vector<std::size_t> alive; // indices into tracks with a box in the previous frame
    for (std::size_t f = 0; f < per_frame.size(); ++f) {
        const auto& boxes = per_frame[f];
        std::vector<BoundingBox> prev;
        for (auto t : alive) prev.push_back(tracks[t].boxes.back().second);
        std::vector<std::size_t> next_alive;
        std::vector<std::uint8_t> assigned(boxes.size(), 0);
        for (const auto& p : greedy_match(prev, boxes)) {
            tracks[alive[p.a]].boxes.emplace_back(std::uint32_t(f), boxes[p.b]);
            assigned[p.b] = 1;
            next_alive.push_back(alive[p.a]);
        }
        for (std::size_t j = 0; j < boxes.size(); ++j) {
            if (assigned[j]) continue;
            Track t;
            t.id = std::uint32_t(tracks.size());
            t.first_frame = std::uint32_t(f);
            t.boxes.emplace_back(std::uint32_t(f), boxes[j]);
            next_alive.push_back(tracks.size());
            tracks.push_back(std::move(t));
        }
        std::sort(next_alive.begin(), next_alive.end());
        alive = std::move(next_alive);
    }
    return tracks;
}

BoxSeries read_boxes_csv(std::istream& in, std::optional<std::size_t> frames) {
    std::vector<std::pair<std::size_t, BoundingBox>> rows;
    std::string line;
    std::size_t line_no = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        std::int64_t v[5];
        std::size_t count = 0, pos = 0;
        bool numeric = true;
        while (pos <= line.size()) {
            auto comma = line.find(',', pos);
            if (comma == std::string::npos) comma = line.size();
            std::string_view field(line.data() + pos, comma - pos);
            while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
            while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
            if (count < 5) {
                auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v[count]);
                if (ec != std::errc{} || ptr != field.data() + field.size()) numeric = false;
            }
            ++count;
            pos = comma + 1;
        }
        if (first) {
            first = false;
            if (!numeric) continue; // header
        }
        if (count != 5) throw ParseError("expected 5 fields frame,x_min,y_min,x_max,y_max", line_no);
        if (!numeric) throw ParseError("non-numeric field", line_no);
        if (v[0] < 0) throw ParseError("negative frame index", line_no);
        BoundingBox b{std::int32_t(v[1]), std::int32_t(v[2]), std::int32_t(v[3]), std::int32_t(v[4])};
        if (!b.valid() || b.x_min < 0 || b.y_min < 0) throw ParseError("invalid box", line_no);
        if (frames && std::size_t(v[0]) >= *frames)
            throw ParseError("frame " + std::to_string(v[0]) + " beyond the " + std::to_string(*frames) +
                                 " frames being evaluated",
                             line_no);
        rows.emplace_back(std::size_t(v[0]), b);
    }
    std::size_t size = frames.value_or(0);
    for (const auto& [f, b] : rows) size = std::max(size, f + 1);
    BoxSeries series(size);
    for (const auto& [f, b] : rows) series[f].push_back(b);
    return series;
}

void write_boxes_csv(std::ostream& out, const BoxSeries& series) {
    out << "frame,x_min,y_min,x_max,y_max\n";
    for (std::size_t f = 0; f < series.size(); ++f)
        for (const auto& b : series[f])
            out << f << ',' << b.x_min << ',' << b.y_min << ',' << b.x_max << ',' << b.y_max << '\n';
}

void write_curve_csv(std::ostream& out, const EvalCurve& curve) {
    out << "iou,precision,recall\n";
    char buf[96];
    for (std::size_t i = 0; i < curve.thresholds.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.4f,%.6f,%.6f\n", curve.thresholds[i], curve.precision[i], curve.recall[i]);
        out << buf;
    }
}

} // namespace nomf
