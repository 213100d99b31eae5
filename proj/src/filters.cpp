#include "nomf/filters.hpp"

#include <algorithm>
#include <string>

#include "nomf/error.hpp"

namespace nomf {

void KernelConfig::validate() const {
    if (n != 3 && n != 5) throw InvalidArgument("kernel size must be 3 or 5, got " + std::to_string(n));
}

EbbiFrame median_overlap(const EbbiFrame& frame, std::uint32_t n, const simd::Kernels& k) {
    if (n % 2 == 0 || n > 15) throw InvalidArgument("median kernel must be odd and <= 15, got " + std::to_string(n));
    const std::uint32_t W = frame.width(), H = frame.height(), r = n / 2;

    // Horizontal window sums over a zero-padded copy of each row.
    std::vector<std::uint8_t> hsum(frame.bits.size());
    std::vector<std::uint8_t> padded(W + 2 * r, 0);
    for (std::uint32_t y = 0; y < H; ++y) {
        auto row = frame.row(y);
        std::copy(row.begin(), row.end(), padded.begin() + r);
        k.window_sum_u8(padded.data(), hsum.data() + std::size_t{y} * W, W, n);
    }

    EbbiFrame out(frame.geometry, frame.window_start, frame.window_len);
    std::vector<std::uint8_t> acc(W);
    const auto thr = static_cast<std::uint8_t>(majority_threshold(n * n));
    for (std::uint32_t y = 0; y < H; ++y) {
        const std::uint32_t lo = y >= r ? y - r : 0;
        const std::uint32_t hi = std::min(H - 1, y + r);
        std::copy_n(hsum.data() + std::size_t{lo} * W, W, acc.data());
        for (std::uint32_t yy = lo + 1; yy <= hi; ++yy)
            k.add_u8(acc.data(), hsum.data() + std::size_t{yy} * W, acc.data(), W);
        k.threshold_u8(acc.data(), out.row(y).data(), W, thr);
    }
    return out;
}

TileCounts count_tiles(const EbbiFrame& frame, std::uint32_t n, const simd::Kernels& k) {
    if (n == 0 || n > 15) throw InvalidArgument("tile size must be in [1, 15]");
    const std::uint32_t W = frame.width(), H = frame.height();
    TileCounts tc;
    tc.n = n;
    tc.tiles_x = (W + n - 1) / n;
    tc.tiles_y = (H + n - 1) / n;
    tc.ones.resize(std::size_t{tc.tiles_x} * tc.tiles_y);
    tc.pixels.resize(tc.ones.size());

    std::vector<std::uint8_t> colsum(W);
    for (std::uint32_t ty = 0; ty < tc.tiles_y; ++ty) {
        const std::uint32_t y0 = ty * n;
        const std::uint32_t rows = std::min(n, H - y0);
        auto first = frame.row(y0);
        std::copy(first.begin(), first.end(), colsum.begin());
        for (std::uint32_t dy = 1; dy < rows; ++dy)
            k.add_u8(colsum.data(), frame.row(y0 + dy).data(), colsum.data(), W);
        for (std::uint32_t tx = 0; tx < tc.tiles_x; ++tx) {
            const std::uint32_t x0 = tx * n;
            const std::uint32_t cols = std::min(n, W - x0);
            unsigned ones = 0;
            for (std::uint32_t dx = 0; dx < cols; ++dx) ones += colsum[x0 + dx];
            tc.ones[tc.index(tx, ty)] = static_cast<std::uint8_t>(ones);
            tc.pixels[tc.index(tx, ty)] = static_cast<std::uint8_t>(rows * cols);
        }
    }
    return tc;
}

void fill_tile(EbbiFrame& frame, std::uint32_t n, std::uint32_t tx, std::uint32_t ty, std::uint8_t bit) {
    const std::uint32_t x0 = tx * n, y0 = ty * n;
    const std::uint32_t x1 = std::min(frame.width(), x0 + n), y1 = std::min(frame.height(), y0 + n);
    for (std::uint32_t y = y0; y < y1; ++y) {
        auto row = frame.row(y);
        std::fill(row.begin() + x0, row.begin() + x1, bit);
    }
}

EbbiFrame nomf(const EbbiFrame& frame, std::uint32_t n, const simd::Kernels& k) {
    KernelConfig{n, KernelMode::non_overlap}.validate();
    const TileCounts tc = count_tiles(frame, n, k);
    EbbiFrame out(frame.geometry, frame.window_start, frame.window_len);
    for (std::uint32_t ty = 0; ty < tc.tiles_y; ++ty)
        for (std::uint32_t tx = 0; tx < tc.tiles_x; ++tx) {
            const auto i = tc.index(tx, ty);
            if (tc.ones[i] >= majority_threshold(tc.pixels[i])) fill_tile(out, n, tx, ty, 1);
        }
    return out;
}

EbbiFrame apply_median(const EbbiFrame& frame, const KernelConfig& cfg) {
    cfg.validate();
    return cfg.mode == KernelMode::overlap ? median_overlap(frame, cfg.n) : nomf(frame, cfg.n);
}

std::vector<Event> nn_filt(std::span<const Event> events, const NnFiltConfig& cfg, SensorGeometry geometry) {
    if (cfg.tau_us == 0) throw InvalidArgument("nn_filt tau must be > 0");
    if (!is_time_sorted(events)) throw InvalidArgument("events must be sorted by timestamp");
    constexpr std::int64_t kNever = -1;
    const std::int64_t W = geometry.width, H = geometry.height;
    const auto tau = static_cast<std::int64_t>(cfg.tau_us);
    std::vector<std::int64_t> last(geometry.pixel_count(), kNever);

    std::vector<Event> out;
    for (const auto& e : events) {
        if (!geometry.contains(e.x, e.y)) throw InvalidArgument("event outside sensor geometry");
        const std::int64_t t = e.t;
        bool support = false;
        for (std::int64_t dy = -1; dy <= 1 && !support; ++dy) {
            const std::int64_t y = e.y + dy;
            if (y < 0 || y >= H) continue;
            for (std::int64_t dx = -1; dx <= 1; ++dx) {
                const std::int64_t x = e.x + dx;
                if ((dx == 0 && dy == 0) || x < 0 || x >= W) continue;
                const std::int64_t s = last[std::size_t(y * W + x)];
                if (s != kNever && t - s <= tau) {
                    support = true;
                    break;
                }
            }
        }
        if (support) out.push_back(e);
        last[std::size_t(std::int64_t{e.y} * W + e.x)] = t;
    }
    return out;
}

double flipped_fraction(const EbbiFrame& before, const EbbiFrame& after, const simd::Kernels& k) {
    if (before.geometry != after.geometry) throw InvalidArgument("flipped_fraction: geometry mismatch");
    if (before.bits.empty()) return 0.0;
    return double(k.count_diff_u8(before.bits.data(), after.bits.data(), before.bits.size())) /
           double(before.bits.size());
}

} // namespace nomf
