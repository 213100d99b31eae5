#include "nomf/imc_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>
#include <string>

#include "nomf/error.hpp"
#include "nomf/filters.hpp"
#include "parallel.hpp"

namespace nomf {

void ArrayConfig::validate() const {
    if (rows == 0 || cols == 0) throw InvalidArgument("array must have at least one row and column");
    if (n != 3 && n != 5) throw InvalidArgument("filter-mode kernel must be 3 or 5, got " + std::to_string(n));
    if (bank_cols == 0 || std::uint64_t{banks} * bank_cols < cols)
        throw InvalidArgument("banks * bank_cols must cover every column");
    if (bank_cols % n != 0)
        throw InvalidArgument("bank width " + std::to_string(bank_cols) + " is not a multiple of n=" + std::to_string(n));
    if (!(vdd > 0.0) || !(c_bl > 0.0) || !(f_clk > 0.0))
        throw InvalidArgument("vdd, c_bl and f_clk must be positive");
}

std::pair<std::uint32_t, std::uint32_t> ArrayConfig::bank_columns(std::uint32_t bank) const {
    const std::uint64_t first = std::uint64_t{bank} * bank_cols;
    if (first >= cols) return {cols, cols};
    return {std::uint32_t(first), std::uint32_t(std::min<std::uint64_t>(first + bank_cols, cols))};
}

double MismatchModel::mu_i(double vdd) const {
    const double overdrive = vdd - v_t;
    return overdrive > 0.0 ? k_amp * std::pow(overdrive, exponent) : 0.0;
}

void MismatchModel::validate() const {
    if (!(k_amp > 0.0) || !(exponent > 0.0)) throw InvalidArgument("current model needs k_amp > 0 and exponent > 0");
    if (!(sigma_i >= 0.0) || !(sigma_c_rel >= 0.0)) throw InvalidArgument("mismatch sigmas must be >= 0");
}

RaceOutcome kernel_race(std::uint32_t ones, std::uint32_t zeros, const MismatchModel& mm, const ArrayConfig& cfg,
                        SplitMix64& rng) {
    const double mu = mm.mu_i(cfg.vdd);
    if (!(mu > 0.0)) throw InvalidArgument("vdd must exceed the threshold voltage");

    auto current = [&] {
        if (mm.sigma_i == 0.0) return mu;
        return std::max(0.0, std::normal_distribution<double>(mu, mm.sigma_i)(rng));
    };
    auto capacitance = [&] {
        if (mm.sigma_c_rel == 0.0) return cfg.c_bl;
        const double c = cfg.c_bl * (1.0 + mm.sigma_c_rel * std::normal_distribution<double>(0.0, 1.0)(rng));
        return std::max(c, 1e-3 * cfg.c_bl);
    };

    RaceOutcome r;
    for (std::uint32_t k = 0; k < zeros; ++k) r.sum_i0 += current();
    for (std::uint32_t k = 0; k < ones; ++k) r.sum_i1 += current();
    const double c_bl = capacitance();
    const double c_blb = capacitance();
    const double bl_slope = r.sum_i0 / c_bl;
    const double blb_slope = r.sum_i1 / c_blb;
    r.delta_v_rate = bl_slope - blb_slope;
    r.decided_bit = blb_slope >= bl_slope ? 1 : 0;
    r.margin = ones > zeros ? ones - zeros : zeros - ones;
    return r;
}

ImcResult filter_frame_imc(const EbbiFrame& frame, const ArrayConfig& cfg, const MismatchModel& mm,
                           std::uint64_t frame_index, unsigned threads) {
    cfg.validate();
    mm.validate();
    if (frame.geometry != cfg.geometry())
        throw InvalidArgument("frame is " + std::to_string(frame.width()) + "x" + std::to_string(frame.height()) +
                              ", array is " + std::to_string(cfg.cols) + "x" + std::to_string(cfg.rows));

    const std::uint32_t n = cfg.n;
    const TileCounts tc = count_tiles(frame, n);
    std::vector<std::uint8_t> decided(tc.ones.size(), 0);

    // One band of n rows per precharge/race cycle pair; every bank races in parallel.
    detail::parallel_for(tc.tiles_y, threads, [&](std::size_t band) {
        const auto ty = static_cast<std::uint32_t>(band);
        for (std::uint32_t b = 0; b < cfg.banks; ++b) {
            const auto [c0, c1] = cfg.bank_columns(b);
            for (std::uint32_t x0 = c0; x0 < c1; x0 += n) {
                const std::uint32_t tx = x0 / n;
                const auto i = tc.index(tx, ty);
                const std::uint32_t ones = tc.ones[i];
                const std::uint32_t zeros = tc.pixels[i] - ones;
                SplitMix64 rng(derive_seed(mm.seed, {frame_index, ty, tx}));
                decided[i] = kernel_race(ones, zeros, mm, cfg, rng).decided_bit;
            }
        }
    });

    ImcResult res;
    res.frame = EbbiFrame(frame.geometry, frame.window_start, frame.window_len);
    auto& st = res.stats;
    for (std::uint32_t ty = 0; ty < tc.tiles_y; ++ty)
        for (std::uint32_t tx = 0; tx < tc.tiles_x; ++tx) {
            const auto i = tc.index(tx, ty);
            if (decided[i]) fill_tile(res.frame, n, tx, ty, 1);
            const std::uint32_t ones = tc.ones[i];
            if (decided[i] != true_majority(ones, tc.pixels[i] - ones)) ++st.wrong_kernels;
        }
    const auto& k = simd::active();
    const std::size_t count = frame.bits.size();
    st.kernels = tc.ones.size();
    st.flipped_pixels = k.count_diff_u8(frame.bits.data(), res.frame.bits.data(), count);
    st.alpha_measured = double(st.flipped_pixels) / double(count);
    const EbbiFrame ideal = nomf(frame, n);
    st.unintended_flips = k.count_diff_u8(ideal.bits.data(), res.frame.bits.data(), count);
    st.cycles = frame_cycles(cfg.rows, n);
    st.latency = double(st.cycles) / cfg.f_clk;
    return res;
}

McResult monte_carlo_flip_rate(std::uint32_t ones, std::uint32_t zeros, double vdd, std::uint64_t trials,
                               const MismatchModel& mm, const ArrayConfig& cfg, unsigned threads,
                               std::uint32_t histogram_bins) {
    if (trials == 0) throw InvalidArgument("trials must be >= 1");
    if (ones + zeros == 0) throw InvalidArgument("kernel must contain at least one cell");
    if (histogram_bins == 0) throw InvalidArgument("histogram needs at least one bin");
    mm.validate();
    ArrayConfig at = cfg;
    at.vdd = vdd;

    constexpr std::uint64_t kChunk = 4096;
    const std::uint64_t chunks = (trials + kChunk - 1) / kChunk;
    std::vector<double> i0(trials), i1(trials);
    std::vector<std::uint64_t> chunk_flips(chunks, 0);
    const std::uint8_t want = true_majority(ones, zeros);
    std::uint64_t vdd_bits;
    static_assert(sizeof vdd_bits == sizeof vdd);
    std::memcpy(&vdd_bits, &vdd, sizeof vdd);

    detail::parallel_for(chunks, threads, [&](std::size_t c) {
        SplitMix64 rng(derive_seed(mm.seed, {0x6d63ULL, vdd_bits, ones, zeros, c}));
        const std::uint64_t lo = c * kChunk, hi = std::min(trials, lo + kChunk);
        for (std::uint64_t t = lo; t < hi; ++t) {
            const RaceOutcome r = kernel_race(ones, zeros, mm, at, rng);
            i0[t] = r.sum_i0;
            i1[t] = r.sum_i1;
            if (r.decided_bit != want) ++chunk_flips[c];
        }
    });

    McResult res;
    res.trials = trials;
    for (auto f : chunk_flips) res.flips += f;
    res.flip_rate = double(res.flips) / double(trials);

    const auto [mn0, mx0] = std::minmax_element(i0.begin(), i0.end());
    const auto [mn1, mx1] = std::minmax_element(i1.begin(), i1.end());
    double lo = std::min(*mn0, *mn1), hi = std::max(*mx0, *mx1);
    if (hi <= lo) hi = lo + (lo > 0.0 ? lo * 1e-9 : 1e-18);
    auto fill = [&](const std::vector<double>& xs, Histogram& h) {
        h.lo = lo;
        h.hi = hi;
        h.counts.assign(histogram_bins, 0);
        for (double x : xs) {
            auto b = static_cast<std::size_t>((x - lo) / (hi - lo) * histogram_bins);
            ++h.counts[std::min<std::size_t>(b, histogram_bins - 1)];
        }
    };
    fill(i0, res.bl_current);
    fill(i1, res.blb_current);
    return res;
}

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

} // namespace

double analytic_flip_rate(std::uint32_t ones, std::uint32_t zeros, double vdd, const MismatchModel& mm) {
    mm.validate();
    const double mu = mm.mu_i(vdd);
    if (!(mu > 0.0)) throw InvalidArgument("vdd must exceed the threshold voltage");
    const double m1 = ones, m0 = zeros;
    const double s2 = mm.sigma_i * mm.sigma_i;
    const double c2 = mm.sigma_c_rel * mm.sigma_c_rel;

    // Race statistic, scaled by C_BL: D = sum(i1)(1 - e1) - sum(i0)(1 - e0) to first order in e.
    const double mean = (m1 - m0) * mu;
    const double var = (m1 + m0) * s2 * (1.0 + c2) + (m1 * m1 + m0 * m0) * mu * mu * c2;
    const bool majority_one = true_majority(ones, zeros) == 1;
    if (var <= 0.0) {
        const std::uint8_t ideal = mean >= 0.0 ? 1 : 0;
        return ideal == (majority_one ? 1 : 0) ? 0.0 : 1.0;
    }
    const double z = mean / std::sqrt(var);
    // Majority 1 fails when D < 0; majority 0 fails when D >= 0.
    return majority_one ? normal_cdf(-z) : normal_cdf(z);
}

TgCheck validate_tg_constraint(double r_tg, const ArrayConfig& cfg, const MismatchModel& mm, double margin_factor) {
    if (!(r_tg > 0.0)) throw InvalidArgument("R_tg must be > 0");
    const double i_s = mm.mu_i(cfg.vdd);
    if (!(i_s > 0.0)) throw InvalidArgument("vdd must exceed the threshold voltage");
    const double discharge_time = cfg.c_bl * cfg.vdd / i_s;
    const double rc = r_tg * cfg.c_bl;
    TgCheck out;
    out.ratio = discharge_time / rc;
    out.ok = tg_ratio_ok(out.ratio, margin_factor);
    return out;
}

MismatchModel default_base_model() {
    MismatchModel m;
    m.sigma_c_rel = 0.01;
    return m;
}

MismatchModel calibrate_mismatch(const CalibrationTargets& t, const MismatchModel& base) {
    base.validate();
    if (!(t.flip_rate >= 0.0) || !(t.flip_rate < 0.5))
        throw InvalidArgument("target flip rate must lie in [0, 0.5)");
    if (t.ones == t.zeros) throw InvalidArgument("calibration kernel needs a strict majority");

    MismatchModel m = base;
    auto rate_at = [&](double sigma) {
        m.sigma_i = sigma;
        return analytic_flip_rate(t.ones, t.zeros, t.vdd, m);
    };

    const double floor_rate = rate_at(0.0);
    if (t.flip_rate < floor_rate)
        throw InvalidArgument("infeasible: capacitance mismatch alone gives flip rate " + std::to_string(floor_rate) +
                              " above target " + std::to_string(t.flip_rate));
    double sigma = 0.0;
    if (t.flip_rate > floor_rate) {
        double lo = 0.0, hi = m.mu_i(t.vdd);
        int grow = 0;
        while (rate_at(hi) < t.flip_rate) {
            hi *= 2.0;
            if (++grow > 200) throw InvalidArgument("infeasible: target flip rate not reachable");
        }
        for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (rate_at(mid) < t.flip_rate ? lo : hi) = mid;
        }
        sigma = 0.5 * (lo + hi);
    }
    m.sigma_i = sigma;

    const double check = analytic_flip_rate(t.ones, t.zeros, t.check_vdd, m);
    if (check > t.check_max_rate)
        throw InvalidArgument("infeasible: calibrated model flips " + std::to_string(check) + " at " +
                              std::to_string(t.check_vdd) + " V, above " + std::to_string(t.check_max_rate));
    return m;
}

const MismatchModel& calibrated_model() {
    static const MismatchModel m = calibrate_mismatch();
    return m;
}

} // namespace nomf
