#pragma once

// Behavioural model of the 320x240 SRAM array running NOMF in filter mode.
//
// In filter mode n word-lines fire together and the BL/BLB of n adjacent columns
// are shorted, so an n x n kernel discharges BL through every cell storing 0 and
// BLB through every cell storing 1. Whichever line collapses first writes its
// value into the minority cells. The race is modelled at the level of the
// constant-current linear discharge
//
//     dV/dt = sum(i0) / C_BL - sum(i1) / C_BLB
//
// with Gaussian per-cell current and per-line capacitance mismatch.

#include <cstdint>
#include <vector>

#include "nomf/framer.hpp"
#include "nomf/rng.hpp"

namespace nomf {

struct ArrayConfig {
    std::uint32_t rows = 240;
    std::uint32_t cols = 320;
    std::uint32_t banks = 22;
    std::uint32_t bank_cols = 15; ///< the last bank takes whatever columns remain
    std::uint32_t n = 3;
    double vdd = 1.2;        ///< volts
    double c_bl = 140e-15;   ///< farads
    double f_clk = 200e6;    ///< hertz

    void validate() const;
    SensorGeometry geometry() const { return {cols, rows}; }
    /// Column range [first, last) of a bank.
    std::pair<std::uint32_t, std::uint32_t> bank_columns(std::uint32_t bank) const;
};

/// Per-cell read current mu_i(vdd) = k_amp * (vdd - v_t)^exponent with an absolute
/// mismatch sigma_i that does not scale with vdd, so relative mismatch grows as
/// the overdrive shrinks.
struct MismatchModel {
    double k_amp = 25e-6;      ///< A / V^exponent
    double v_t = 0.4;          ///< volts
    double exponent = 1.3;
    double sigma_i = 0.0;      ///< amperes, per cell
    double sigma_c_rel = 0.0;  ///< relative sigma of C_BL and C_BLB
    std::uint64_t seed = 1;

    double mu_i(double vdd) const;
    double sigma_i_rel(double vdd) const { return sigma_i / mu_i(vdd); }
    void validate() const;
};

struct RaceOutcome {
    std::uint8_t decided_bit = 0;
    double delta_v_rate = 0.0; ///< V/s, sum(i0)/C_BL - sum(i1)/C_BLB; negative when 1 wins
    std::uint32_t margin = 0;  ///< |ones - zeros|
    double sum_i0 = 0.0;       ///< BL discharge current, amperes
    double sum_i1 = 0.0;       ///< BLB discharge current, amperes
};

/// One discharge race. Currents below zero are truncated to zero; an exact
/// tie resolves to 1.
RaceOutcome kernel_race(std::uint32_t ones, std::uint32_t zeros, const MismatchModel& mm,
                        const ArrayConfig& cfg, SplitMix64& rng);

/// Majority the ideal race must reach (ties go to 1).
constexpr std::uint8_t true_majority(std::uint32_t ones, std::uint32_t zeros) { return ones >= zeros ? 1 : 0; }

struct FlipStats {
    std::uint64_t flipped_pixels = 0;   ///< pixels changed by filtering
    double alpha_measured = 0.0;        ///< flipped_pixels / (W*H)
    std::uint64_t unintended_flips = 0; ///< pixels disagreeing with ideal NOMF
    std::uint64_t wrong_kernels = 0;    ///< kernels that decided against their majority
    std::uint64_t kernels = 0;
    std::uint64_t cycles = 0;
    double latency = 0.0;               ///< seconds
};

struct ImcResult {
    EbbiFrame frame;
    FlipStats stats;
};

/// Filter-mode clock cycles per frame: one precharge and one race per band of n rows.
constexpr std::uint64_t frame_cycles(std::uint32_t rows, std::uint32_t n) { return 2ull * ((rows + n - 1) / n); }

inline double frame_latency(const ArrayConfig& cfg) { return double(frame_cycles(cfg.rows, cfg.n)) / cfg.f_clk; }

/// Runs the array over one frame. Each kernel draws from its own substream keyed
/// by (mm.seed, frame_index, band, kernel column), so results do not depend on
/// `threads`.
ImcResult filter_frame_imc(const EbbiFrame& frame, const ArrayConfig& cfg, const MismatchModel& mm,
                           std::uint64_t frame_index = 0, unsigned threads = 1);

struct Histogram {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<std::uint64_t> counts;

    double bin_width() const { return counts.empty() ? 0.0 : (hi - lo) / double(counts.size()); }
};

struct McResult {
    std::uint64_t trials = 0;
    std::uint64_t flips = 0;
    double flip_rate = 0.0;
    Histogram bl_current;  ///< sum(i0) samples
    Histogram blb_current; ///< sum(i1) samples, same binning as bl_current
};

/// Fraction of races that decide against the true majority. `cfg.vdd` is
/// replaced by `vdd`. Trials run in fixed-size chunks with their own substreams.
McResult monte_carlo_flip_rate(std::uint32_t ones, std::uint32_t zeros, double vdd, std::uint64_t trials,
                               const MismatchModel& mm, const ArrayConfig& cfg = {}, unsigned threads = 1,
                               std::uint32_t histogram_bins = 50);

/// Wrong-decision probability of one race under a first-order (in sigma_c_rel)
/// Gaussian approximation of the race statistic.
double analytic_flip_rate(std::uint32_t ones, std::uint32_t zeros, double vdd, const MismatchModel& mm);

struct TgCheck {
    bool ok = false;
    double ratio = 0.0; ///< (C_BL * VDD / i_s) / (R_tg * C_BL)
};

/// Default factor by which the transmission-gate RC must undercut the discharge time.
inline constexpr double kTgMarginFactor = 10.0;

/// Boundary inclusive.
constexpr bool tg_ratio_ok(double ratio, double margin_factor) { return ratio >= margin_factor; }

/// Checks R_tg * C_BL << C_BL * VDD / i_s with i_s = mu_i(cfg.vdd).
TgCheck validate_tg_constraint(double r_tg, const ArrayConfig& cfg, const MismatchModel& mm,
                               double margin_factor = kTgMarginFactor);

struct CalibrationTargets {
    double vdd = 1.0;
    std::uint32_t ones = 4;
    std::uint32_t zeros = 5;
    double flip_rate = 0.025;
    double check_vdd = 1.2;
    double check_max_rate = 0.005;
};

/// Uncalibrated defaults: sigma_i = 0, sigma_c_rel = 1%.
MismatchModel default_base_model();

/// Solves for MismatchModel::sigma_i by bisection so that the analytic flip rate
/// at the primary target matches, then verifies the check point. The other
/// fields of `base` are kept. Throws InvalidArgument when infeasible.
MismatchModel calibrate_mismatch(const CalibrationTargets& targets = {}, const MismatchModel& base = default_base_model());

/// calibrate_mismatch() with the default targets and base model.
const MismatchModel& calibrated_model();

} // namespace nomf
