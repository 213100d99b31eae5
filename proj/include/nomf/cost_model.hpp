#pragma once

// Closed-form memory/compute accounting for the four denoising methods and
// the per-frame energy, latency and throughput derived from per-bit figures.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "nomf/imc_sim.hpp"

namespace nomf {

enum class Method { nn_filt, median, nomf, nomf_imc };

inline constexpr Method kAllMethods[] = {Method::nn_filt, Method::median, Method::nomf, Method::nomf_imc};

std::string_view to_string(Method m);
/// Throws InvalidArgument for unknown names.
Method parse_method(std::string_view name);

struct CostParams {
    std::uint32_t width = 320;
    std::uint32_t height = 240;
    std::uint32_t n = 3;
    std::uint32_t beta_t = 16; ///< bits per NN-filt timestamp
    double gamma = 0.15;       ///< events per frame / D
    double alpha = 0.036;      ///< flipped pixels per frame / D

    std::uint64_t pixels() const { return std::uint64_t{width} * height; }
    void validate() const;
};

struct ResourceCounts {
    std::uint64_t reads = 0;
    std::uint64_t writes = 0;
    std::uint64_t ops = 0;
    std::uint64_t bits = 0;

    bool operator==(const ResourceCounts&) const = default;
};

/// Rounds a physical count up, absorbing floating-point noise within 1e-9
/// relative of an integer (0.15 * 16 * 76800 must stay 184320).
std::uint64_t ceil_count(double x);

ResourceCounts count_resources(Method method, const CostParams& p);

struct EnergyLatencyEntry {
    std::string method;
    std::string process;
    double area_per_cell_um2 = 0.0;
    double latency_per_bit_ns = 0.0;
    double energy_per_bit_pj = 0.0;
};

using EnergyTable = std::vector<EnergyLatencyEntry>;

/// Post-layout per-bit figures for the digital median filter, the array, and
/// the spatio-temporal event filter used for comparison.
const EnergyTable& default_energy_table();
EnergyTable energy_table_from_json(const nlohmann::json& j);
nlohmann::json energy_table_to_json(const EnergyTable& table);

/// Throws InvalidArgument when absent.
const EnergyLatencyEntry& lookup(const EnergyTable& table, std::string_view method);

struct EnergyLatency {
    double energy_per_frame = 0.0;  ///< joules
    double latency_per_frame = 0.0; ///< seconds
    double serial_latency = 0.0;    ///< seconds, per-bit latency x D
};

/// energy = pJ/bit * D. Latency is per-bit * D, except for nomf_imc where the
/// array's filter-mode cycle count at `array.f_clk` is used (serial_latency
/// still reports the per-bit figure for cross-checking).
EnergyLatency energy_latency(Method method, const CostParams& p, const EnergyTable& table,
                             const ArrayConfig& array = {});

struct Savings {
    double total = 0.0;  ///< median energy / nomf_imc energy
    double approx = 0.0; ///< read/op reduction of NOMF over the overlapping median, n^2
    double imc = 0.0;    ///< total / approx
};

Savings savings_decomposition(const CostParams& p, const EnergyTable& table);

/// (n^2 - 1) additions per kernel, D / n^2 kernels per frame.
double throughput_gops(std::uint32_t n, double frame_rate, const CostParams& p);

/// Published reference figures carried for side-by-side reporting only.
struct ReferenceFigures {
    double gops_low = 85.3;
    double gops_high = 153.0;
    double tops_per_w_low = 11.3;
    double tops_per_w_high = 20.0;
    double frames_per_us_low = 1.25;
    double frames_per_us_high = 1.66;
};

struct CostReport {
    CostParams params;
    std::string alpha_source = "default";
    struct Row {
        Method method;
        ResourceCounts counts;
        std::optional<EnergyLatency> energy;
    };
    std::vector<Row> rows;
    Savings savings;
    double frame_latency_n3 = 0.0;
    double frame_latency_n5 = 0.0;
    double throughput_gops_n3 = 0.0;
    double throughput_gops_n5 = 0.0;
    double tops_per_w_derived = 0.0; ///< from nomf_imc energy and the add-count convention
    ReferenceFigures reference;
};

CostReport build_cost_report(const CostParams& p, const EnergyTable& table, const ArrayConfig& array = {});
nlohmann::json to_json(const CostReport& r);
void write_table(std::ostream& out, const CostReport& r);

} // namespace nomf
