#include "nomf/cost_model.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "nomf/error.hpp"

namespace nomf {

std::string_view to_string(Method m) {
    switch (m) {
    case Method::nn_filt: return "nn_filt";
    case Method::median: return "median";
    case Method::nomf: return "nomf";
    case Method::nomf_imc: return "nomf_imc";
    }
    return "?";
}

Method parse_method(std::string_view name) {
    for (Method m : kAllMethods)
        if (to_string(m) == name) return m;
    throw InvalidArgument("unknown method '" + std::string(name) + "' (expected nn_filt, median, nomf or nomf_imc)");
}

void CostParams::validate() const {
    if (n != 3 && n != 5) throw InvalidArgument("kernel size must be 3 or 5, got " + std::to_string(n));
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw InvalidArgument("gamma must lie in [0, 1]");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("alpha must lie in [0, 1]");
    if (beta_t < 1) throw InvalidArgument("beta_t must be >= 1");
}

std::uint64_t ceil_count(double x) {
    if (!(x > 0.0)) return 0;
    const double r = std::round(x);
    if (std::abs(x - r) <= 1e-9 * std::max(1.0, x)) return static_cast<std::uint64_t>(r);
    return static_cast<std::uint64_t>(std::ceil(x));
}

ResourceCounts count_resources(Method method, const CostParams& p) {
    p.validate();
    const double D = double(p.pixels());
    const double n2 = double(p.n) * p.n;
    const double bt = p.beta_t;
    switch (method) {
    case Method::nn_filt:
        return {ceil_count(bt * p.gamma * n2 * D), ceil_count(bt * p.gamma * D), ceil_count(p.gamma * n2 * D),
                ceil_count(bt * D)};
    case Method::median:
        return {ceil_count(n2 * D), ceil_count(D), ceil_count(n2 * D), ceil_count(2.0 * D)};
    case Method::nomf:
        return {ceil_count(D), ceil_count(D), ceil_count(D), ceil_count(D)};
    case Method::nomf_imc:
        return {ceil_count(D / p.n), ceil_count(p.alpha * D), 0, ceil_count(D)};
    }
    throw InvalidArgument("unknown method");
}

namespace {

// Mirrors config/energy_table.json.
constexpr const char* kDefaultTableJson = R"({
  "entries": [
    {"method": "spatiotemporal", "process": "180nm", "area_per_cell_um2": 400.0, "latency_per_bit_ns": 10.0, "energy_per_bit_pj": 20.0},
    {"method": "median", "process": "65nm", "area_per_cell_um2": 4.89, "latency_per_bit_ns": 95.0, "energy_per_bit_pj": 228.0},
    {"method": "nomf_imc", "process": "65nm", "area_per_cell_um2": 3.65, "latency_per_bit_ns": 0.01, "energy_per_bit_pj": 0.11}
  ]
})";

} // namespace

const EnergyTable& default_energy_table() {
    static const EnergyTable t = energy_table_from_json(nlohmann::json::parse(kDefaultTableJson));
    return t;
}

EnergyTable energy_table_from_json(const nlohmann::json& j) {
    EnergyTable t;
    try {
        for (const auto& e : j.at("entries")) {
            EnergyLatencyEntry row;
            row.method = e.at("method").get<std::string>();
            row.process = e.value("process", "");
            row.area_per_cell_um2 = e.value("area_per_cell_um2", 0.0);
            row.latency_per_bit_ns = e.at("latency_per_bit_ns").get<double>();
            row.energy_per_bit_pj = e.at("energy_per_bit_pj").get<double>();
            if (row.area_per_cell_um2 < 0 || row.latency_per_bit_ns < 0 || row.energy_per_bit_pj < 0)
                throw InvalidArgument("energy table entry '" + row.method + "' has a negative value");
            t.push_back(std::move(row));
        }
    } catch (const nlohmann::json::exception& ex) {
        throw ParseError(std::string("energy table: ") + ex.what());
    }
    return t;
}

nlohmann::json energy_table_to_json(const EnergyTable& table) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : table)
        entries.push_back({{"method", e.method},
                           {"process", e.process},
                           {"area_per_cell_um2", e.area_per_cell_um2},
                           {"latency_per_bit_ns", e.latency_per_bit_ns},
                           {"energy_per_bit_pj", e.energy_per_bit_pj}});
    return {{"entries", entries}};
}

const EnergyLatencyEntry& lookup(const EnergyTable& table, std::string_view method) {
    for (const auto& e : table)
        if (e.method == method) return e;
    throw InvalidArgument("energy table has no entry for '" + std::string(method) + "'");
}

EnergyLatency energy_latency(Method method, const CostParams& p, const EnergyTable& table, const ArrayConfig& array) {
    p.validate();
    const auto& e = lookup(table, to_string(method));
    const double D = double(p.pixels());
    EnergyLatency out;
    out.energy_per_frame = e.energy_per_bit_pj * 1e-12 * D;
    out.serial_latency = e.latency_per_bit_ns * 1e-9 * D;
    out.latency_per_frame = out.serial_latency;
    if (method == Method::nomf_imc && D > 0) {
        ArrayConfig a = array;
        a.rows = p.height;
        a.cols = p.width;
        a.n = p.n;
        out.latency_per_frame = frame_latency(a);
    }
    return out;
}

Savings savings_decomposition(const CostParams& p, const EnergyTable& table) {
    p.validate();
    const double e_median = lookup(table, "median").energy_per_bit_pj;
    const double e_imc = lookup(table, "nomf_imc").energy_per_bit_pj;
    if (!(e_imc > 0.0)) throw InvalidArgument("nomf_imc energy per bit must be > 0");
    Savings s;
    s.total = e_median / e_imc;
    const auto med = count_resources(Method::median, p);
    const auto nm = count_resources(Method::nomf, p);
    s.approx = nm.reads ? double(med.reads) / double(nm.reads) : double(p.n) * p.n;
    s.imc = s.total / s.approx;
    return s;
}

double throughput_gops(std::uint32_t n, double frame_rate, const CostParams& p) {
    if (n == 0) throw InvalidArgument("kernel size must be > 0");
    if (!(frame_rate >= 0.0)) throw InvalidArgument("frame rate must be >= 0");
    const double n2 = double(n) * n;
    return (n2 - 1.0) * (double(p.pixels()) / n2) * frame_rate * 1e-9;
}

CostReport build_cost_report(const CostParams& p, const EnergyTable& table, const ArrayConfig& array) {
    p.validate();
    CostReport r;
    r.params = p;
    for (Method m : kAllMethods) {
        CostReport::Row row{m, count_resources(m, p), std::nullopt};
        const auto name = to_string(m);
        for (const auto& e : table)
            if (e.method == name) row.energy = energy_latency(m, p, table, array);
        r.rows.push_back(row);
    }
    r.savings = savings_decomposition(p, table);

    ArrayConfig a = array;
    a.rows = p.height;
    a.cols = p.width;
    a.n = 3;
    r.frame_latency_n3 = frame_latency(a);
    a.n = 5;
    r.frame_latency_n5 = frame_latency(a);
    r.throughput_gops_n3 = throughput_gops(3, 1.0 / r.frame_latency_n3, p);
    r.throughput_gops_n5 = throughput_gops(5, 1.0 / r.frame_latency_n5, p);

    const double e_bit = lookup(table, "nomf_imc").energy_per_bit_pj * 1e-12;
    const double n2 = double(p.n) * p.n;
    if (e_bit > 0.0) r.tops_per_w_derived = (n2 - 1.0) / n2 / e_bit * 1e-12;
    return r;
}

nlohmann::json to_json(const CostReport& r) {
    nlohmann::json j;
    const auto& p = r.params;
    j["params"] = {{"width", p.width}, {"height", p.height}, {"D", p.pixels()}, {"n", p.n},
                   {"beta_t", p.beta_t}, {"gamma", p.gamma}, {"alpha", p.alpha}, {"alpha_source", r.alpha_source}};
    nlohmann::json methods = nlohmann::json::object();
    for (const auto& row : r.rows) {
        nlohmann::json m = {{"reads", row.counts.reads}, {"writes", row.counts.writes},
                            {"ops", row.counts.ops}, {"bits", row.counts.bits}};
        if (row.energy) {
            m["energy_per_frame_j"] = row.energy->energy_per_frame;
            m["latency_per_frame_s"] = row.energy->latency_per_frame;
            m["serial_latency_s"] = row.energy->serial_latency;
        }
        methods[std::string(to_string(row.method))] = m;
    }
    j["methods"] = methods;
    j["savings"] = {{"total", r.savings.total}, {"approx", r.savings.approx}, {"imc", r.savings.imc}};
    j["timing"] = {{"frame_latency_n3_s", r.frame_latency_n3},
                   {"frame_latency_n5_s", r.frame_latency_n5},
                   {"frames_per_us_n3", 1e-6 / r.frame_latency_n3},
                   {"frames_per_us_n5", 1e-6 / r.frame_latency_n5}};
    j["throughput_gops"] = {{"n3", r.throughput_gops_n3}, {"n5", r.throughput_gops_n5}};
    j["tops_per_w_derived"] = r.tops_per_w_derived;
    j["reference"] = {{"gops", {r.reference.gops_low, r.reference.gops_high}},
                      {"tops_per_w", {r.reference.tops_per_w_low, r.reference.tops_per_w_high}},
                      {"frames_per_us", {r.reference.frames_per_us_low, r.reference.frames_per_us_high}}};
    j["notes"] = {
        "frames_per_us_n5 follows from 2*ceil(H/n) cycles and exceeds the published 1.66 upper figure",
        "published TOPS/W range is not reproducible from the per-bit energy; tops_per_w_derived shows the arithmetic"};
    return j;
}

void write_table(std::ostream& out, const CostReport& r) {
    const auto& p = r.params;
    out << "D = " << p.width << "x" << p.height << " = " << p.pixels() << ", n = " << p.n << ", beta_t = " << p.beta_t
        << ", gamma = " << p.gamma << ", alpha = " << p.alpha << " (" << r.alpha_source << ")\n\n";
    out << std::left << std::setw(10) << "method" << std::right << std::setw(12) << "reads" << std::setw(12)
        << "writes" << std::setw(12) << "ops" << std::setw(12) << "bits" << std::setw(16) << "energy/frame"
        << std::setw(16) << "latency/frame" << '\n';
    for (const auto& row : r.rows) {
        out << std::left << std::setw(10) << to_string(row.method) << std::right << std::setw(12) << row.counts.reads
            << std::setw(12) << row.counts.writes << std::setw(12) << row.counts.ops << std::setw(12)
            << row.counts.bits;
        if (row.energy) {
            std::ostringstream e, l;
            e << std::setprecision(4) << row.energy->energy_per_frame << " J";
            l << std::setprecision(4) << row.energy->latency_per_frame << " s";
            out << std::setw(16) << e.str() << std::setw(16) << l.str();
        } else {
            out << std::setw(16) << "-" << std::setw(16) << "-";
        }
        out << '\n';
    }
    out << std::setprecision(6);
    out << "\nenergy saving: total " << r.savings.total << "x = approx " << r.savings.approx << "x * imc "
        << r.savings.imc << "x\n";
    out << "frame latency: n=3 " << r.frame_latency_n3 * 1e6 << " us (" << 1e-6 / r.frame_latency_n3
        << " frames/us), n=5 " << r.frame_latency_n5 * 1e6 << " us (" << 1e-6 / r.frame_latency_n5
        << " frames/us)\n";
    out << "throughput: n=3 " << r.throughput_gops_n3 << " GOPS, n=5 " << r.throughput_gops_n5 << " GOPS (reference "
        << r.reference.gops_low << "-" << r.reference.gops_high << ")\n";
    out << "energy efficiency from per-bit energy: " << r.tops_per_w_derived << " TOPS/W (reference "
        << r.reference.tops_per_w_low << "-" << r.reference.tops_per_w_high << ", not reproducible)\n";
}

} // namespace nomf
