#include "doctest.h"

#include <fstream>
#include <sstream>

#include "nomf/cost_model.hpp"
#include "nomf/error.hpp"

using namespace nomf;

TEST_SUITE("cost_model") {

TEST_CASE("resource counts at the default operating point") {
    const CostParams p;
    REQUIRE(p.pixels() == 76800);
    CHECK(count_resources(Method::nn_filt, p) == ResourceCounts{1658880, 184320, 103680, 1228800});
    CHECK(count_resources(Method::median, p) == ResourceCounts{691200, 76800, 691200, 153600});
    CHECK(count_resources(Method::nomf, p) == ResourceCounts{76800, 76800, 76800, 76800});
    CHECK(count_resources(Method::nomf_imc, p) == ResourceCounts{25600, 2765, 0, 76800});
}

TEST_CASE("counts for n = 5") {
    CostParams p;
    p.n = 5;
    CHECK(count_resources(Method::median, p).reads == 25 * 76800);
    CHECK(count_resources(Method::nomf_imc, p).reads == 15360);
    CHECK(count_resources(Method::nn_filt, p).ops == ceil_count(0.15 * 25 * 76800));
}

TEST_CASE("ceil_count absorbs rounding noise but rounds genuine fractions up") {
    CHECK(ceil_count(0.0) == 0);
    CHECK(ceil_count(-3.0) == 0);
    CHECK(ceil_count(2764.8) == 2765);
    CHECK(ceil_count(0.15 * 9 * 76800) == 103680);
    CHECK(ceil_count(10.000000000001) == 10);
    CHECK(ceil_count(10.001) == 11);
}

TEST_CASE("an empty sensor costs nothing") {
    CostParams p;
    p.width = 0;
    for (Method m : kAllMethods) CHECK(count_resources(m, p) == ResourceCounts{});
}

TEST_CASE("counts scale linearly with the pixel count") {
    CostParams a, b;
    b.width = 640;
    for (Method m : kAllMethods) {
        const auto x = count_resources(m, a), y = count_resources(m, b);
        CHECK(y.reads == 2 * x.reads);
        CHECK(y.ops == 2 * x.ops);
        CHECK(y.bits == 2 * x.bits);
        // writes for nomf_imc round up separately, so allow one count of slack
        CHECK(y.writes <= 2 * x.writes);
        CHECK(y.writes + 1 >= 2 * x.writes);
    }
}

TEST_CASE("per-frame energy and latency") {
    const CostParams p;
    const auto& t = default_energy_table();
    const auto med = energy_latency(Method::median, p, t);
    CHECK(med.energy_per_frame == doctest::Approx(17.51e-6).epsilon(1e-3));
    CHECK(med.latency_per_frame == doctest::Approx(95e-9 * 76800));
    const auto imc = energy_latency(Method::nomf_imc, p, t);
    CHECK(imc.energy_per_frame == doctest::Approx(8.45e-9).epsilon(1e-3));
    CHECK(imc.latency_per_frame == doctest::Approx(0.8e-6));
    CHECK(imc.serial_latency == doctest::Approx(0.768e-6));
    CHECK_THROWS_AS(energy_latency(Method::nomf, p, t), InvalidArgument);
}

TEST_CASE("energy saving decomposes into approximation and in-memory factors") {
    const auto s = savings_decomposition(CostParams{}, default_energy_table());
    CHECK(s.total == doctest::Approx(228.0 / 0.11));
    CHECK(s.approx == doctest::Approx(9.0));
    CHECK(s.imc == doctest::Approx(228.0 / 0.11 / 9.0));
    CHECK(s.approx * s.imc == doctest::Approx(s.total));
}

TEST_CASE("throughput") {
    const CostParams p;
    CHECK(throughput_gops(3, 1.25e6, p) == doctest::Approx(85.3).epsilon(1e-3));
    CHECK(throughput_gops(5, 1.0 / 0.48e-6, p) == doctest::Approx(153.6).epsilon(1e-3));
    CHECK(throughput_gops(3, 0.0, p) == 0.0);
    CHECK_THROWS_AS(throughput_gops(3, -1.0, p), InvalidArgument);
    const auto r = build_cost_report(p, default_energy_table());
    CHECK(r.throughput_gops_n3 == doctest::Approx(85.33).epsilon(1e-3));
    CHECK(r.throughput_gops_n5 == doctest::Approx(153.6).epsilon(1e-3));
    CHECK(r.tops_per_w_derived == doctest::Approx(8.0 / 9.0 / 0.11));
}

TEST_CASE("parameter validation and method names") {
    CostParams p;
    p.n = 4;
    CHECK_THROWS_AS(count_resources(Method::nomf, p), InvalidArgument);
    p.n = 3;
    p.gamma = 1.5;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    for (Method m : kAllMethods) CHECK(parse_method(to_string(m)) == m);
    CHECK_THROWS_AS(parse_method("sobel"), InvalidArgument);
}

TEST_CASE("energy table json round-trip and the shipped config") {
    const auto& t = default_energy_table();
    const auto back = energy_table_from_json(energy_table_to_json(t));
    REQUIRE(back.size() == t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(back[i].method == t[i].method);
        CHECK(back[i].energy_per_bit_pj == t[i].energy_per_bit_pj);
        CHECK(back[i].latency_per_bit_ns == t[i].latency_per_bit_ns);
    }
    std::ifstream f(NOMF_SOURCE_DIR "/config/energy_table.json");
    REQUIRE(f);
    const auto shipped = energy_table_from_json(nlohmann::json::parse(f));
    REQUIRE(shipped.size() == t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(shipped[i].method == t[i].method);
        CHECK(shipped[i].energy_per_bit_pj == t[i].energy_per_bit_pj);
        CHECK(shipped[i].area_per_cell_um2 == t[i].area_per_cell_um2);
    }
    CHECK_THROWS_AS(energy_table_from_json(nlohmann::json::parse(R"({"entries":[{"method":"x"}]})")), ParseError);
}

TEST_CASE("report output") {
    const auto r = build_cost_report(CostParams{}, default_energy_table());
    const auto j = to_json(r);
    CHECK(j["methods"]["median"]["reads"] == 691200);
    CHECK(j["methods"]["nomf_imc"]["writes"] == 2765);
    CHECK_FALSE(j["methods"]["nomf"].contains("energy_per_frame_j"));
    std::ostringstream s;
    write_table(s, r);
    CHECK(s.str().find("nomf_imc") != std::string::npos);
}

} // TEST_SUITE
