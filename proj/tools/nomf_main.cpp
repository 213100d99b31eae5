#include <chrono>
#include <ctime>
#include <iostream>
#include <random>

#include "commands.hpp"
#include "nomf/error.hpp"
#include "nomf/simd/kernels.hpp"

int main(int argc, char** argv) {
    using namespace nomf::cli;
    CLI::App app{"Event-camera denoising with non-overlapping median filters and an SRAM in-memory model", "nomf"};
    app.set_version_flag("--version", NOMF_VERSION);
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();

    std::vector<Subcommand> subs;
    add_gen(app, subs);
    add_frame(app, subs);
    add_denoise(app, subs);
    add_cost(app, subs);
    add_mc(app, subs);
    add_eval(app, subs);

    std::vector<std::string> args(argv, argv + argc);
    try {
        if (args.size() > 2)
            if (const CLI::App* sub = app.get_subcommand_no_throw(args[1])) args = expand_config(args, *sub);
    } catch (const std::exception& e) {
        std::cerr << "nomf: error: " << e.what() << '\n';
        return 2;
    }

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
        app.parse(std::move(rev));
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    for (auto& s : subs) {
        if (!s.app->parsed()) continue;
        const auto& c = *s.common;
        const bool seeded = c.seed.has_value();
        const std::uint64_t seed = seeded ? *c.seed : (std::uint64_t{std::random_device{}()} << 32) ^ std::random_device{}();

        nlohmann::json m;
        m["tool"] = "nomf";
        m["version"] = NOMF_VERSION;
        m["command"] = s.app->get_name();
        m["argv"] = std::vector<std::string>(args.begin() + 1, args.end());
        m["config"] = resolved_options(*s.app);
        m["config"]["seed"] = seed;
        m["seed"] = seed;
        m["seed_source"] = seeded ? "argument" : "random";
        m["threads"] = c.threads;
        m["simd_backend"] = nomf::simd::active().name;
        const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        char stamp[32];
        std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        m["started_utc"] = stamp;
        m["inputs"] = nlohmann::json::array();
        m["outputs"] = nlohmann::json::array();
        try {
            const auto t0 = std::chrono::steady_clock::now();
            const int rc = s.run(c, seed, m);
            m["elapsed_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            if (!m["outputs"].empty()) write_manifest(m["outputs"][0].get<std::string>(), m);
            return rc;
        } catch (const std::exception& e) {
            std::cerr << "nomf " << s.app->get_name() << ": error: " << e.what() << '\n';
            return 1;
        }
    }
    return 0;
}
