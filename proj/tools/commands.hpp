#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

namespace nomf::cli {

// Options every subcommand shares.
struct Common {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
};

struct Subcommand {
    CLI::App* app = nullptr;
    std::shared_ptr<Common> common = std::make_shared<Common>();
    std::function<int(const Common&, std::uint64_t seed, nlohmann::json& manifest)> run;
};

void add_gen(CLI::App& root, std::vector<Subcommand>& subs);
void add_frame(CLI::App& root, std::vector<Subcommand>& subs);
void add_denoise(CLI::App& root, std::vector<Subcommand>& subs);
void add_cost(CLI::App& root, std::vector<Subcommand>& subs);
void add_mc(CLI::App& root, std::vector<Subcommand>& subs);
void add_eval(CLI::App& root, std::vector<Subcommand>& subs);

/// Rewrites argv so that values from `--config <json>` appear before the
/// command-line options of the selected subcommand. Keys given explicitly on
/// the command line are not taken from the file.
std::vector<std::string> expand_config(const std::vector<std::string>& args, const CLI::App& sub);

/// Resolved option values of a subcommand, keyed by long option name.
nlohmann::json resolved_options(const CLI::App& app);

/// Writes `<output>.manifest.json`.
void write_manifest(const std::string& output, const nlohmann::json& manifest);

} // namespace nomf::cli
