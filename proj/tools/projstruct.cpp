#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "projstruct/errors.hpp"
#include "projstruct/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitCap = 3;

nlohmann::json load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw projstruct::ConfigError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        // e.what() already carries the line and column
        throw projstruct::ConfigError(path + ": " + e.what());
    }
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw projstruct::ConfigError("cannot open output '" + path + "'");
    out << content;
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Projection-structure selection, uncertainty quantification and simulation"};
    app.require_subcommand(1, 1);

    std::string config_path, out_path;
    std::uint64_t seed = 0;
    int workers = 1;
    for (const char* name : {"select", "simulate", "check"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON config file")->required();
        sub->add_option("--out", out_path, "output file")->required();
        sub->add_option("--seed", seed, "master seed")->default_val(0);
        sub->add_option("--workers", workers, "worker threads")->default_val(1)->check(CLI::PositiveNumber);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        const auto config = load_config(config_path);
        const auto hash = projstruct::config_hash(config);
        if (command == "select") {
            const auto base = std::filesystem::path(config_path).parent_path().string();
            const auto result = projstruct::run_select(config, seed, base.empty() ? "." : base);
            write_file(out_path, result.dump(2) + "\n");
        } else if (command == "simulate") {
            write_file(out_path, projstruct::to_csv(projstruct::run_simulate(config, seed, workers), seed, hash));
        } else {
            write_file(out_path, projstruct::to_csv(projstruct::run_check(config, seed, workers), seed, hash));
        }
    } catch (const projstruct::CapExceeded& e) {
        std::cerr << "cap exceeded: " << e.what() << "\n";
        return kExitCap;
    } catch (const projstruct::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const projstruct::ContractError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const projstruct::Unsupported& e) {
        std::cerr << "unsupported: " << e.what() << "\n";
        return kExitConfig;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitOk;
}
