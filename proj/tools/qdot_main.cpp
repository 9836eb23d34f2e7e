// Command-line front end for the coupled-dot charge-qubit simulator.
//
// Exit status: 0 success, 1 computational failure, 2 configuration or
// usage error.

#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qdot/cli.hpp"
#include "qdot/config.hpp"

int main(int argc, char** argv) {
    CLI::App app{"coupled quantum-dot charge-qubit device simulator"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir;
    std::string seed_preset = "default";
    int threads = -1;
    std::string bits;

    app.add_option("--config", config_path, "JSON configuration file");
    app.add_option("--out", out_dir, "output directory (overrides the config)");
    app.add_option("--threads", threads, "worker threads, 0 = all hardware threads");
    app.add_option("--seed-preset", seed_preset,
                   "built-in parameter set seeding the defaults (default, close-packed)");

    auto* scan = app.add_subcommand("scan", "map the levels against gate bias for both control states");
    auto* cnot = app.add_subcommand("cnot", "run one controlled-NOT on a basis register");
    cnot->add_option("initial", bits, "two-bit initial register, e.g. 10")->required();
    auto* dynamics = app.add_subcommand("dynamics", "two-state pulse timing and population traces");
    auto* budget = app.add_subcommand("budget", "decoherence and measurement-time budgets");
    auto* report = app.add_subcommand("report", "run every stage into one output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        std::optional<std::filesystem::path> file;
        if (!config_path.empty()) file = config_path;
        qdot::json effective = qdot::effective_config(seed_preset, file);
        if (!out_dir.empty()) effective["output"]["dir"] = out_dir;
        if (threads >= 0) effective["threads"] = threads;
        const qdot::RunConfig cfg = qdot::load_config(effective);

        if (*scan) qdot::cli::cmd_scan(cfg, std::cout);
        if (*cnot) qdot::cli::cmd_cnot(cfg, bits, std::cout);
        if (*dynamics) qdot::cli::cmd_dynamics(cfg, std::cout);
        if (*budget) qdot::cli::cmd_budget(cfg, std::cout);
        if (*report) qdot::cli::cmd_report(cfg, effective, std::cout);
        return 0;
    } catch (const qdot::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
