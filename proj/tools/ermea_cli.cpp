// ermea_cli.cpp: Command-line entry point

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ermea/errors.hpp"
#include "ermea/runner.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Steady-state transport through interacting fermionic systems"};
    std::string config;
    ermea::RunOptions opt;
    std::string variant;
    std::string level = "info";
    app.add_option("config", config, "run configuration (JSON)")->required();
    app.add_option("-o,--out", opt.out_dir, "output directory");
    app.add_option("-j,--workers", opt.workers, "parallel sweep workers")->check(CLI::PositiveNumber);
    app.add_option("--log-level", level, "error, warn, info or debug");
    app.add_option("--variant", variant, "override the configured variants (CRB, PERLind, DL)");
    app.add_flag("--dump-generator", opt.dump_generator, "write each final generator as CSV");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : ermea::kExitConfig;
    }
    try {
        opt.log_level = ermea::parse_log_level(level);
        if (!variant.empty()) opt.variant_override = ermea::parse_variant(variant);
    } catch (const std::exception& e) {
        std::cerr << "[error] " << e.what() << '\n';
        return ermea::kExitConfig;
    }
    try {
        return ermea::run(config, opt);
    } catch (const ermea::CapacityError& e) {
        std::cerr << "[error] capacity: " << e.what() << '\n';
        return ermea::kExitCapacity;
    } catch (const std::exception& e) {
        std::cerr << "[error] " << e.what() << '\n';
        return ermea::kExitFailure;
    }
}
