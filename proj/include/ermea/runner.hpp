// runner.hpp: Sweep orchestration, error analysis and artifact output

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ermea/config.hpp"
#include "ermea/generators.hpp"

namespace ermea {

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };
LogLevel parse_log_level(const std::string& s);

struct RunOptions {
    std::string out_dir = "out";
    int workers = 1;
    std::optional<Variant> variant_override;
    bool dump_generator = false;
    LogLevel log_level = LogLevel::Info;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNonConvergence = 3;
inline constexpr int kExitCapacity = 4;

// Runs the sweep described by the config file and writes all artifacts; returns the exit code.
int run(const std::string& config_path, const RunOptions& options);

struct ErrorAnalysisRow {
    Variant variant = Variant::CRB;
    double V_B = 0.0;
    std::optional<double> delta_E;
    double delta = 0.0;
    double dsigma_ps = 0.0;       // partial secular vs full
    double dsigma_E = 0.0;        // truncated vs partial secular
    double dsigma_combined = 0.0; // truncated vs full
    int N_full = 0;
    int N_ps = 0;
    int N_ermea = 0;
    double nu_c = 0.0;
};

// Hilbert-Schmidt distances between full, partial-secular and truncated steady states.
std::vector<ErrorAnalysisRow> error_analysis(const RunConfig& config, Variant variant, const Model& base);

} // namespace ermea
