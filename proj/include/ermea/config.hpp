// config.hpp: Run configuration (JSON) and its validation

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ermea/bath.hpp"
#include "ermea/ermea.hpp"
#include "ermea/fockspace.hpp"

namespace ermea {

struct LeadConfig {
    LeadSpec lead;
    double bias_factor = 0.0; // mu = lead.mu + bias_factor * V_B
};

struct OutputConfig {
    bool spectrum = true;
    bool quality_json = true;
    bool trace = true;
    bool occupations = false;
    bool negf = false;
    int transmission_samples = 0;
};

struct ErrorAnalysisConfig {
    bool enabled = false;
    std::vector<double> delta_E;   // partial-secular gaps; a negative entry means "no cut"
    std::vector<double> delta;     // ERMEA tolerances
    std::size_t max_full_dimension = 300000;
};

struct RunConfig {
    std::string name;
    SystemSpec system;
    std::vector<LeadConfig> leads;
    ErmeaConfig ermea;
    bool truncate = true;          // false: solve on the whole (partial-secular) index set
    std::vector<double> sweep;     // V_B values [V]
    std::vector<Variant> variants;
    OutputConfig outputs;
    ErrorAnalysisConfig error_analysis;
    QuadratureConfig quadrature;

    std::vector<LeadSpec> leads_at(double V_B) const;
};

// Throws ConfigError naming the offending key path.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

// FNV-1a 64-bit of the raw config text, hex
std::string config_hash(const std::string& text);

} // namespace ermea
