// config.cpp: JSON run configuration

#include "ermea/config.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "ermea/errors.hpp"

namespace ermea {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg)
{
    throw ConfigError(path + ": " + msg);
}

const json& require(const json& j, const std::string& key, const std::string& path)
{
    if (!j.is_object()) fail(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) fail(path + "." + key, "missing required key");
    return *it;
}

double get_number(const json& j, const std::string& path)
{
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

double number_or(const json& j, const std::string& key, const std::string& path, double def)
{
    auto it = j.find(key);
    return it == j.end() ? def : get_number(*it, path + "." + key);
}

bool bool_or(const json& j, const std::string& key, const std::string& path, bool def)
{
    auto it = j.find(key);
    if (it == j.end()) return def;
    if (!it->is_boolean()) fail(path + "." + key, "expected true or false");
    return it->get<bool>();
}

int int_or(const json& j, const std::string& key, const std::string& path, int def)
{
    auto it = j.find(key);
    if (it == j.end()) return def;
    if (!it->is_number_integer()) fail(path + "." + key, "expected an integer");
    return it->get<int>();
}

Eigen::MatrixXd matrix(const json& j, int n, const std::string& path)
{
    if (!j.is_array() || static_cast<int>(j.size()) != n) fail(path, "expected " + std::to_string(n) + " rows");
    Eigen::MatrixXd m(n, n);
    for (int r = 0; r < n; ++r) {
        const auto rp = path + "[" + std::to_string(r) + "]";
        if (!j[r].is_array() || static_cast<int>(j[r].size()) != n)
            fail(rp, "expected " + std::to_string(n) + " entries");
        for (int c = 0; c < n; ++c) m(r, c) = get_number(j[r][c], rp + "[" + std::to_string(c) + "]");
    }
    return m;
}

std::vector<double> number_list(const json& j, const std::string& path)
{
    if (!j.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> v;
    for (std::size_t k = 0; k < j.size(); ++k) v.push_back(get_number(j[k], path + "[" + std::to_string(k) + "]"));
    return v;
}

template <class F>
void wrap_validation(const std::string& path, F&& f)
{
    try {
        f();
    } catch (const ValidationError& e) {
        fail(path, e.what());
    }
}

} // namespace

std::vector<LeadSpec> RunConfig::leads_at(double V_B) const
{
    std::vector<LeadSpec> out;
    for (const auto& l : leads) {
        LeadSpec s = l.lead;
        s.mu = l.lead.mu + l.bias_factor * V_B;
        out.push_back(s);
    }
    return out;
}

RunConfig parse_config(const std::string& text)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        fail("$", std::string("not valid JSON: ") + e.what());
    }
    RunConfig c;
    if (!root.is_object()) fail("$", "expected an object");
    if (auto it = root.find("name"); it != root.end() && it->is_string()) c.name = it->get<std::string>();

    // system
    const auto& sys = require(root, "system", "$");
    const auto& sites = require(sys, "sites", "$.system");
    if (!sites.is_number_integer() || sites.get<int>() < 1) fail("$.system.sites", "expected a positive integer");
    c.system.sites = sites.get<int>();
    c.system.spinful = bool_or(sys, "spinful", "$.system", false);
    c.system.T = matrix(require(sys, "T", "$.system"), c.system.sites, "$.system.T");
    if (sys.contains("U")) c.system.U = matrix(sys["U"], c.system.sites, "$.system.U");
    else c.system.U = Eigen::MatrixXd::Zero(c.system.sites, c.system.sites);
    c.system.interaction_shift = bool_or(sys, "interaction_shift", "$.system", true);
    wrap_validation("$.system", [&] { c.system.validate(); });

    // leads
    const auto& leads = require(root, "leads", "$");
    if (!leads.is_array() || leads.empty()) fail("$.leads", "expected a non-empty array");
    for (std::size_t a = 0; a < leads.size(); ++a) {
        const auto p = "$.leads[" + std::to_string(a) + "]";
        const auto& lj = leads[a];
        LeadConfig lc;
        lc.lead.id = lj.contains("id") && lj["id"].is_string() ? lj["id"].get<std::string>() : "lead" + std::to_string(a);
        lc.lead.t_B = number_or(lj, "t_B", p, 6.0);
        lc.lead.eps_B = number_or(lj, "eps_B", p, 0.0);
        lc.lead.beta = number_or(lj, "beta", p, 20.0);
        lc.lead.mu = number_or(lj, "mu", p, 0.0);
        const double def_factor = leads.size() == 2 ? (a == 0 ? -0.5 : 0.5) : 0.0;
        lc.bias_factor = number_or(lj, "bias_factor", p, def_factor);
        const auto cv = number_list(require(lj, "coupling", p), p + ".coupling");
        lc.lead.coupling = Eigen::Map<const Eigen::VectorXd>(cv.data(), static_cast<Eigen::Index>(cv.size()));
        wrap_validation(p, [&] { lc.lead.validate(c.system.sites); });
        c.leads.push_back(std::move(lc));
    }

    // ermea
    if (root.contains("ermea")) {
        const auto& e = root["ermea"];
        const std::string p = "$.ermea";
        if (!e.is_object()) fail(p, "expected an object");
        c.ermea.delta = number_or(e, "delta", p, 1e-6);
        if (e.contains("delta_E") && !e["delta_E"].is_null()) c.ermea.delta_E = get_number(e["delta_E"], p + ".delta_E");
        c.ermea.E2_offset = number_or(e, "E2_offset", p, 80.0);
        c.ermea.growth = int_or(e, "growth", p, 1);
        c.ermea.max_dimension = int_or(e, "max_dimension", p, 400000);
        c.ermea.lamb_shift = bool_or(e, "lamb_shift", p, true);
        c.ermea.quality.dense_crossover = int_or(e, "dense_crossover", p, 600);
        c.ermea.quality.nu_p = bool_or(e, "nu_p", p, false);
        c.ermea.quality.nu_p_time = number_or(e, "nu_p_time", p, 0.0);
        c.ermea.quality.nu_p_cap = int_or(e, "nu_p_cap", p, 4096);
        if (e.contains("partial_thresholds"))
            c.ermea.quality.partial_thresholds = number_list(e["partial_thresholds"], p + ".partial_thresholds");
        c.truncate = bool_or(e, "truncate", p, true);
        wrap_validation(p, [&] { c.ermea.validate(); });
    }

    // quadrature
    if (root.contains("quadrature")) {
        const auto& q = root["quadrature"];
        c.quadrature.abs_tol = number_or(q, "abs_tol", "$.quadrature", 1e-10);
        c.quadrature.cache_resolution = number_or(q, "cache_resolution", "$.quadrature", 1e-12);
    }

    // sweep
    const auto& sw = require(root, "sweep", "$");
    if (sw.is_array()) {
        c.sweep = number_list(sw, "$.sweep");
    } else if (sw.is_object() && sw.contains("V_B")) {
        c.sweep = number_list(sw["V_B"], "$.sweep.V_B");
    } else if (sw.is_object() && sw.contains("from")) {
        const double from = get_number(sw["from"], "$.sweep.from");
        const double to = number_or(sw, "to", "$.sweep", from);
        const int steps = int_or(sw, "steps", "$.sweep", 1);
        if (steps < 1) fail("$.sweep.steps", "expected >= 1");
        for (int k = 0; k < steps; ++k) c.sweep.push_back(steps == 1 ? from : from + (to - from) * k / (steps - 1));
    } else {
        fail("$.sweep", "expected a list of V_B values, {\"V_B\": [...]} or {\"from\", \"to\", \"steps\"}");
    }
    if (c.sweep.empty()) fail("$.sweep", "sweep is empty");

    // variants
    if (root.contains("variants")) {
        const auto& v = root["variants"];
        if (!v.is_array()) fail("$.variants", "expected an array of names");
        for (std::size_t k = 0; k < v.size(); ++k) {
            const auto p = "$.variants[" + std::to_string(k) + "]";
            if (!v[k].is_string()) fail(p, "expected a string");
            wrap_validation(p, [&] { c.variants.push_back(parse_variant(v[k].get<std::string>())); });
        }
        if (c.variants.empty()) fail("$.variants", "at least one variant required");
    } else {
        c.variants.push_back(c.ermea.variant);
    }
    c.ermea.variant = c.variants.front();

    // outputs
    if (root.contains("outputs")) {
        const auto& o = root["outputs"];
        const std::string p = "$.outputs";
        c.outputs.spectrum = bool_or(o, "spectrum", p, true);
        c.outputs.quality_json = bool_or(o, "quality_json", p, true);
        c.outputs.trace = bool_or(o, "trace", p, true);
        c.outputs.occupations = bool_or(o, "occupations", p, false);
        c.outputs.negf = bool_or(o, "negf", p, false);
        c.outputs.transmission_samples = int_or(o, "transmission_samples", p, 0);
    }

    // error analysis
    if (root.contains("error_analysis")) {
        const auto& ea = root["error_analysis"];
        const std::string p = "$.error_analysis";
        c.error_analysis.enabled = bool_or(ea, "enabled", p, true);
        if (ea.contains("delta_E")) c.error_analysis.delta_E = number_list(ea["delta_E"], p + ".delta_E");
        if (ea.contains("delta")) c.error_analysis.delta = number_list(ea["delta"], p + ".delta");
        c.error_analysis.max_full_dimension =
            static_cast<std::size_t>(number_or(ea, "max_full_dimension", p, 300000));
        if (c.error_analysis.enabled && (c.error_analysis.delta_E.empty() || c.error_analysis.delta.empty()))
            fail(p, "delta_E and delta lists are required");
    }
    return c;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream f(path);
    if (!f) throw ConfigError(path + ": cannot open config file");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

std::string config_hash(const std::string& text)
{
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace ermea
