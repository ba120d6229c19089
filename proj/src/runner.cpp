// runner.cpp: Sweep execution and artifact writers

#include "ermea/runner.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "ermea/ermea.hpp"
#include "ermea/errors.hpp"
#include "ermea/negf.hpp"
#include "ermea/observables.hpp"

namespace ermea {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

LogLevel g_level = LogLevel::Info;
std::mutex g_log_mutex;

void log(LogLevel lv, const std::string& msg)
{
    if (static_cast<int>(lv) > static_cast<int>(g_level)) return;
    static const char* names[] = {"error", "warn", "info", "debug"};
    std::lock_guard<std::mutex> lock(g_log_mutex);
    std::cerr << "[" << names[static_cast<int>(lv)] << "] " << msg << '\n';
}

std::ofstream open_out(const fs::path& p)
{
    std::ofstream f(p);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << std::setprecision(15);
    return f;
}

double finite_or_null(double x)
{
    return std::isfinite(x) ? x : std::numeric_limits<double>::quiet_NaN();
}

json report_json(const QualityReport& q)
{
    json j;
    j["nu_c"] = q.nu_c;
    j["lambda2"] = finite_or_null(q.lambda2);
    j["nu_t"] = q.nu_t;
    j["nu_t_partial"] = json::array();
    for (const auto& [E, v] : q.nu_t_partial) j["nu_t_partial"].push_back({{"E", E}, {"nu_t", v}});
    j["nu_h"] = q.nu_h;
    j["nu_m"] = q.nu_m;
    j["nu_mt"] = q.nu_mt;
    j["nu_tc"] = q.nu_tc;
    if (q.nu_p) {
        j["nu_p"] = *q.nu_p;
        j["nu_p_time"] = q.nu_p_time;
    }
    j["N"] = q.N;
    j["n"] = q.n;
    j["threshold"] = std::isfinite(q.threshold) ? json(q.threshold) : json("inf");
    return j;
}

struct PointResult {
    bool done = false;
    bool converged = false;
    std::string error;
    int exit_code = kExitOk;
    ObservableSet obs;
    QualityReport report;
    std::vector<TraceRow> trace;
    std::vector<std::string> warnings;
    double seconds = 0.0;
};

SteadyState solve_point(const RunConfig& cfg, Variant v, const Model& model)
{
    ErmeaConfig ec = cfg.ermea;
    ec.variant = v;
    if (v == Variant::DL) ec.delta_E = 0.0;
    if (cfg.truncate) return run_ermea(model, ec);
    return steady_state_on(model, v, build_index_set(model.spectrum, ec.delta_E, std::nullopt, model.mu_bar,
                                                     ec.E2_offset),
                           ec.quality, ec.lamb_shift);
}

std::string fmt_delta_E(const std::optional<double>& d)
{
    if (!d) return "inf";
    std::ostringstream s;
    s << std::setprecision(15) << *d;
    return s.str();
}

} // namespace

LogLevel parse_log_level(const std::string& s)
{
    if (s == "error") return LogLevel::Error;
    if (s == "warn") return LogLevel::Warn;
    if (s == "info") return LogLevel::Info;
    if (s == "debug") return LogLevel::Debug;
    throw ConfigError("log level must be one of error, warn, info, debug");
}

std::vector<ErrorAnalysisRow> error_analysis(const RunConfig& cfg, Variant v, const Model& base)
{
    std::vector<ErrorAnalysisRow> rows;
    const int n = base.spectrum.size();
    for (double V_B : cfg.sweep) {
        const Model model = recouple(base, cfg.leads_at(V_B), cfg.quadrature);
        // DL only exists on the secular index set, which is then its own reference
        const std::optional<double> full_gap = v == Variant::DL ? std::optional<double>(0.0) : std::nullopt;
        IndexSet full = build_index_set(model.spectrum, full_gap, std::nullopt, model.mu_bar, cfg.ermea.E2_offset);
        if (static_cast<std::size_t>(full.size()) > cfg.error_analysis.max_full_dimension)
            throw CapacityError("error analysis needs the untruncated generator (" + std::to_string(full.size())
                                + " entries); use the spinless variant of the model");
        const int N_full = full.size();
        const auto s_full = steady_state_on(model, v, std::move(full), cfg.ermea.quality, cfg.ermea.lamb_shift, false);
        const Eigen::MatrixXcd d_full = s_full.dense(n);
        const std::vector<double> gaps = v == Variant::DL ? std::vector<double>{0.0} : cfg.error_analysis.delta_E;
        for (double dE : gaps) {
            const std::optional<double> gap = dE < 0.0 ? std::nullopt : std::optional<double>(dE);
            const auto s_ps = steady_state_on(model, v,
                                              build_index_set(model.spectrum, gap, std::nullopt, model.mu_bar,
                                                              cfg.ermea.E2_offset),
                                              cfg.ermea.quality, cfg.ermea.lamb_shift, false);
            const Eigen::MatrixXcd d_ps = s_ps.dense(n);
            for (double delta : cfg.error_analysis.delta) {
                ErmeaConfig ec = cfg.ermea;
                ec.variant = v;
                ec.delta = delta;
                ec.delta_E = gap;
                const auto s_E = run_ermea(model, ec);
                const Eigen::MatrixXcd d_E = s_E.dense(n);
                ErrorAnalysisRow r;
                r.variant = v;
                r.V_B = V_B;
                r.delta_E = gap;
                r.delta = delta;
                r.dsigma_ps = (d_ps - d_full).norm();
                r.dsigma_E = (d_E - d_ps).norm();
                r.dsigma_combined = (d_E - d_full).norm();
                r.N_full = N_full;
                r.N_ps = s_ps.index().size();
                r.N_ermea = s_E.index().size();
                r.nu_c = s_E.report.nu_c;
                rows.push_back(r);
            }
        }
    }
    return rows;
}

int run(const std::string& config_path, const RunOptions& opt)
{
    g_level = opt.log_level;
    std::string text;
    RunConfig cfg;
    try {
        std::ifstream f(config_path);
        if (!f) throw ConfigError(config_path + ": cannot open config file");
        std::stringstream ss;
        ss << f.rdbuf();
        text = ss.str();
        cfg = parse_config(text);
    } catch (const ConfigError& e) {
        log(LogLevel::Error, std::string("config error: ") + e.what());
        return kExitConfig;
    }
    if (opt.variant_override) cfg.variants = {*opt.variant_override};
    const std::string hash = config_hash(text);
    const fs::path out = opt.out_dir;
    fs::create_directories(out);

    Model base;
    try {
        base = build_model(cfg.system, cfg.leads_at(cfg.sweep.front()), cfg.quadrature);
    } catch (const CapacityError& e) {
        log(LogLevel::Error, std::string("capacity: ") + e.what());
        return kExitCapacity;
    }
    log(LogLevel::Info, "model: " + std::to_string(base.spectrum.size()) + " eigenstates in "
                            + std::to_string(base.spectrum.sectors()) + " sectors");

    if (cfg.outputs.spectrum) {
        auto f = open_out(out / "spectrum.csv");
        write_spectrum_csv(f, base.spectrum, base.chi);
    }

    struct Task {
        Variant v;
        int k;
    };
    std::vector<Task> tasks;
    for (Variant v : cfg.variants)
        for (int k = 0; k < static_cast<int>(cfg.sweep.size()); ++k) tasks.push_back({v, k});
    std::vector<PointResult> results(tasks.size());
    std::mutex dump_mutex;
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        while (true) {
            const std::size_t t = next++;
            if (t >= tasks.size()) return;
            const auto [v, k] = tasks[t];
            const double V_B = cfg.sweep[k];
            auto& res = results[t];
            const auto t0 = std::chrono::steady_clock::now();
            try {
                const Model model = recouple(base, cfg.leads_at(V_B), cfg.quadrature);
                std::shared_ptr<SteadyState> ss;
                try {
                    ss = std::make_shared<SteadyState>(solve_point(cfg, v, model));
                    res.converged = true;
                } catch (const NonConvergenceError& e) {
                    log(LogLevel::Warn, to_string(v) + " V_B=" + std::to_string(V_B) + ": " + e.what());
                    ss = e.best;
                    res.converged = false;
                    res.exit_code = kExitNonConvergence;
                }
                res.obs = observables(*ss, model);
                res.report = ss->report;
                res.trace = ss->trace;
                res.warnings = ss->warnings;
                if (opt.dump_generator) {
                    std::lock_guard<std::mutex> lock(dump_mutex);
                    const std::string stem = "generator_" + to_string(v) + "_" + std::to_string(k);
                    dump_generator(ss->built.gen, (out / (stem + ".csv")).string(),
                                   (out / (stem + "_index.csv")).string());
                }
                res.done = true;
            } catch (const CapacityError& e) {
                res.error = e.what();
                res.exit_code = kExitCapacity;
            } catch (const std::exception& e) {
                res.error = e.what();
                res.exit_code = kExitFailure;
            }
            res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            log(LogLevel::Info, to_string(v) + " V_B=" + std::to_string(V_B) + " done in "
                                    + std::to_string(res.seconds) + " s"
                                    + (res.error.empty() ? "" : " (error: " + res.error + ")"));
        }
    };
    const int nw = std::max(1, std::min<int>(opt.workers, static_cast<int>(tasks.size())));
    std::vector<std::thread> pool;
    for (int w = 1; w < nw; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    int exit_code = kExitOk;
    for (std::size_t vi = 0; vi < cfg.variants.size(); ++vi) {
        const Variant v = cfg.variants[vi];
        const std::string vn = to_string(v);
        auto f = open_out(out / ("sweep_" + vn + ".csv"));
        f << "config_hash,V_B";
        for (const auto& l : cfg.leads) f << ",I_" << l.lead.id;
        for (const auto& l : cfg.leads) f << ",I_" << l.lead.id << "_uA";
        f << ",purity,coherence_norm,N_mean,nu_c,nu_m,dimension,converged\n";
        for (std::size_t t = 0; t < tasks.size(); ++t) {
            if (tasks[t].v != v) continue;
            const auto& r = results[t];
            const int k = tasks[t].k;
            if (r.exit_code != kExitOk && exit_code == kExitOk) exit_code = r.exit_code;
            if (!r.done) {
                log(LogLevel::Error, vn + " V_B=" + std::to_string(cfg.sweep[k]) + " failed: " + r.error);
                continue;
            }
            f << hash << ',' << cfg.sweep[k];
            for (double x : r.obs.current) f << ',' << x;
            for (double x : r.obs.current_uA) f << ',' << x;
            f << ',' << r.obs.purity << ',' << r.obs.coherence_norm << ',' << r.obs.N_mean << ',' << r.report.nu_c
              << ',' << r.report.nu_m << ',' << r.report.N << ',' << (r.converged ? 1 : 0) << '\n';

            const std::string stem = vn + "_" + std::to_string(k);
            if (cfg.outputs.quality_json) {
                json j = report_json(r.report);
                j["config_hash"] = hash;
                j["variant"] = vn;
                j["V_B"] = cfg.sweep[k];
                j["converged"] = r.converged;
                j["warnings"] = r.warnings;
                j["min_sigma_eigenvalue"] = r.obs.min_eigenvalue;
                j["seconds"] = r.seconds;
                auto q = open_out(out / ("quality_" + stem + ".json"));
                q << j.dump(2) << '\n';
            }
            if (cfg.outputs.trace) {
                auto tr = open_out(out / ("trace_" + stem + ".csv"));
                tr << "config_hash,threshold,levels,N,n,nu_c,lambda2,nu_t,nu_m\n";
                for (const auto& row : r.trace)
                    tr << hash << ',' << row.threshold << ',' << row.levels << ',' << row.N << ',' << row.n << ','
                       << row.nu_c << ',' << row.lambda2 << ',' << row.nu_t << ',' << row.nu_m << '\n';
            }
            if (cfg.outputs.occupations) {
                auto oc = open_out(out / ("occupation_" + stem + ".csv"));
                oc << "config_hash,global_index,N,E,weight\n";
                for (const auto& [a, w] : r.obs.occupation)
                    oc << hash << ',' << a << ',' << base.spectrum.N[a] << ',' << base.spectrum.E[a] << ',' << w << '\n';
            }
        }
    }

    if (cfg.outputs.negf) {
        try {
            auto f = open_out(out / "negf.csv");
            f << "config_hash,V_B,I_negf,I_negf_uA,N_negf\n";
            for (double V_B : cfg.sweep) {
                const auto r = negf_current(cfg.system, cfg.leads_at(V_B), 1e-12, cfg.outputs.transmission_samples);
                f << hash << ',' << V_B << ',' << r.current << ',' << r.current * kCurrentUnitMicroAmpere << ','
                  << r.N << '\n';
                if (!r.transmission.empty()) {
                    std::ostringstream name;
                    name << "transmission_" << V_B << ".csv";
                    auto tf = open_out(out / name.str());
                    tf << "config_hash,omega,T\n";
                    for (const auto& [w, T] : r.transmission) tf << hash << ',' << w << ',' << T << '\n';
                }
            }
        } catch (const ValidationError& e) {
            log(LogLevel::Error, std::string("NEGF: ") + e.what());
            if (exit_code == kExitOk) exit_code = kExitConfig;
        }
    }

    if (cfg.error_analysis.enabled) {
        try {
            auto f = open_out(out / "error_analysis.csv");
            f << "config_hash,variant,V_B,delta_E,delta,dsigma_ps,dsigma_E,dsigma_combined,N_full,N_ps,N_ermea,nu_c\n";
            for (Variant v : cfg.variants) {
                for (const auto& r : error_analysis(cfg, v, base))
                    f << hash << ',' << to_string(v) << ',' << r.V_B << ',' << fmt_delta_E(r.delta_E) << ','
                      << r.delta << ',' << r.dsigma_ps << ',' << r.dsigma_E << ',' << r.dsigma_combined << ','
                      << r.N_full << ',' << r.N_ps << ',' << r.N_ermea << ',' << r.nu_c << '\n';
            }
        } catch (const CapacityError& e) {
            log(LogLevel::Error, std::string("capacity: ") + e.what());
            if (exit_code == kExitOk) exit_code = kExitCapacity;
        } catch (const NonConvergenceError& e) {
            log(LogLevel::Error, std::string("error analysis: ") + e.what());
            if (exit_code == kExitOk) exit_code = kExitNonConvergence;
        }
    }

    json m;
    m["config"] = fs::absolute(config_path).string();
    m["config_hash"] = hash;
    m["name"] = cfg.name;
    m["version"] = "1.0.0";
    m["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "."
                         + std::to_string(EIGEN_MINOR_VERSION);
    m["workers"] = nw;
    m["variants"] = json::array();
    for (Variant v : cfg.variants) m["variants"].push_back(to_string(v));
    m["tie_breaking"] = "chi ascending; levels within 1e-9 eV tie and are added together; "
                        "inside a level by (sector, index in sector)";
    m["degeneracy_tolerance_eV"] = kDegeneracyTol;
    m["mu_bar_rule"] = "sum_alpha V_alpha mu_alpha / sum_alpha V_alpha with V_alpha = sum_kappa |V_alpha,kappa|";
    m["mu_bar"] = base.mu_bar;
    m["vectorization"] = "column-wise, (a, b) -> a + n b";
    m["units"] = {{"energy", "eV"}, {"current_natural", "e eV / hbar"},
                  {"e_eV_per_hbar_in_A", kCurrentUnitAmpere}, {"hbar_eV_s", kHbarEvSeconds}};
    m["exit_code"] = exit_code;
    m["partial"] = exit_code != kExitOk;
    auto mf = open_out(out / "manifest.json");
    mf << m.dump(2) << '\n';
    return exit_code;
}

} // namespace ermea
