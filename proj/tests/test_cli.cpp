#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "ermea/config.hpp"
#include "ermea/errors.hpp"
#include "ermea/runner.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string env(const char* name)
{
    const char* v = std::getenv(name);
    REQUIRE_MESSAGE(v, name << " is not set");
    return v;
}

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("ermea_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run_cli(const std::string& args)
{
    const std::string cmd = "\"" + env("ERMEA_CLI") + "\" " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p)
{
    std::ifstream f(p);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

json small_config()
{
    return json::parse(R"({
      "name": "tiny",
      "system": {"sites": 2, "spinful": false, "T": [[0.5, -0.2], [-0.2, 0.8]], "U": [[0, 1.0], [1.0, 0]]},
      "leads": [{"id": "L", "coupling": [0.1, 0]}, {"id": "R", "coupling": [0, 0.1]}],
      "ermea": {"delta": 1e-12, "delta_E": null},
      "sweep": {"V_B": [0.0, 1.0, 2.0]},
      "variants": ["CRB", "PERLind"]
    })");
}

fs::path write_config(const fs::path& dir, const json& j)
{
    const fs::path p = dir / "config.json";
    std::ofstream(p) << j.dump(2);
    return p;
}

} // namespace

TEST_CASE("bundled three-site comparison runs and writes every artifact")
{
    const fs::path out = scratch("negf");
    const std::string cfg = env("ERMEA_CONFIGS") + "/spinless3_negf.json";
    REQUIRE(run_cli("\"" + cfg + "\" -o \"" + out.string() + "\"") == 0);
    for (const char* f : {"manifest.json", "spectrum.csv", "sweep_CRB.csv", "negf.csv", "quality_CRB_0.json", "trace_CRB_0.csv"})
        CHECK_MESSAGE(fs::exists(out / f), f);
    const json m = json::parse(slurp(out / "manifest.json"));
    const std::string hash = m["config_hash"];
    CHECK(m["exit_code"] == 0);
    CHECK(m["partial"] == false);
    CHECK(m.contains("tie_breaking"));
    CHECK(m["units"]["e_eV_per_hbar_in_A"].get<double>() == doctest::Approx(2.434e-4).epsilon(1e-3));
    // every data row carries the config hash
    for (const char* f : {"sweep_CRB.csv", "negf.csv", "trace_CRB_0.csv"}) {
        std::ifstream in(out / f);
        std::string line;
        std::getline(in, line);
        int rows = 0;
        while (std::getline(in, line)) {
            CHECK(line.rfind(hash + ",", 0) == 0);
            ++rows;
        }
        CHECK(rows > 0);
    }
    const json q = json::parse(slurp(out / "quality_CRB_0.json"));
    CHECK(q["nu_c"].get<double>() <= 1e-12);
}

TEST_CASE("identical runs are byte-reproducible")
{
    const fs::path dir = scratch("repro");
    const fs::path cfg = write_config(dir, small_config());
    REQUIRE(run_cli("\"" + cfg.string() + "\" -o \"" + (dir / "a").string() + "\"") == 0);
    REQUIRE(run_cli("\"" + cfg.string() + "\" -o \"" + (dir / "b").string() + "\"") == 0);
    for (const char* f : {"sweep_CRB.csv", "sweep_PERLind.csv", "spectrum.csv", "trace_PERLind_2.csv"})
        CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
    // the variant override replaces the configured list
    REQUIRE(run_cli("\"" + cfg.string() + "\" --variant DL -o \"" + (dir / "c").string() + "\"") == 0);
    CHECK(fs::exists(dir / "c" / "sweep_DL.csv"));
    CHECK(!fs::exists(dir / "c" / "sweep_CRB.csv"));
}

TEST_CASE("exit codes")
{
    const fs::path dir = scratch("codes");
    const fs::path out = dir / "out";

    json empty = small_config();
    empty["sweep"] = json::array();
    CHECK(run_cli("\"" + write_config(dir, empty).string() + "\" -o \"" + out.string() + "\"") == ermea::kExitConfig);

    CHECK(run_cli("\"" + (dir / "missing.json").string() + "\"") == ermea::kExitConfig);
    CHECK(run_cli("") == ermea::kExitConfig);
    CHECK(run_cli("\"" + write_config(dir, small_config()).string() + "\" --variant Bogus") == ermea::kExitConfig);

    json cap = small_config();
    cap["ermea"]["max_dimension"] = 2;
    CHECK(run_cli("\"" + write_config(dir, cap).string() + "\" -o \"" + out.string() + "\"") == ermea::kExitNonConvergence);
    CHECK(json::parse(slurp(out / "manifest.json"))["partial"] == true);

    // 13 spinful sites exceed the Fock-space budget
    json big = small_config();
    const int l = 13;
    json T = json::array(), U = json::array();
    for (int i = 0; i < l; ++i) {
        json row = json::array(), zero = json::array();
        for (int j = 0; j < l; ++j) {
            row.push_back(std::abs(i - j) == 1 ? -1.0 : 0.0);
            zero.push_back(0.0);
        }
        T.push_back(row);
        U.push_back(zero);
    }
    big["system"] = {{"sites", l}, {"spinful", true}, {"T", T}, {"U", U}};
    json c = json::array();
    for (int i = 0; i < l; ++i) c.push_back(i == 0 ? 0.1 : 0.0);
    big["leads"] = json::array({{{"id", "L"}, {"coupling", c}}, {{"id", "R"}, {"coupling", c}}});
    CHECK(run_cli("\"" + write_config(dir, big).string() + "\" -o \"" + out.string() + "\"") == ermea::kExitCapacity);
}

TEST_CASE("config errors name the offending key")
{
    auto message = [](const json& j) {
        try {
            ermea::parse_config(j.dump());
        } catch (const ermea::ConfigError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    json a = small_config();
    a["system"]["T"] = json::array({json::array({1.0, 0.0}), json::array({0.3, 1.0})});
    CHECK(message(a).find("$.system") != std::string::npos);
    json b = small_config();
    b["leads"][1]["coupling"] = json::array({0.1});
    CHECK(message(b).find("$.leads[1]") != std::string::npos);
    json c = small_config();
    c["variants"] = json::array({"CRB", "Redfield"});
    CHECK(message(c).find("$.variants[1]") != std::string::npos);
    json d = small_config();
    d["sweep"] = {{"V_B", json::array()}};
    CHECK(message(d).find("$.sweep") != std::string::npos);
    json e = small_config();
    e["ermea"]["delta"] = -1.0;
    CHECK(message(e).find("$.ermea") != std::string::npos);
    CHECK(message(json::parse("{}")).find("system") != std::string::npos);
}

TEST_CASE("config: sweep forms and bias factors")
{
    json j = small_config();
    j["sweep"] = {{"from", 0.0}, {"to", 2.0}, {"steps", 5}};
    auto c = ermea::parse_config(j.dump());
    REQUIRE(c.sweep.size() == 5);
    CHECK(c.sweep[3] == doctest::Approx(1.5));
    const auto leads = c.leads_at(3.0);
    CHECK(leads[0].mu == doctest::Approx(-1.5));
    CHECK(leads[1].mu == doctest::Approx(1.5));
    CHECK(c.variants.size() == 2);
    CHECK(c.ermea.variant == ermea::Variant::CRB);
    CHECK(ermea::config_hash(j.dump()) == ermea::config_hash(j.dump()));
    CHECK(ermea::config_hash(j.dump()) != ermea::config_hash(j.dump() + " "));

    // bundled configs parse
    for (const char* name : {"benzene6_meta.json", "spinless6_meta.json", "spinless3_negf.json"})
        CHECK_NOTHROW(ermea::load_config(env("ERMEA_CONFIGS") + "/" + name));
    const auto meta = ermea::load_config(env("ERMEA_CONFIGS") + "/benzene6_meta.json");
    CHECK(meta.system.spinful);
    CHECK(meta.system.sites == 6);
    CHECK(meta.leads[0].lead.coupling(0) == 0.1);
    CHECK(meta.leads[1].lead.coupling(2) == 0.1);
    CHECK(meta.leads[0].lead.t_B == 6.0);
    CHECK(meta.leads[0].lead.beta == 20.0);
}
