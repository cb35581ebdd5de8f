#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bnlie/run.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace bnlie;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

json example() {
    std::ifstream f(std::string(BNLIE_SOURCE_DIR) + "/configs/example.json");
    return json::parse(f);
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("bnlie_test_cli_" + name);
    fs::remove_all(p);
    return p;
}

std::string config_error(const json& j) {
    try {
        parse_config(j);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

json read_json(const fs::path& p) {
    std::ifstream f(p);
    return json::parse(f);
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(BNLIE_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

}  // namespace

TEST_CASE("config schema errors name the path") {
    json j = example();
    REQUIRE(config_error(j).empty());

    json k = j;
    k.erase("periods");
    CHECK(config_error(k).find("$.periods") != std::string::npos);

    k = j;
    k["model"]["flavour"] = 1;
    CHECK(config_error(k).find("$.model.flavour") != std::string::npos);

    k = j;
    k["model"]["N"] = 0;
    CHECK(config_error(k).find("$.model.N") != std::string::npos);

    k = j;
    k["solver"]["tol"] = -1e-10;
    CHECK(config_error(k).find("$.solver.tol") != std::string::npos);

    k = j;
    k["seeds"]["tau"] = json::array({json::array({0.2, 0.07}), json::array({0.1, 0.0})});
    CHECK(config_error(k).find("$.seeds.tau") != std::string::npos);

    k = j;
    k["seeds"]["delta"] = json::array({json::array({0.2, 0.07})});
    CHECK(config_error(k).find("$.seeds.delta") != std::string::npos);

    k = j;
    k["periods"]["omega1"] = json::array({1.0, 0.0});
    CHECK(config_error(k).find("$.periods") != std::string::npos);

    k = j;
    k["model"]["kind"] = "toda3";
    CHECK(config_error(k).find("$.model.kind") != std::string::npos);
}

TEST_CASE("exit codes of the binary") {
    const fs::path dir = scratch("exit");
    fs::create_directories(dir);
    json bad = example();
    bad.erase("periods");
    std::ofstream(dir / "bad.json") << bad.dump();
    CHECK(run_cli("verify -c " + (dir / "bad.json").string() + " -o " + dir.string()) == EXIT_CONFIG);
    CHECK(run_cli("verify -c " + (dir / "missing.json").string()) == EXIT_CONFIG);
    CHECK(run_cli("nosuchcommand") == EXIT_CONFIG);

    // an unreachable solver tolerance is a numerical failure
    json tight = example();
    tight["solver"]["tol"] = 1e-30;
    tight["solver"]["max_iter"] = 3;
    std::ofstream(dir / "tight.json") << tight.dump();
    CHECK(run_cli("bethe -q -c " + (dir / "tight.json").string() + " -o " + dir.string()) == EXIT_NUMERIC);
    CHECK(read_json(dir / "results.json")["error"]["kind"] == "non_convergence");

    std::ofstream(dir / "good.json") << example().dump();
    CHECK(run_cli("specfun-check -q -c " + (dir / "good.json").string() + " -o " + dir.string()) == EXIT_PASS);
}

TEST_CASE("rho = 0: trivial pipeline, every invariant passes") {
    json j = example();
    j["rho_override"] = "zero";
    j["seeds"].erase("delta");
    j["seeds"].erase("tau_dual");
    const RunConfig cfg = parse_config(j);
    CHECK(cfg.spec.rho_zero);
    RunOptions opt;
    opt.out_dir = scratch("rho0").string();
    const RunResult r = run_command("verify", cfg, opt);
    for (const auto& s : r.suites)
        for (const auto& c : s.checks) {
            INFO(s.name << "." << c.name << " = " << c.value);
            CHECK(c.pass);
        }
    CHECK(r.exit_code == EXIT_PASS);
    CHECK(r.results["skipped"] == json::array({"qfunctions"}));
    // δ = τ on both sides, reconstruction returns the seed
    const json& res = r.results;
    for (int k = 0; k < 2; ++k) {
        const cplx t = cfg.tau->roots[k];
        const cplx d(res["hill"]["direct"]["delta"][k][0].get<double>(), res["hill"]["direct"]["delta"][k][1].get<double>());
        CHECK(std::abs(d - t) < 1e-12);
        double best = 1e300;
        for (const auto& g : res["spectrum"]["tau"]) best = std::min(best, std::abs(cplx(g[0], g[1]) - t));
        CHECK(best < 1e-12);
    }
}

TEST_CASE("results are deterministic apart from timings") {
    const RunConfig cfg = parse_config(example());
    RunOptions a, b;
    a.out_dir = scratch("det_a").string();
    b.out_dir = scratch("det_b").string();
    b.threads = 4;
    run_command("spectrum", cfg, a);
    run_command("spectrum", cfg, b);
    json ja = read_json(fs::path(a.out_dir) / "results.json"), jb = read_json(fs::path(b.out_dir) / "results.json");
    CHECK(ja.contains("timings"));
    ja.erase("timings");
    jb.erase("timings");
    CHECK(ja.dump() == jb.dump());
    // CSVs are written byte for byte the same
    auto slurp = [](const fs::path& p) {
        std::ifstream f(p);
        std::stringstream ss;
        ss << f.rdbuf();
        return ss.str();
    };
    CHECK(slurp(fs::path(a.out_dir) / "nlie_direct.csv") == slurp(fs::path(b.out_dir) / "nlie_direct.csv"));
}

TEST_CASE("atomic writes leave no temp files") {
    const fs::path dir = scratch("atomic");
    write_atomic((dir / "x.json").string(), "{}\n");
    write_atomic((dir / "x.json").string(), "{\"a\": 1}\n");
    int n = 0;
    for (const auto& e : fs::directory_iterator(dir)) {
        ++n;
        CHECK(e.path().filename() == "x.json");
    }
    CHECK(n == 1);
    CHECK(read_json(dir / "x.json")["a"] == 1);
}

TEST_CASE("subcommands need their seeds") {
    json j = example();
    j.erase("seeds");
    const RunConfig cfg = parse_config(j);
    RunOptions opt;
    opt.out_dir = scratch("seeds").string();
    CHECK_THROWS_AS(run_command("nlie", cfg, opt), ConfigError);
    CHECK_THROWS_AS(run_command("bethe", cfg, opt), ConfigError);
    CHECK(run_command("specfun-check", cfg, opt).exit_code == EXIT_PASS);
}
