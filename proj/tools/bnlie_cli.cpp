#include <cstdio>
#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "bnlie/run.hpp"

using namespace bnlie;

namespace {

void print_table(const RunResult& r) {
    std::printf("%-18s %-30s %12s %10s  %s\n", "suite", "check", "value", "threshold", "status");
    for (const auto& s : r.suites)
        for (const auto& c : s.checks)
            std::printf("%-18s %-30s %12.3e %10.1e  %s\n", s.name.c_str(), c.name.c_str(), c.value, c.threshold,
                        c.pass ? "PASS" : "FAIL");
    for (const auto& w : r.warnings) std::printf("warning: %s\n", w.c_str());
    if (r.results.contains("error"))
        std::printf("error: %s\n", r.results["error"]["message"].get<std::string>().c_str());
    std::printf("status: %s (exit %d)\n", r.exit_code == EXIT_PASS ? "pass" : "fail", r.exit_code);
}

int env_threads() {
    const char* e = std::getenv("BAXTER_NLIE_THREADS");
    if (!e) return 1;
    try {
        return std::max(1, std::stoi(e));
    } catch (const std::exception&) {
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Baxter equations and NLIE for the quantum Toda chain"};
    app.require_subcommand(1);

    std::string config, out;
    int threads = 0;
    bool strict = false, quiet = false;
    std::string chosen;
    for (const auto& name : subcommands()) {
        auto* sub = app.add_subcommand(name, "run '" + name + "'");
        sub->add_option("-c,--config", config, "JSON config file")->required();
        sub->add_option("-o,--out", out, "output directory (overrides outputs.directory)");
        sub->add_option("-j,--threads", threads, "worker threads (default $BAXTER_NLIE_THREADS or 1)");
        sub->add_flag("--strict", strict, "treat warnings as failures");
        sub->add_flag("-q,--quiet", quiet, "no invariant table");
        sub->callback([&chosen, name] { chosen = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : EXIT_CONFIG;
    }

    RunOptions opt;
    opt.threads = threads > 0 ? threads : env_threads();
    opt.strict = strict;
    opt.out_dir = out;
    try {
        const RunConfig cfg = load_config(config);
        const RunResult r = run_command(chosen, cfg, opt);
        if (!quiet) print_table(r);
        std::printf("results: %s\n", r.results_path.c_str());
        return r.exit_code;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return EXIT_CONFIG;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return EXIT_NUMERIC;
    }
}
