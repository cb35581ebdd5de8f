#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bnlie/invariants.hpp"
#include "json.hpp"

namespace bnlie {

struct RunConfig {
    ModelSpec spec;
    double x0 = 0.0, x0_dual = 0.0;
    int n_nodes = 256, n_nodes_dual = 256;
    TruncationPolicy truncation;
    double solver_tol = 1e-10;
    int solver_max_iter = 30;
    int damping = 6;  // step halvings per Newton step
    std::optional<RootSet> tau, tau_dual, delta;
    std::string directory = "out";
    bool emit_csv = false, emit_grid = false;
    nlohmann::json echo;
};

// Schema-checked parse; ConfigError messages carry the JSON path ($.model.N, ...).
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

struct RunOptions {
    int threads = 1;
    bool strict = false;            // warnings count as failures
    std::string out_dir;            // overrides outputs.directory when set
};

struct RunResult {
    nlohmann::json results;  // everything except timings is deterministic
    std::vector<Suite> suites;
    std::vector<std::string> warnings;
    int exit_code = 0;
    std::string results_path;
};

inline constexpr int EXIT_PASS = 0;
inline constexpr int EXIT_NUMERIC = 2;
inline constexpr int EXIT_CONFIG = 3;

const std::vector<std::string>& subcommands();

// Runs one subcommand and writes results.json (plus CSVs) atomically into the output directory.
RunResult run_command(const std::string& command, const RunConfig& cfg, const RunOptions& opt);

// temp file + rename in the target directory
void write_atomic(const std::string& path, const std::string& content);

nlohmann::json to_json(cplx z);
nlohmann::json to_json(const Suite& s);

}  // namespace bnlie
