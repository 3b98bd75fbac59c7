// cli.hpp — Configuration ingestion, deterministic experiment orchestration,
// and result persistence for the command-line driver.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "bplus/common.hpp"

namespace bplus {

struct RunConfig {
    std::string subcommand;  // bplus | dephasing | lat | retro | markov
    std::string config_path;  // empty: defaults / preset only
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    int jobs = 1;
    std::string preset;  // optional preset name
    int verbosity = 0;
};

// Schema-validates the raw config for the subcommand: unknown keys are
// rejected with their field path, defaults are filled in, and the fully
// resolved object is returned (the echo).
nlohmann::json parse_config(const std::string& subcommand, const nlohmann::json& raw);

// Loads the file (or {} when path is empty), applies the preset, validates.
nlohmann::json load_config(const RunConfig& rc);

// Stable 64-bit FNV-1a hash of the canonical (key-sorted) serialization.
std::uint64_t config_hash(const nlohmann::json& config);

struct ResultRecord {
    std::string run_id;
    std::string subcommand;
    std::string config_hash;
    nlohmann::json outputs;  // scalars plus optional {"table": {columns, rows}}
    double duration_s = 0.0;  // logged separately, never written to result files
};

// Runs the subcommand; identical (config, seed) yields identical records for
// any parallelism degree.
std::vector<ResultRecord> execute(const RunConfig& rc, const nlohmann::json& config);

struct EmittedFiles {
    std::string records_path;
    std::vector<std::string> csv_paths;
    std::string config_echo_path;
    std::string log_path;
};

// Writes <sub>-<runid>.jsonl (one record per line), one CSV per tabular
// output, the resolved-config echo, and a log carrying wall-clock durations.
// Result files (.jsonl/.csv) contain no timing data so reruns are
// byte-identical.
EmittedFiles emit_results(const RunConfig& rc, const nlohmann::json& config,
                          const std::vector<ResultRecord>& records);

// Full driver used by the binary: load, execute, emit. Returns the exit code
// contract: 0 success, 1 config error, 2 numerical/identifiability failure,
// 3 I/O error.
int run_cli(const RunConfig& rc);

}  // namespace bplus
