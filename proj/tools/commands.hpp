#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tokprof::cli {

// Exit codes: 0 success, 1 usage error, 2 runtime/IO error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

struct DeriveOptions {
    std::string strategy;       // builtin name; empty when spec_path is used
    std::string spec_path;      // JSON strategy definition
    int k = -1;                 // -1: builtin default
    int p = 1;
    bool evaluate = false;      // also print the growth rate at (k, p)
};

struct EvaluateOptions {
    std::vector<std::string> strategies;   // builtin names
    std::vector<std::string> spec_paths;   // user-defined strategy files
    std::string benchmark;                 // builtin name or JSONL path
    std::string answer_mode;               // empty: infer
    std::string fewshot_path;              // empty: alias the eval split
    std::string mock;                      // empty: live endpoint
    std::string endpoint_url;
    std::string endpoint_model;
    int max_tokens = 1024;
    double timeout_seconds = 120.0;
    int retries = 3;
    int k = -1;                            // -1: benchmark default
    int p = 1;
    std::optional<long long> limit;
    std::uint64_t seed = 0;
    std::string out_dir = "runs";
    int concurrency = 4;
    std::string model_label;               // summary label override
};

struct AnalyzeOptions {
    std::vector<std::string> sources;      // summary CSV/JSON or run-record JSONL
    bool ratios = false;
    std::vector<std::string> marginal;     // [low, high]
    std::string cell;                      // "model,benchmark"
    bool fit = false;
    std::string cost_path;                 // price sheet JSON
    std::string cost_model;                // price sheet row
    std::optional<long long> samples;      // overrides per-benchmark sample counts
    std::string format = "markdown";
    std::string out_path;                  // empty: stdout
};

int run_derive(const DeriveOptions& options);
int run_evaluate(const EvaluateOptions& options);
int run_analyze(const AnalyzeOptions& options);
// Full document emission; reuses AnalyzeOptions sources/format/cost flags.
int run_report(const AnalyzeOptions& options);

}  // namespace tokprof::cli
