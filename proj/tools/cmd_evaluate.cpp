#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "tokprof/client.hpp"
#include "tokprof/harness.hpp"
#include "tokprof/metrics.hpp"

namespace tokprof::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct ResolvedBenchmark {
    BenchmarkConfig config;
    std::string label;
};

ResolvedBenchmark resolve_benchmark(const EvaluateOptions& options) {
    ResolvedBenchmark resolved;
    if (builtin_benchmark_config(options.benchmark)) {
        // datasets are not bundled; the name alone cannot locate one
        throw std::invalid_argument("benchmark '" + options.benchmark +
                                    "' needs a dataset file; pass its JSONL path instead");
    }
    if (!fs::exists(options.benchmark)) {
        throw std::runtime_error("benchmark file not found: " + options.benchmark);
    }
    resolved.config.eval_path = options.benchmark;
    resolved.config.fewshot_path = options.fewshot_path;
    resolved.label = fs::path(options.benchmark).stem().string();
    resolved.config.name = resolved.label;

    if (!options.answer_mode.empty()) {
        const auto mode = answer_mode_from_string(options.answer_mode);
        if (!mode) throw std::invalid_argument("unknown answer mode: " + options.answer_mode);
        resolved.config.answer_mode = *mode;
    } else if (const auto inferred = infer_answer_mode(options.benchmark)) {
        resolved.config.answer_mode = *inferred;
    } else {
        throw std::invalid_argument("cannot infer the answer mode from '" + options.benchmark +
                                    "'; pass --answer-mode");
    }

    // Exemplar-count default follows the benchmark family when recognizable.
    if (const auto mode = infer_answer_mode(options.benchmark)) {
        switch (*mode) {
            case AnswerMode::exact_text: resolved.config.default_k = 3; break;
            case AnswerMode::number: resolved.config.default_k = 8; break;
            case AnswerMode::multiple_choice: resolved.config.default_k = 4; break;
        }
    }
    return resolved;
}

StrategySpec resolve_strategy(const std::string& name, const EvaluateOptions& options,
                              int default_k) {
    const bool zeroshot = name == "vanilla_io" || name == "zeroshot_cot";
    int k = 0;
    if (!zeroshot) k = options.k >= 0 ? options.k : default_k;
    const int p = name == "cot_sc" ? std::max(options.p, 1) : options.p;
    return build_builtin(name, k, p);
}

json manifest_json(const EvaluateOptions& options, const ResolvedBenchmark& benchmark,
                   const std::vector<StrategySpec>& specs) {
    json manifest;
    manifest["benchmark"] = {{"name", benchmark.label},
                             {"eval_path", benchmark.config.eval_path},
                             {"fewshot_path", benchmark.config.fewshot_path},
                             {"answer_mode", to_string(benchmark.config.answer_mode)}};
    manifest["strategies"] = json::array();
    for (const auto& spec : specs) {
        manifest["strategies"].push_back(
            {{"name", spec.name}, {"k", spec.exemplar_count}, {"p", spec.sample_count}});
    }
    manifest["mock"] = options.mock.empty() ? json(nullptr) : json(options.mock);
    if (options.mock.empty()) {
        manifest["endpoint"] = {{"base_url", options.endpoint_url},
                                {"model", options.endpoint_model},
                                {"max_tokens", options.max_tokens},
                                {"timeout_seconds", options.timeout_seconds},
                                {"retries", options.retries}};
    } else {
        manifest["endpoint"] = nullptr;
    }
    manifest["seed"] = options.seed;
    manifest["limit"] = options.limit ? json(*options.limit) : json(nullptr);
    manifest["out_dir"] = options.out_dir;
    manifest["concurrency"] = options.concurrency;
    return manifest;
}

std::unique_ptr<CompletionClient> make_client(const EvaluateOptions& options,
                                              const Benchmark& benchmark, AnswerMode mode) {
    if (!options.mock.empty()) {
        return std::make_unique<MockCompletionClient>(parse_mock_spec(options.mock), benchmark,
                                                      mode, options.seed);
    }
    if (options.endpoint_url.empty() || options.endpoint_model.empty()) {
        throw std::invalid_argument("live runs need --endpoint and --model (or pass --mock)");
    }
    const char* key = std::getenv(kApiKeyEnvVar);
    if (key == nullptr || *key == '\0') {
        throw std::invalid_argument(std::string("live runs need the ") + kApiKeyEnvVar +
                                    " environment variable");
    }
    ModelEndpoint endpoint;
    endpoint.base_url = options.endpoint_url;
    endpoint.model_name = options.endpoint_model;
    endpoint.max_tokens = options.max_tokens;
    endpoint.timeout_seconds = options.timeout_seconds;
    endpoint.retry_attempts = options.retries;
    endpoint.api_key = key;
    return std::make_unique<HttpCompletionClient>(endpoint);
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

}  // namespace

int run_evaluate(const EvaluateOptions& options) {
    std::vector<StrategySpec> specs;
    const ResolvedBenchmark resolved = resolve_benchmark(options);
    for (const auto& name : options.strategies) {
        specs.push_back(resolve_strategy(name, options, resolved.config.default_k));
    }
    for (const auto& path : options.spec_paths) {
        specs.push_back(load_strategy_file(path));
    }
    if (specs.empty()) throw std::invalid_argument("pass at least one --strategy or --spec");

    const Benchmark benchmark = load_benchmark(resolved.config);

    fs::create_directories(options.out_dir);
    write_text(fs::path(options.out_dir) / "manifest.json",
               manifest_json(options, resolved, specs).dump(2) + "\n");

    const bool multiple = specs.size() > 1;
    for (const auto& spec : specs) {
        const std::string label = strategy_label(spec);
        auto client = make_client(options, benchmark, resolved.config.answer_mode);

        RunOptions run_options;
        run_options.seed = options.seed;
        run_options.limit = options.limit;
        run_options.concurrency = options.concurrency;
        const std::vector<EvalRecord> records = run_eval_items(
            spec, benchmark, resolved.config.answer_mode, *client, run_options);

        const std::string model_label =
            options.model_label.empty() ? client->model_label() : options.model_label;
        const RunSummary summary =
            summarize_run(records, {label, resolved.label, model_label});

        RunMeta meta;
        meta.seed = options.seed;
        meta.strategy = label;
        meta.benchmark = resolved.label;
        meta.model = model_label;
        meta.exemplar_count = spec.exemplar_count;
        meta.sample_count = spec.sample_count;
        meta.limit = options.limit;

        const std::string suffix = multiple ? "_" + label : "";
        const fs::path records_path = fs::path(options.out_dir) / ("run_records" + suffix + ".jsonl");
        const fs::path summary_path = fs::path(options.out_dir) / ("summary" + suffix + ".json");
        write_run_records(records_path.string(), meta, records);
        write_text(summary_path, summary_to_json(summary, options.seed) + "\n");

        char tc_text[32] = "n/a";
        if (summary.average_tc) {
            std::snprintf(tc_text, sizeof(tc_text), "%.2f", *summary.average_tc);
        }
        std::printf(
            "%s on %s (%s): items=%lld excluded=%lld tokens=%.1f acc=%.1f%% se=%.2f tc=%s\n",
            label.c_str(), resolved.label.c_str(), model_label.c_str(), summary.n_items,
            summary.n_excluded, summary.avg_tokens_total, summary.accuracy_pct,
            summary.std_error_pct, tc_text);
    }
    return kExitOk;
}

}  // namespace tokprof::cli
