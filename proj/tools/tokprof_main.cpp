#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

using namespace tokprof::cli;

long long limit_sentinel = -1;
long long samples_sentinel = -1;

void add_source_options(CLI::App* cmd, AnalyzeOptions& options) {
    cmd->add_option("sources", options.sources,
                    "summary CSV, summary JSON, or run-record JSONL files")
        ->required();
    cmd->add_option("--format", options.format, "markdown | csv | json");
    cmd->add_option("--out", options.out_path, "write the document here instead of stdout");
    cmd->add_option("--cost", options.cost_path, "price sheet JSON for cost estimation");
    cmd->add_option("--model", options.cost_model, "price sheet row (e.g. gpt-4o-mini)");
    cmd->add_option("--samples", samples_sentinel,
                    "samples per benchmark for cost estimation (default: reference counts)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Prompting-strategy token profiler"};
    app.require_subcommand(1);

    DeriveOptions derive;
    CLI::App* derive_cmd =
        app.add_subcommand("derive", "derive a strategy's token-complexity class");
    derive_cmd->add_option("strategy", derive.strategy,
                           "vanilla_io | zeroshot_cot | vanilla_fewshot | fewshot_cot | cot_sc");
    derive_cmd->add_option("--spec", derive.spec_path, "strategy definition JSON");
    derive_cmd->add_option("--k", derive.k, "exemplar count");
    derive_cmd->add_option("--p", derive.p, "sampled chains");
    derive_cmd->add_flag("--eval", derive.evaluate, "print the growth rate at (k, p)");

    EvaluateOptions evaluate;
    CLI::App* evaluate_cmd =
        app.add_subcommand("evaluate", "run strategies against a benchmark and record usage");
    evaluate_cmd->add_option("--strategy", evaluate.strategies, "builtin strategy name (repeatable)");
    evaluate_cmd->add_option("--spec", evaluate.spec_paths, "strategy definition JSON (repeatable)");
    evaluate_cmd->add_option("--benchmark", evaluate.benchmark, "benchmark JSONL path")->required();
    evaluate_cmd->add_option("--answer-mode", evaluate.answer_mode,
                             "number | multiple_choice | exact_text (default: infer)");
    evaluate_cmd->add_option("--fewshot", evaluate.fewshot_path,
                             "exemplar pool JSONL (default: the eval split)");
    evaluate_cmd->add_option("--mock", evaluate.mock,
                             "oracle | gen:seed=N,acc=X | script:<path>");
    evaluate_cmd->add_option("--endpoint", evaluate.endpoint_url,
                             "chat-completions base URL (e.g. http://host:8000/v1)");
    evaluate_cmd->add_option("--model", evaluate.endpoint_model, "model name for live runs");
    evaluate_cmd->add_option("--max-tokens", evaluate.max_tokens, "generation budget per call");
    evaluate_cmd->add_option("--timeout", evaluate.timeout_seconds, "per-call timeout, seconds");
    evaluate_cmd->add_option("--retries", evaluate.retries, "attempts per call");
    evaluate_cmd->add_option("--k", evaluate.k, "exemplar count (default: benchmark family)");
    evaluate_cmd->add_option("--p", evaluate.p, "sampled chains (cot_sc)");
    evaluate_cmd->add_option("--limit", limit_sentinel, "evaluate only the first N items");
    evaluate_cmd->add_option("--seed", evaluate.seed, "run seed");
    evaluate_cmd->add_option("--out-dir", evaluate.out_dir, "output directory (default: runs)");
    evaluate_cmd->add_option("--concurrency", evaluate.concurrency, "max in-flight calls");
    evaluate_cmd->add_option("--model-label", evaluate.model_label, "summary model label override");

    AnalyzeOptions analyze;
    CLI::App* analyze_cmd =
        app.add_subcommand("analyze", "ratio, TC, trend, and cost analyses over summaries");
    add_source_options(analyze_cmd, analyze);
    analyze_cmd->add_flag("--ratios", analyze.ratios, "theoretical vs observed usage ratios");
    analyze_cmd->add_option("--marginal", analyze.marginal, "LOW HIGH strategy pair")
        ->expected(2);
    analyze_cmd->add_option("--cell", analyze.cell, "restrict --marginal to model,benchmark");
    analyze_cmd->add_flag("--fit", analyze.fit, "trend fit per benchmark");

    AnalyzeOptions report;
    CLI::App* report_cmd =
        app.add_subcommand("report", "emit the full document (tables, ratios, trends)");
    add_source_options(report_cmd, report);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (limit_sentinel >= 0) evaluate.limit = limit_sentinel;
        if (samples_sentinel >= 0) {
            analyze.samples = samples_sentinel;
            report.samples = samples_sentinel;
        }
        if (derive_cmd->parsed()) {
            if (derive.strategy.empty() && derive.spec_path.empty()) {
                std::cerr << "error: pass a strategy name or --spec\n";
                return kExitUsage;
            }
            return run_derive(derive);
        }
        if (evaluate_cmd->parsed()) return run_evaluate(evaluate);
        if (analyze_cmd->parsed()) return run_analyze(analyze);
        if (report_cmd->parsed()) return run_report(report);
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
