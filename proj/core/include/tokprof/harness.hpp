#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tokprof/client.hpp"
#include "tokprof/dataset.hpp"
#include "tokprof/strategy.hpp"

namespace tokprof {

struct EvalRecord {
    std::string item_id;
    std::string extracted_answer;  // after self-consistency aggregation
    bool correct = false;
    std::vector<CompletionRecord> completions;  // length = sample_count
};

// number: last numeric literal (commas stripped); multiple_choice: last
// "(X)" capital, or a bare single letter; exact_text: final non-empty line,
// case-folded and whitespace-collapsed. Empty string when nothing matches.
// Idempotent on its own output in every mode.
std::string extract_answer(const std::string& output, AnswerMode mode);

// Majority vote; empty answers are excluded unless all are empty; ties break
// to the earliest first occurrence among the tied answers.
std::string aggregate_sc(const std::vector<std::string>& answers);

bool answers_match(const std::string& extracted, const std::string& gold, AnswerMode mode);

// "1,234.50" -> "1234.5"; sign and leading/trailing zeros normalized.
std::string normalize_decimal(const std::string& text);
// Case fold + whitespace collapse + trim.
std::string normalize_text(const std::string& text);

struct RunOptions {
    std::uint64_t seed = 0;
    std::optional<long long> limit;
    int concurrency = 4;  // max in-flight endpoint calls
};

// Full pipeline per item: seeded exemplar sampling (target excluded), prompt
// rendering, p completions, answer extraction, vote, scoring. Every item
// yields a record, call failures included; completions land in canonical
// (item, sample) order regardless of arrival order. Deterministic against
// the mock client for a fixed seed.
std::vector<EvalRecord> run_eval(const StrategySpec& spec, const BenchmarkConfig& config,
                                 CompletionClient& client, const RunOptions& options);

// Same, over an already-loaded benchmark.
std::vector<EvalRecord> run_eval_items(const StrategySpec& spec, const Benchmark& benchmark,
                                       AnswerMode mode, CompletionClient& client,
                                       const RunOptions& options);

struct RunMeta {
    std::uint64_t seed = 0;
    std::string strategy;
    std::string benchmark;
    std::string model;
    int exemplar_count = 0;
    int sample_count = 1;
    std::optional<long long> limit;
};

struct RunRecordFile {
    RunMeta meta;
    std::vector<EvalRecord> records;
};

// JSONL: one meta header line, then one EvalRecord (with embedded
// completions) per item. Byte-stable for identical inputs.
void write_run_records(const std::string& path, const RunMeta& meta,
                       const std::vector<EvalRecord>& records);
RunRecordFile load_run_records(const std::string& path);

std::string eval_record_to_json(const EvalRecord& record);

}  // namespace tokprof
