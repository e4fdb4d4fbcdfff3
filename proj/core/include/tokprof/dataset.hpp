#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tokprof/strategy.hpp"

namespace tokprof {

enum class AnswerMode { number, multiple_choice, exact_text };

std::string to_string(AnswerMode mode);
std::optional<AnswerMode> answer_mode_from_string(const std::string& text);

struct BenchmarkItem {
    std::string id;
    std::string question;
    std::string gold_answer;
    std::vector<std::string> choices;  // multiple_choice only
    std::optional<std::string> subject;
};

struct BenchmarkConfig {
    std::string name;
    AnswerMode answer_mode = AnswerMode::exact_text;
    std::string eval_path;
    std::string fewshot_path;  // equal to eval_path when the pool aliases the eval split
    int default_k = 0;
};

struct Benchmark {
    std::vector<BenchmarkItem> items;
    std::vector<ExemplarRow> pool;
};

// bbh (exact_text, k=3), gsm8k (number, k=8), mmlu (multiple_choice, k=4);
// file paths are left for the caller.
std::optional<BenchmarkConfig> builtin_benchmark_config(const std::string& name);

// Guesses the answer mode from a file name ("gsm8k" -> number, ...).
std::optional<AnswerMode> infer_answer_mode(const std::string& path);

// Question text with the choice list appended for multiple-choice items.
std::string format_question(const BenchmarkItem& item);

// Reads one JSON object per line: {"id","question","answer","choices"?,
// "reasoning"?,"subject"?}. Parse problems report the offending line number;
// duplicate ids report the id. For multiple-choice configs, choice lists are
// baked into the pool exemplars and answers become "(X)".
Benchmark load_benchmark(const BenchmarkConfig& config);

// Full-split sample counts of the reference benchmarks, used by cost
// estimation (bbh 6511, gsm8k 1319, mmlu 1531).
std::optional<long long> benchmark_sample_count(const std::string& name);

}  // namespace tokprof
