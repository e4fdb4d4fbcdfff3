#pragma once

#include <compare>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tokprof/harness.hpp"

namespace tokprof {

// characters / 4, exact (no rounding).
double estimate_tokens(std::string_view text);

struct FilterResult {
    std::vector<CompletionRecord> kept;
    std::vector<CompletionRecord> excluded;
};

// Drops empty outputs, plus outputs whose character length is more than four
// population standard deviations from the mean. Mean and sigma are computed
// once over the non-empty outputs (no re-iteration after exclusion). With
// fewer than two non-empty outputs only the empty rule applies.
FilterResult filter_outliers(const std::vector<CompletionRecord>& records);

struct RunSummary {
    std::string strategy;
    std::string benchmark;
    std::string model;
    long long n_items = 0;
    long long n_excluded = 0;   // completion records dropped from token stats
    double avg_tokens_in = 0.0;
    double avg_tokens_out = 0.0;
    double avg_tokens_total = 0.0;
    double accuracy_pct = 0.0;
    double std_error_pct = 0.0;
    std::optional<double> average_tc;  // unset when accuracy is 0
};

struct SummaryLabels {
    std::string strategy;
    std::string benchmark;
    std::string model;
};

// Accuracy over all items; token averages over outlier-filtered completions,
// sample tokens summed per item before averaging across items; binomial
// standard error over the pooled item count.
RunSummary summarize_run(const std::vector<EvalRecord>& records, const SummaryLabels& labels);

// tokens per percentage point of accuracy (t/p). Throws when accuracy <= 0.
double average_tc(double tokens_total, double accuracy_pct);

enum class MarginalKind {
    normal,
    negative_inefficient,      // more tokens for less accuracy
    undefined_equal_accuracy,  // division by zero accuracy delta
    degenerate_equal_tokens,   // same tokens; pick the higher accuracy instead
};

std::string to_string(MarginalKind kind);

struct MarginalTC {
    std::optional<double> value;  // unset iff undefined_equal_accuracy
    MarginalKind classification = MarginalKind::normal;
};

// (tokens_high - tokens_low) / (accuracy_high - accuracy_low); the caller
// orders the pair by token usage.
MarginalTC marginal_tc(const RunSummary& low, const RunSummary& high);

struct CellKey {
    std::string model;
    std::string benchmark;
    auto operator<=>(const CellKey&) const = default;
};

struct CellRatio {
    CellKey cell;
    double ratio = 0.0;
};

// Per (model, benchmark) cell, tokens(numerator)/tokens(denominator). Every
// cell present in the summaries must contain both strategies.
std::vector<CellRatio> observed_ratio_cells(std::span<const RunSummary> summaries,
                                            const std::string& numerator,
                                            const std::string& denominator);
// Average of the per-cell ratios.
double observed_ratio(std::span<const RunSummary> summaries, const std::string& numerator,
                      const std::string& denominator);

struct CellMarginal {
    CellKey cell;
    MarginalTC tc;
};

std::vector<CellMarginal> marginal_tc_cells(std::span<const RunSummary> summaries,
                                            const std::string& low, const std::string& high);
// Mean over cells with a defined value; throws when none is defined.
double mean_marginal_tc(std::span<const CellMarginal> cells);

// Pre-aggregated summary table, one row per (model, benchmark, strategy);
// required columns: model, benchmark, strategy, tokens_in, tokens_out,
// tokens_total, accuracy_pct, std_error_pct.
std::vector<RunSummary> load_summary_csv(const std::string& path);

std::string summary_to_json(const RunSummary& summary, std::optional<std::uint64_t> seed);
RunSummary summary_from_json(const std::string& json_text);

}  // namespace tokprof
