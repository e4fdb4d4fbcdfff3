#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tokprof/complexity.hpp"
#include "tokprof/metrics.hpp"

namespace tokprof {

struct TrendFit {
    double a = 0.0;  // slope on u = ln(ln(x))
    double b = 0.0;  // intercept
    double rmse = 0.0;
    int n_points = 0;
};

// Least-squares fit of y = a*ln(ln(x)) + b via the closed-form solution on
// the transformed axis. Requires >= 2 points, all x > e, and >= 2 distinct x.
TrendFit fit_trend(std::span<const std::pair<double, double>> points);

struct PriceSheet {
    std::string provider_model;
    double price_in = 0.0;   // USD per 1M tokens
    double price_out = 0.0;
};

std::vector<PriceSheet> load_price_sheets(const std::string& path);
const PriceSheet& find_price_sheet(std::span<const PriceSheet> sheets,
                                   const std::string& provider_model);

// n_samples * (avg_in*price_in + avg_out*price_out) / 1e6.
double estimate_cost(double avg_in, double avg_out, long long n_samples, const PriceSheet& sheet);

// The six strategies of the ratio table in ascending token-usage order.
const std::vector<std::string>& table_strategy_labels();
// Position in that order, or -1 for labels outside the table.
int strategy_usage_rank(const std::string& label);
// Chains sampled by a table strategy label (cot_sc5 -> 5, others 1).
int label_sample_count(const std::string& label);
// Complexity class of a table strategy, derived through the engine.
BigOClass label_complexity_class(const std::string& label);

struct BenchmarkVar {
    std::string benchmark;
    long long k = 0;
};

struct ComparisonCell {
    std::string higher;
    std::string lower;
    double theoretical = 0.0;
    double observed = 0.0;
};

// All 15 unordered pairs of the table strategies, upper-triangular
// orientation (higher usage as numerator). Theoretical ratios come from the
// complexity engine under the per-benchmark k assignments, observed ratios
// from the summaries. Throws when a strategy is missing from a cell.
std::vector<ComparisonCell> build_comparison_table(std::span<const RunSummary> summaries,
                                                   std::span<const BenchmarkVar> assigns);

// k assignments matching the reference benchmarks (bbh 3, gsm8k 8, mmlu 4).
std::vector<BenchmarkVar> default_benchmark_vars();

}  // namespace tokprof
