#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tokprof/analysis.hpp"
#include "tokprof/metrics.hpp"

namespace tokprof {

enum class ReportFormat { markdown, csv, json };

std::optional<ReportFormat> report_format_from_string(const std::string& text);

struct CostRow {
    std::string benchmark;
    double usd = 0.0;
};

struct ReportInputs {
    std::vector<RunSummary> summaries;                    // required, non-empty
    std::vector<ComparisonCell> cells;                    // optional ratio table
    std::vector<std::pair<std::string, TrendFit>> fits;   // per benchmark
    std::vector<CostRow> costs;                           // optional
    std::string cost_model;                               // price sheet row used
};

// markdown: per-(model, benchmark) summary tables, the "theoretical;
// observed" ratio matrix, trend fits and costs when present.
// csv: the summary table in the pre-aggregated fixture schema.
// json: plot data {"plots":[{"benchmark","series":[{"strategy","points":
// [{"x","y","yerr"}]}],"trend":{"a","b"}}]}.
// Identical inputs produce identical bytes.
std::string emit_report(const ReportInputs& inputs, ReportFormat format);

}  // namespace tokprof
