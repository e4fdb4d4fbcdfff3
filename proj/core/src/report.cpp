#include "tokprof/report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace tokprof {

namespace {

using nlohmann::json;

std::string fixed(double value, int digits) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.*f", digits, value);
    return buffer;
}

std::string compact(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%g", value);
    return buffer;
}

// Table order: canonical usage rank first, anything else after, by name.
bool strategy_less(const std::string& lhs, const std::string& rhs) {
    const int lrank = strategy_usage_rank(lhs);
    const int rrank = strategy_usage_rank(rhs);
    if (lrank >= 0 && rrank >= 0) return lrank < rrank;
    if (lrank >= 0) return true;
    if (rrank >= 0) return false;
    return lhs < rhs;
}

std::vector<RunSummary> sorted_summaries(const std::vector<RunSummary>& input) {
    std::vector<RunSummary> summaries = input;
    std::sort(summaries.begin(), summaries.end(), [](const RunSummary& a, const RunSummary& b) {
        if (a.model != b.model) return a.model < b.model;
        if (a.benchmark != b.benchmark) return a.benchmark < b.benchmark;
        return strategy_less(a.strategy, b.strategy);
    });
    return summaries;
}

std::string markdown_report(const ReportInputs& inputs) {
    const std::vector<RunSummary> summaries = sorted_summaries(inputs.summaries);

    std::string out = "# Token usage profile\n";

    out += "\n## Run summaries\n";
    std::string block;
    for (const auto& summary : summaries) {
        const std::string key = summary.model + " / " + summary.benchmark;
        if (key != block) {
            block = key;
            out += "\n### " + key + "\n\n";
            out += "| Strategy | Tokens In | Tokens Out | Tokens Total | Accuracy (%) | Std Err (%) | Avg TC (t/p) |\n";
            out += "|---|---|---|---|---|---|---|\n";
        }
        out += "| " + summary.strategy + " | " + fixed(summary.avg_tokens_in, 1) + " | " +
               fixed(summary.avg_tokens_out, 1) + " | " + fixed(summary.avg_tokens_total, 1) +
               " | " + fixed(summary.accuracy_pct, 1) + " | " + fixed(summary.std_error_pct, 2) +
               " | " + (summary.average_tc ? fixed(*summary.average_tc, 2) : "n/a") + " |\n";
    }

    if (!inputs.cells.empty()) {
        out += "\n## Token usage ratios (theoretical; observed)\n\n";
        out += "Column: higher usage (numerator). Row: lower usage (denominator).\n\n";

        std::vector<std::string> columns;  // numerators, highest usage first
        std::vector<std::string> rows;     // denominators, lowest usage first
        for (const auto& cell : inputs.cells) {
            if (std::find(columns.begin(), columns.end(), cell.higher) == columns.end()) {
                columns.push_back(cell.higher);
            }
            if (std::find(rows.begin(), rows.end(), cell.lower) == rows.end()) {
                rows.push_back(cell.lower);
            }
        }
        std::sort(columns.begin(), columns.end(),
                  [](const auto& a, const auto& b) { return strategy_less(b, a); });
        std::sort(rows.begin(), rows.end(), strategy_less);

        out += "| |";
        for (const auto& column : columns) out += " " + column + " |";
        out += "\n|---|";
        for (std::size_t i = 0; i < columns.size(); ++i) out += "---|";
        out += "\n";
        for (const auto& row : rows) {
            out += "| " + row + " |";
            for (const auto& column : columns) {
                const auto cell = std::find_if(inputs.cells.begin(), inputs.cells.end(),
                                               [&](const ComparisonCell& c) {
                                                   return c.higher == column && c.lower == row;
                                               });
                if (cell == inputs.cells.end()) {
                    out += " |";
                } else {
                    out += " " + compact(cell->theoretical) + "; " + fixed(cell->observed, 1) + " |";
                }
            }
            out += "\n";
        }
    }

    if (!inputs.fits.empty()) {
        out += "\n## Accuracy vs token usage trend (y = a*ln(ln(x)) + b)\n\n";
        out += "| Benchmark | a | b | RMSE | Points |\n|---|---|---|---|---|\n";
        for (const auto& [benchmark, fit] : inputs.fits) {
            out += "| " + benchmark + " | " + fixed(fit.a, 4) + " | " + fixed(fit.b, 4) + " | " +
                   fixed(fit.rmse, 4) + " | " + std::to_string(fit.n_points) + " |\n";
        }
    }

    if (!inputs.costs.empty()) {
        out += "\n## Estimated cost";
        if (!inputs.cost_model.empty()) out += " (" + inputs.cost_model + ")";
        out += "\n\n| Benchmark | USD |\n|---|---|\n";
        for (const auto& row : inputs.costs) {
            out += "| " + row.benchmark + " | " + fixed(row.usd, 2) + " |\n";
        }
    }
    return out;
}

std::string csv_report(const ReportInputs& inputs) {
    std::string out =
        "model,benchmark,strategy,tokens_in,tokens_out,tokens_total,accuracy_pct,std_error_pct\n";
    for (const auto& summary : sorted_summaries(inputs.summaries)) {
        out += summary.model + "," + summary.benchmark + "," + summary.strategy + "," +
               fixed(summary.avg_tokens_in, 4) + "," + fixed(summary.avg_tokens_out, 4) + "," +
               fixed(summary.avg_tokens_total, 4) + "," + fixed(summary.accuracy_pct, 4) + "," +
               fixed(summary.std_error_pct, 4) + "\n";
    }
    return out;
}

std::string json_report(const ReportInputs& inputs) {
    const std::vector<RunSummary> summaries = sorted_summaries(inputs.summaries);

    std::vector<std::string> benchmarks;
    for (const auto& summary : summaries) {
        if (std::find(benchmarks.begin(), benchmarks.end(), summary.benchmark) ==
            benchmarks.end()) {
            benchmarks.push_back(summary.benchmark);
        }
    }
    std::sort(benchmarks.begin(), benchmarks.end());

    json plots = json::array();
    for (const auto& benchmark : benchmarks) {
        json plot;
        plot["benchmark"] = benchmark;
        plot["series"] = json::array();

        std::vector<std::string> strategies;
        for (const auto& summary : summaries) {
            if (summary.benchmark != benchmark) continue;
            if (std::find(strategies.begin(), strategies.end(), summary.strategy) ==
                strategies.end()) {
                strategies.push_back(summary.strategy);
            }
        }
        std::sort(strategies.begin(), strategies.end(), strategy_less);

        for (const auto& strategy : strategies) {
            json series;
            series["strategy"] = strategy;
            series["points"] = json::array();
            for (const auto& summary : summaries) {
                if (summary.benchmark != benchmark || summary.strategy != strategy) continue;
                series["points"].push_back({{"x", summary.avg_tokens_total},
                                            {"y", summary.accuracy_pct},
                                            {"yerr", summary.std_error_pct}});
            }
            plot["series"].push_back(std::move(series));
        }

        for (const auto& [fit_benchmark, fit] : inputs.fits) {
            if (fit_benchmark == benchmark) {
                plot["trend"] = {{"a", fit.a}, {"b", fit.b}};
            }
        }
        plots.push_back(std::move(plot));
    }

    json doc;
    doc["plots"] = std::move(plots);
    return doc.dump(2) + "\n";
}

}  // namespace

std::optional<ReportFormat> report_format_from_string(const std::string& text) {
    if (text == "markdown") return ReportFormat::markdown;
    if (text == "csv") return ReportFormat::csv;
    if (text == "json") return ReportFormat::json;
    return std::nullopt;
}

std::string emit_report(const ReportInputs& inputs, ReportFormat format) {
    if (inputs.summaries.empty()) throw std::invalid_argument("report needs at least one summary");
    switch (format) {
        case ReportFormat::markdown: return markdown_report(inputs);
        case ReportFormat::csv: return csv_report(inputs);
        case ReportFormat::json: return json_report(inputs);
    }
    throw std::invalid_argument("unknown report format");
}

}  // namespace tokprof
