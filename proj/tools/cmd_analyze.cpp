#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "commands.hpp"
#include "tokprof/analysis.hpp"
#include "tokprof/harness.hpp"
#include "tokprof/metrics.hpp"
#include "tokprof/report.hpp"

namespace tokprof::cli {

namespace {

namespace fs = std::filesystem;

std::vector<RunSummary> load_sources(const std::vector<std::string>& sources) {
    if (sources.empty()) throw std::invalid_argument("pass at least one summary source");

    std::vector<RunSummary> summaries;
    for (const auto& source : sources) {
        const std::string extension = fs::path(source).extension().string();
        if (extension == ".csv") {
            const auto rows = load_summary_csv(source);
            summaries.insert(summaries.end(), rows.begin(), rows.end());
        } else if (extension == ".jsonl") {
            const RunRecordFile file = load_run_records(source);
            summaries.push_back(summarize_run(
                file.records, {file.meta.strategy, file.meta.benchmark, file.meta.model}));
        } else if (extension == ".json") {
            std::ifstream in(source);
            if (!in) throw std::runtime_error("cannot open summary: " + source);
            std::stringstream buffer;
            buffer << in.rdbuf();
            summaries.push_back(summary_from_json(buffer.str()));
        } else {
            throw std::invalid_argument("unrecognized source (expected .csv, .jsonl, or .json): " +
                                        source);
        }
    }
    return summaries;
}

std::vector<std::string> benchmarks_in(const std::vector<RunSummary>& summaries) {
    std::vector<std::string> benchmarks;
    for (const auto& summary : summaries) {
        if (std::find(benchmarks.begin(), benchmarks.end(), summary.benchmark) ==
            benchmarks.end()) {
            benchmarks.push_back(summary.benchmark);
        }
    }
    std::sort(benchmarks.begin(), benchmarks.end());
    return benchmarks;
}

// k per benchmark for the theoretical side: reference values where the
// benchmark is recognized, otherwise the most common default of 4.
std::vector<BenchmarkVar> vars_for(const std::vector<RunSummary>& summaries) {
    std::vector<BenchmarkVar> vars;
    for (const auto& benchmark : benchmarks_in(summaries)) {
        long long k = 4;
        for (const auto& reference : default_benchmark_vars()) {
            if (benchmark.find(reference.benchmark) != std::string::npos) k = reference.k;
        }
        vars.push_back({benchmark, k});
    }
    return vars;
}

bool table_strategies_present(const std::vector<RunSummary>& summaries) {
    std::map<std::pair<std::string, std::string>, std::set<std::string>> cells;
    for (const auto& summary : summaries) {
        cells[{summary.model, summary.benchmark}].insert(summary.strategy);
    }
    if (cells.empty()) return false;
    for (const auto& [cell, strategies] : cells) {
        for (const auto& label : table_strategy_labels()) {
            if (!strategies.count(label)) return false;
        }
    }
    return true;
}

std::vector<std::pair<std::string, TrendFit>> fit_all(const std::vector<RunSummary>& summaries) {
    std::vector<std::pair<std::string, TrendFit>> fits;
    for (const auto& benchmark : benchmarks_in(summaries)) {
        std::vector<std::pair<double, double>> points;
        for (const auto& summary : summaries) {
            if (summary.benchmark == benchmark) {
                points.push_back({summary.avg_tokens_total, summary.accuracy_pct});
            }
        }
        std::set<double> distinct;
        for (const auto& [x, _] : points) distinct.insert(x);
        if (points.size() < 2 || distinct.size() < 2) continue;  // nothing to fit
        fits.emplace_back(benchmark, fit_trend(points));
    }
    return fits;
}

std::vector<CostRow> cost_rows(const AnalyzeOptions& options,
                               const std::vector<RunSummary>& summaries) {
    const auto sheets = load_price_sheets(options.cost_path);
    if (options.cost_model.empty()) {
        throw std::invalid_argument("--cost needs --model to pick a price sheet row");
    }
    const PriceSheet& sheet = find_price_sheet(sheets, options.cost_model);

    std::vector<CostRow> rows;
    for (const auto& benchmark : benchmarks_in(summaries)) {
        std::optional<long long> samples = options.samples;
        if (!samples) samples = benchmark_sample_count(benchmark);
        if (!samples) {
            throw std::invalid_argument("no sample count known for benchmark '" + benchmark +
                                        "'; pass --samples");
        }

        // token averages per strategy, averaged over the models present
        std::map<std::string, std::pair<double, double>> totals;  // strategy -> (in, out)
        std::map<std::string, int> counts;
        for (const auto& summary : summaries) {
            if (summary.benchmark != benchmark) continue;
            totals[summary.strategy].first += summary.avg_tokens_in;
            totals[summary.strategy].second += summary.avg_tokens_out;
            counts[summary.strategy] += 1;
        }
        double usd = 0.0;
        for (const auto& [strategy, tokens] : totals) {
            const double n = static_cast<double>(counts[strategy]);
            usd += estimate_cost(tokens.first / n, tokens.second / n, *samples, sheet);
        }
        rows.push_back({benchmark, usd});
    }
    return rows;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << text;
}

ReportFormat parse_format(const std::string& text) {
    const auto format = report_format_from_string(text);
    if (!format) throw std::invalid_argument("unknown format: " + text);
    return *format;
}

CellKey parse_cell(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos || comma == 0 || comma + 1 == text.size()) {
        throw std::invalid_argument("--cell expects model,benchmark");
    }
    return CellKey{text.substr(0, comma), text.substr(comma + 1)};
}

}  // namespace

int run_analyze(const AnalyzeOptions& options) {
    const std::vector<RunSummary> summaries = load_sources(options.sources);
    bool did_something = false;

    if (options.ratios) {
        did_something = true;
        const auto cells = build_comparison_table(summaries, vars_for(summaries));
        std::cout << "pair (higher / lower): theoretical; observed\n";
        for (const auto& cell : cells) {
            std::printf("%s / %s: %g; %.2f\n", cell.higher.c_str(), cell.lower.c_str(),
                        cell.theoretical, cell.observed);
        }
    }

    if (!options.marginal.empty()) {
        did_something = true;
        const std::string& low = options.marginal[0];
        const std::string& high = options.marginal[1];
        auto cells = marginal_tc_cells(summaries, low, high);
        if (!options.cell.empty()) {
            const CellKey wanted = parse_cell(options.cell);
            const auto found = std::find_if(cells.begin(), cells.end(),
                                            [&](const CellMarginal& c) { return c.cell == wanted; });
            if (found == cells.end()) {
                throw std::invalid_argument("no cell (" + wanted.model + ", " + wanted.benchmark +
                                            ") in the sources");
            }
            cells = {*found};
        }
        for (const auto& cell : cells) {
            if (cell.tc.value) {
                std::printf("marginal TC %s -> %s [%s,%s]: %.2f %s\n", low.c_str(), high.c_str(),
                            cell.cell.model.c_str(), cell.cell.benchmark.c_str(), *cell.tc.value,
                            to_string(cell.tc.classification).c_str());
            } else {
                std::printf("marginal TC %s -> %s [%s,%s]: %s\n", low.c_str(), high.c_str(),
                            cell.cell.model.c_str(), cell.cell.benchmark.c_str(),
                            to_string(cell.tc.classification).c_str());
            }
        }
        if (cells.size() > 1) {
            std::printf("mean marginal TC %s -> %s over %zu cells: %.2f\n", low.c_str(),
                        high.c_str(), cells.size(), mean_marginal_tc(cells));
        }
    }

    if (options.fit) {
        did_something = true;
        for (const auto& [benchmark, fit] : fit_all(summaries)) {
            std::printf("trend [%s]: a=%.4f b=%.4f rmse=%.4f n=%d\n", benchmark.c_str(), fit.a,
                        fit.b, fit.rmse, fit.n_points);
        }
    }

    if (!options.cost_path.empty()) {
        did_something = true;
        double total = 0.0;
        for (const auto& row : cost_rows(options, summaries)) {
            std::printf("cost [%s] (%s): $%.2f\n", row.benchmark.c_str(),
                        options.cost_model.c_str(), row.usd);
            total += row.usd;
        }
        std::printf("cost total (%s): $%.2f\n", options.cost_model.c_str(), total);
    }

    if (!did_something) {
        // default action: the summary table in the requested format
        ReportInputs inputs;
        inputs.summaries = summaries;
        emit(emit_report(inputs, parse_format(options.format)), options.out_path);
    }
    return kExitOk;
}

int run_report(const AnalyzeOptions& options) {
    ReportInputs inputs;
    inputs.summaries = load_sources(options.sources);
    if (table_strategies_present(inputs.summaries)) {
        inputs.cells = build_comparison_table(inputs.summaries, vars_for(inputs.summaries));
    }
    inputs.fits = fit_all(inputs.summaries);
    if (!options.cost_path.empty()) {
        inputs.costs = cost_rows(options, inputs.summaries);
        inputs.cost_model = options.cost_model;
    }
    emit(emit_report(inputs, parse_format(options.format)), options.out_path);
    return kExitOk;
}

}  // namespace tokprof::cli
