#include "tokprof/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace tokprof {

namespace {

using nlohmann::json;

constexpr double kOutlierSigmas = 4.0;

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (const char c : line) {
        if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
        } else if (c != '\r') {
            current += c;
        }
    }
    fields.push_back(std::move(current));
    return fields;
}

std::string trimmed(const std::string& text) {
    std::size_t begin = 0;
    std::size_t end = text.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
    return text.substr(begin, end - begin);
}

// (model, benchmark) -> strategy -> summary
using CellMap = std::map<CellKey, std::map<std::string, const RunSummary*>>;

CellMap group_by_cell(std::span<const RunSummary> summaries) {
    CellMap cells;
    for (const auto& summary : summaries) {
        cells[CellKey{summary.model, summary.benchmark}][summary.strategy] = &summary;
    }
    return cells;
}

const RunSummary& cell_entry(const CellMap& cells, const CellKey& key,
                             const std::string& strategy) {
    const auto cell = cells.find(key);
    if (cell != cells.end()) {
        const auto entry = cell->second.find(strategy);
        if (entry != cell->second.end()) return *entry->second;
    }
    throw std::invalid_argument("no summary for strategy '" + strategy + "' in cell (" +
                                key.model + ", " + key.benchmark + ")");
}

}  // namespace

double estimate_tokens(std::string_view text) {
    return static_cast<double>(text.size()) / 4.0;
}

FilterResult filter_outliers(const std::vector<CompletionRecord>& records) {
    // Mean and population sigma over the non-empty outputs, computed once;
    // the band is not re-derived after exclusions.
    double sum = 0.0;
    long long n = 0;
    for (const auto& record : records) {
        if (record.output_text.empty()) continue;
        sum += static_cast<double>(record.output_text.size());
        ++n;
    }
    double mean = 0.0;
    double sigma = 0.0;
    if (n >= 2) {
        mean = sum / static_cast<double>(n);
        double sq = 0.0;
        for (const auto& record : records) {
            if (record.output_text.empty()) continue;
            const double d = static_cast<double>(record.output_text.size()) - mean;
            sq += d * d;
        }
        sigma = std::sqrt(sq / static_cast<double>(n));
    }

    FilterResult result;
    for (const auto& record : records) {
        if (record.output_text.empty()) {
            result.excluded.push_back(record);
            continue;
        }
        if (n >= 2) {
            const double deviation =
                std::abs(static_cast<double>(record.output_text.size()) - mean);
            if (deviation > kOutlierSigmas * sigma) {
                result.excluded.push_back(record);
                continue;
            }
        }
        result.kept.push_back(record);
    }
    return result;
}

RunSummary summarize_run(const std::vector<EvalRecord>& records, const SummaryLabels& labels) {
    if (records.empty()) throw std::invalid_argument("summarize_run needs at least one record");

    RunSummary summary;
    summary.strategy = labels.strategy;
    summary.benchmark = labels.benchmark;
    summary.model = labels.model;
    summary.n_items = static_cast<long long>(records.size());

    // Accuracy counts every item; token filtering below never touches it.
    long long correct = 0;
    for (const auto& record : records) {
        if (record.correct) ++correct;
    }
    const double fraction = static_cast<double>(correct) / static_cast<double>(records.size());
    summary.accuracy_pct = 100.0 * fraction;
    summary.std_error_pct =
        100.0 * std::sqrt(fraction * (1.0 - fraction) / static_cast<double>(records.size()));

    std::vector<CompletionRecord> pooled;
    for (const auto& record : records) {
        pooled.insert(pooled.end(), record.completions.begin(), record.completions.end());
    }
    const FilterResult filtered = filter_outliers(pooled);
    summary.n_excluded = static_cast<long long>(filtered.excluded.size());

    std::set<std::pair<std::string, int>> excluded_keys;
    for (const auto& record : filtered.excluded) {
        excluded_keys.emplace(record.item_id, record.sample_index);
    }

    // Chain tokens are summed per item (input counted once per sample), then
    // averaged over the items that kept at least one completion.
    double total_in = 0.0;
    double total_out = 0.0;
    long long counted_items = 0;
    for (const auto& record : records) {
        double item_in = 0.0;
        double item_out = 0.0;
        bool any_kept = false;
        for (const auto& completion : record.completions) {
            if (excluded_keys.count({completion.item_id, completion.sample_index})) continue;
            item_in += completion.input_tokens;
            item_out += completion.output_tokens;
            any_kept = true;
        }
        if (!any_kept) continue;
        total_in += item_in;
        total_out += item_out;
        ++counted_items;
    }
    if (counted_items > 0) {
        summary.avg_tokens_in = total_in / static_cast<double>(counted_items);
        summary.avg_tokens_out = total_out / static_cast<double>(counted_items);
    }
    summary.avg_tokens_total = summary.avg_tokens_in + summary.avg_tokens_out;

    if (summary.accuracy_pct > 0.0) {
        summary.average_tc = average_tc(summary.avg_tokens_total, summary.accuracy_pct);
    }
    return summary;
}

double average_tc(double tokens_total, double accuracy_pct) {
    if (accuracy_pct <= 0.0) {
        throw std::invalid_argument("average TC is undefined at zero accuracy");
    }
    return tokens_total / accuracy_pct;
}

std::string to_string(MarginalKind kind) {
    switch (kind) {
        case MarginalKind::normal: return "normal";
        case MarginalKind::negative_inefficient: return "negative_inefficient";
        case MarginalKind::undefined_equal_accuracy: return "undefined_equal_accuracy";
        case MarginalKind::degenerate_equal_tokens: return "degenerate_equal_tokens";
    }
    return "normal";
}

MarginalTC marginal_tc(const RunSummary& low, const RunSummary& high) {
    const double delta_tokens = high.avg_tokens_total - low.avg_tokens_total;
    const double delta_accuracy = high.accuracy_pct - low.accuracy_pct;
    if (delta_tokens < 0.0) {
        throw std::invalid_argument("marginal_tc expects the pair ordered by token usage");
    }

    MarginalTC result;
    if (delta_accuracy == 0.0) {
        result.classification = MarginalKind::undefined_equal_accuracy;
        return result;
    }
    result.value = delta_tokens / delta_accuracy;
    if (delta_tokens == 0.0) {
        result.classification = MarginalKind::degenerate_equal_tokens;
    } else if (delta_accuracy < 0.0) {
        result.classification = MarginalKind::negative_inefficient;
    } else {
        result.classification = MarginalKind::normal;
    }
    return result;
}

std::vector<CellRatio> observed_ratio_cells(std::span<const RunSummary> summaries,
                                            const std::string& numerator,
                                            const std::string& denominator) {
    const CellMap cells = group_by_cell(summaries);
    if (cells.empty()) throw std::invalid_argument("no summaries to compare");

    std::vector<CellRatio> ratios;
    for (const auto& [key, _] : cells) {
        const RunSummary& high = cell_entry(cells, key, numerator);
        const RunSummary& low = cell_entry(cells, key, denominator);
        if (low.avg_tokens_total <= 0.0) {
            throw std::invalid_argument("zero denominator tokens in cell (" + key.model + ", " +
                                        key.benchmark + ")");
        }
        ratios.push_back({key, high.avg_tokens_total / low.avg_tokens_total});
    }
    return ratios;
}

double observed_ratio(std::span<const RunSummary> summaries, const std::string& numerator,
                      const std::string& denominator) {
    const std::vector<CellRatio> cells = observed_ratio_cells(summaries, numerator, denominator);
    double sum = 0.0;
    for (const auto& cell : cells) sum += cell.ratio;
    return sum / static_cast<double>(cells.size());
}

std::vector<CellMarginal> marginal_tc_cells(std::span<const RunSummary> summaries,
                                            const std::string& low, const std::string& high) {
    const CellMap cells = group_by_cell(summaries);
    if (cells.empty()) throw std::invalid_argument("no summaries to compare");

    std::vector<CellMarginal> result;
    for (const auto& [key, _] : cells) {
        const RunSummary& lo = cell_entry(cells, key, low);
        const RunSummary& hi = cell_entry(cells, key, high);
        // Order each cell by observed token usage, as the formula requires.
        if (hi.avg_tokens_total >= lo.avg_tokens_total) {
            result.push_back({key, marginal_tc(lo, hi)});
        } else {
            result.push_back({key, marginal_tc(hi, lo)});
        }
    }
    return result;
}

double mean_marginal_tc(std::span<const CellMarginal> cells) {
    double sum = 0.0;
    long long defined = 0;
    for (const auto& cell : cells) {
        if (!cell.tc.value) continue;
        sum += *cell.tc.value;
        ++defined;
    }
    if (defined == 0) throw std::invalid_argument("marginal TC undefined in every cell");
    return sum / static_cast<double>(defined);
}

std::vector<RunSummary> load_summary_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open summary table: " + path);

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");

    const std::vector<std::string> header = split_csv_line(line);
    std::map<std::string, std::size_t> columns;
    for (std::size_t i = 0; i < header.size(); ++i) columns[trimmed(header[i])] = i;

    const char* required[] = {"model",        "benchmark",    "strategy",
                              "tokens_in",    "tokens_out",   "tokens_total",
                              "accuracy_pct", "std_error_pct"};
    for (const char* name : required) {
        if (!columns.count(name)) {
            throw std::runtime_error(path + ": missing column '" + name + "'");
        }
    }

    auto field = [&](const std::vector<std::string>& fields, const char* name) {
        const std::size_t index = columns.at(name);
        if (index >= fields.size()) throw std::invalid_argument("short row");
        return trimmed(fields[index]);
    };
    auto numeric = [&](const std::vector<std::string>& fields, const char* name) {
        const std::string text = field(fields, name);
        try {
            std::size_t used = 0;
            const double value = std::stod(text, &used);
            if (used != text.size()) throw std::invalid_argument(text);
            return value;
        } catch (const std::exception&) {
            throw std::invalid_argument("bad number '" + text + "' in column " + name);
        }
    };

    std::vector<RunSummary> summaries;
    long long line_number = 1;
    while (std::getline(in, line)) {
        ++line_number;
        if (trimmed(line).empty()) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        try {
            RunSummary summary;
            summary.model = field(fields, "model");
            summary.benchmark = field(fields, "benchmark");
            summary.strategy = field(fields, "strategy");
            summary.avg_tokens_in = numeric(fields, "tokens_in");
            summary.avg_tokens_out = numeric(fields, "tokens_out");
            summary.avg_tokens_total = numeric(fields, "tokens_total");
            summary.accuracy_pct = numeric(fields, "accuracy_pct");
            summary.std_error_pct = numeric(fields, "std_error_pct");
            if (summary.accuracy_pct > 0.0) {
                summary.average_tc = average_tc(summary.avg_tokens_total, summary.accuracy_pct);
            }
            summaries.push_back(std::move(summary));
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(line_number) + ": " + e.what());
        }
    }
    return summaries;
}

std::string summary_to_json(const RunSummary& summary, std::optional<std::uint64_t> seed) {
    json doc;
    doc["strategy"] = summary.strategy;
    doc["benchmark"] = summary.benchmark;
    doc["model"] = summary.model;
    doc["n_items"] = summary.n_items;
    doc["n_excluded"] = summary.n_excluded;
    doc["avg_tokens_in"] = summary.avg_tokens_in;
    doc["avg_tokens_out"] = summary.avg_tokens_out;
    doc["avg_tokens_total"] = summary.avg_tokens_total;
    doc["accuracy_pct"] = summary.accuracy_pct;
    doc["std_error_pct"] = summary.std_error_pct;
    doc["average_tc"] = summary.average_tc ? json(*summary.average_tc) : json(nullptr);
    if (seed) doc["seed"] = *seed;
    return doc.dump(2);
}

RunSummary summary_from_json(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("invalid summary JSON: ") + e.what());
    }
    RunSummary summary;
    summary.strategy = doc.at("strategy").get<std::string>();
    summary.benchmark = doc.at("benchmark").get<std::string>();
    summary.model = doc.at("model").get<std::string>();
    summary.n_items = doc.value("n_items", 0LL);
    summary.n_excluded = doc.value("n_excluded", 0LL);
    summary.avg_tokens_in = doc.at("avg_tokens_in").get<double>();
    summary.avg_tokens_out = doc.at("avg_tokens_out").get<double>();
    summary.avg_tokens_total = doc.at("avg_tokens_total").get<double>();
    summary.accuracy_pct = doc.at("accuracy_pct").get<double>();
    summary.std_error_pct = doc.at("std_error_pct").get<double>();
    if (doc.contains("average_tc") && !doc.at("average_tc").is_null()) {
        summary.average_tc = doc.at("average_tc").get<double>();
    }
    return summary;
}

}  // namespace tokprof
