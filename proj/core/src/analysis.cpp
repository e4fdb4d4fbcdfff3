#include "tokprof/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace tokprof {

namespace {

using nlohmann::json;

const double kEuler = std::exp(1.0);

}  // namespace

TrendFit fit_trend(std::span<const std::pair<double, double>> points) {
    if (points.size() < 2) throw std::invalid_argument("fit_trend needs at least 2 points");
    for (const auto& [x, y] : points) {
        if (!(x > kEuler)) {
            throw std::invalid_argument("fit_trend requires x > e, got x=" + std::to_string(x));
        }
    }

    const double n = static_cast<double>(points.size());
    double sum_u = 0.0;
    double sum_y = 0.0;
    for (const auto& [x, y] : points) {
        sum_u += std::log(std::log(x));
        sum_y += y;
    }
    const double mean_u = sum_u / n;
    const double mean_y = sum_y / n;

    double suu = 0.0;
    double suy = 0.0;
    for (const auto& [x, y] : points) {
        const double du = std::log(std::log(x)) - mean_u;
        suu += du * du;
        suy += du * (y - mean_y);
    }
    if (suu == 0.0) throw std::invalid_argument("fit_trend needs at least 2 distinct x values");

    TrendFit fit;
    fit.a = suy / suu;
    fit.b = mean_y - fit.a * mean_u;
    fit.n_points = static_cast<int>(points.size());

    double sq = 0.0;
    for (const auto& [x, y] : points) {
        const double r = y - (fit.a * std::log(std::log(x)) + fit.b);
        sq += r * r;
    }
    fit.rmse = std::sqrt(sq / n);
    return fit;
}

std::vector<PriceSheet> load_price_sheets(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open price sheet: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw std::runtime_error("bad price sheet " + path + ": " + e.what());
    }
    if (!doc.is_array()) throw std::runtime_error(path + ": expected a JSON array");

    std::vector<PriceSheet> sheets;
    for (const auto& entry : doc) {
        PriceSheet sheet;
        sheet.provider_model = entry.at("provider_model").get<std::string>();
        sheet.price_in = entry.at("price_in").get<double>();
        sheet.price_out = entry.at("price_out").get<double>();
        if (sheet.price_in < 0.0 || sheet.price_out < 0.0) {
            throw std::runtime_error(path + ": negative price for " + sheet.provider_model);
        }
        sheets.push_back(std::move(sheet));
    }
    return sheets;
}

const PriceSheet& find_price_sheet(std::span<const PriceSheet> sheets,
                                   const std::string& provider_model) {
    for (const auto& sheet : sheets) {
        if (sheet.provider_model == provider_model) return sheet;
    }
    std::string known;
    for (const auto& sheet : sheets) {
        if (!known.empty()) known += ", ";
        known += sheet.provider_model;
    }
    throw std::invalid_argument("no price sheet for '" + provider_model + "' (have: " + known + ")");
}

double estimate_cost(double avg_in, double avg_out, long long n_samples, const PriceSheet& sheet) {
    if (avg_in < 0.0 || avg_out < 0.0 || n_samples < 0) {
        throw std::invalid_argument("estimate_cost inputs must be non-negative");
    }
    return static_cast<double>(n_samples) * (avg_in * sheet.price_in + avg_out * sheet.price_out) /
           1e6;
}

const std::vector<std::string>& table_strategy_labels() {
    static const std::vector<std::string> labels = {
        "vanilla_io", "zeroshot_cot", "vanilla_fewshot", "fewshot_cot", "cot_sc5", "cot_sc10",
    };
    return labels;
}

int strategy_usage_rank(const std::string& label) {
    const auto& labels = table_strategy_labels();
    const auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) return -1;
    return static_cast<int>(it - labels.begin());
}

int label_sample_count(const std::string& label) {
    if (label == "cot_sc5") return 5;
    if (label == "cot_sc10") return 10;
    return 1;
}

BigOClass label_complexity_class(const std::string& label) {
    const int p = label_sample_count(label);
    const std::string base = label.rfind("cot_sc", 0) == 0 ? "cot_sc" : label;
    const bool zeroshot = base == "vanilla_io" || base == "zeroshot_cot";
    const StrategySpec spec = build_builtin(base, zeroshot ? 0 : 1, p);
    return simplify_to_bigo(derive_complexity(spec));
}

std::vector<BenchmarkVar> default_benchmark_vars() {
    return {{"bbh", 3}, {"gsm8k", 8}, {"mmlu", 4}};
}

std::vector<ComparisonCell> build_comparison_table(std::span<const RunSummary> summaries,
                                                   std::span<const BenchmarkVar> assigns) {
    if (assigns.empty()) throw std::invalid_argument("comparison table needs k assignments");

    const auto& labels = table_strategy_labels();
    std::vector<ComparisonCell> cells;
    for (std::size_t low = 0; low < labels.size(); ++low) {
        for (std::size_t high = labels.size(); high-- > low + 1;) {
            ComparisonCell cell;
            cell.higher = labels[high];
            cell.lower = labels[low];

            std::vector<AssignmentPair> pairs;
            pairs.reserve(assigns.size());
            for (const auto& var : assigns) {
                AssignmentPair pair;
                pair.higher = {var.k, label_sample_count(cell.higher)};
                pair.lower = {var.k, label_sample_count(cell.lower)};
                pairs.push_back(pair);
            }
            cell.theoretical = theoretical_ratio(label_complexity_class(cell.higher),
                                                 label_complexity_class(cell.lower), pairs);
            cell.observed = observed_ratio(summaries, cell.higher, cell.lower);
            cells.push_back(std::move(cell));
        }
    }
    return cells;
}

}  // namespace tokprof
