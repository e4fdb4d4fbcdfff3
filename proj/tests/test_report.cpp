#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "tokprof/report.hpp"

using namespace tokprof;
namespace fs = std::filesystem;

namespace {

const std::string kFixtureDir = TOKPROF_FIXTURE_DIR;

ReportInputs fixture_inputs() {
    ReportInputs inputs;
    inputs.summaries = load_summary_csv(kFixtureDir + "/paper_table6.csv");
    inputs.cells = build_comparison_table(inputs.summaries, default_benchmark_vars());

    for (const auto& benchmark : {"bbh", "gsm8k", "mmlu"}) {
        std::vector<std::pair<double, double>> points;
        for (const auto& summary : inputs.summaries) {
            if (summary.benchmark == benchmark) {
                points.push_back({summary.avg_tokens_total, summary.accuracy_pct});
            }
        }
        inputs.fits.emplace_back(benchmark, fit_trend(points));
    }
    return inputs;
}

std::size_t count_lines_with(const std::string& text, const std::string& needle) {
    std::size_t count = 0;
    std::size_t at = 0;
    while ((at = text.find(needle, at)) != std::string::npos) {
        ++count;
        ++at;
    }
    return count;
}

}  // namespace

TEST_CASE("markdown report carries one six-row block per model and benchmark") {
    const ReportInputs inputs = fixture_inputs();
    const std::string report = emit_report(inputs, ReportFormat::markdown);

    CHECK(count_lines_with(report, "### ") == 9);  // 3 models x 3 benchmarks
    const std::string summaries_part = report.substr(0, report.find("## Token usage ratios"));
    CHECK(count_lines_with(summaries_part, "| vanilla_io |") == 9);
    CHECK(count_lines_with(summaries_part, "| cot_sc10 |") == 9);
    CHECK(report.find("| Strategy | Tokens In | Tokens Out | Tokens Total | Accuracy (%) | Std Err (%) | Avg TC (t/p) |") != std::string::npos);
    CHECK(report.find("Token usage ratios") != std::string::npos);
    CHECK(report.find("50; 29.3") != std::string::npos);  // headline cell
    CHECK(report.find("Accuracy vs token usage trend") != std::string::npos);
}

TEST_CASE("report output is byte-stable") {
    const ReportInputs inputs = fixture_inputs();
    for (const auto format : {ReportFormat::markdown, ReportFormat::csv, ReportFormat::json}) {
        CHECK(emit_report(inputs, format) == emit_report(inputs, format));
    }
}

TEST_CASE("an empty summary list is rejected") {
    CHECK_THROWS_AS(emit_report(ReportInputs{}, ReportFormat::markdown), std::invalid_argument);
}

TEST_CASE("csv output round trips through the summary loader") {
    const ReportInputs inputs = fixture_inputs();
    const std::string csv = emit_report(inputs, ReportFormat::csv);

    const fs::path path = fs::temp_directory_path() / "tokprof_test_report.csv";
    {
        std::ofstream out(path);
        out << csv;
    }
    const auto loaded = load_summary_csv(path.string());
    REQUIRE(loaded.size() == inputs.summaries.size());
    const auto ratio = observed_ratio(loaded, "cot_sc10", "vanilla_io");
    CHECK(ratio == doctest::Approx(29.29).epsilon(0.001));
    fs::remove(path);
}

TEST_CASE("json output is per-benchmark plot data") {
    const ReportInputs inputs = fixture_inputs();
    const auto doc = nlohmann::json::parse(emit_report(inputs, ReportFormat::json));
    REQUIRE(doc.contains("plots"));
    REQUIRE(doc["plots"].size() == 3);
    for (const auto& plot : doc["plots"]) {
        CHECK(plot.contains("benchmark"));
        CHECK(plot["series"].size() == 6);
        for (const auto& series : plot["series"]) {
            CHECK(series["points"].size() == 3);  // one point per model
            for (const auto& point : series["points"]) {
                CHECK(point.contains("x"));
                CHECK(point.contains("y"));
                CHECK(point.contains("yerr"));
            }
        }
        REQUIRE(plot.contains("trend"));
        CHECK(plot["trend"].contains("a"));
        CHECK(plot["trend"].contains("b"));
    }
}

TEST_CASE("report format names") {
    CHECK(*report_format_from_string("markdown") == ReportFormat::markdown);
    CHECK(*report_format_from_string("csv") == ReportFormat::csv);
    CHECK(*report_format_from_string("json") == ReportFormat::json);
    CHECK(!report_format_from_string("pdf"));
}
