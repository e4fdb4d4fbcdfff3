#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

namespace fs = std::filesystem;

namespace {

const std::string kFixtureDir = TOKPROF_FIXTURE_DIR;

struct CommandResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr
};

CommandResult run_cli(const std::string& args) {
    const char* binary = std::getenv("TOKPROF_BIN");
    REQUIRE_MESSAGE(binary != nullptr, "TOKPROF_BIN must point at the tokprof binary");

    const std::string command = std::string(binary) + " " + args + " 2>&1";
    FILE* pipe = popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);

    CommandResult result;
    std::array<char, 4096> buffer;
    std::size_t n = 0;
    while ((n = fread(buffer.data(), 1, buffer.size(), pipe)) > 0) {
        result.output.append(buffer.data(), n);
    }
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

}  // namespace

TEST_CASE("derive prints the polynomial and class") {
    const CommandResult result = run_cli("derive fewshot_cot --k 8");
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("1 + a + k + k*a") != std::string::npos);
    CHECK(result.output.find("O(k)") != std::string::npos);
}

TEST_CASE("derive evaluates growth rates") {
    const CommandResult result = run_cli("derive cot_sc --k 3 --p 5 --eval");
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("O(p*k)") != std::string::npos);
    CHECK(result.output.find("15") != std::string::npos);
}

TEST_CASE("derive loads user strategy definitions") {
    const CommandResult result = run_cli("derive --spec " + kFixtureDir + "/strategy_custom.json");
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("1 + a + psi + k + k*a") != std::string::npos);
}

TEST_CASE("usage errors exit with 1") {
    CHECK(run_cli("derive no_such_strategy").exit_code == 1);
    CHECK(run_cli("derive zeroshot_cot --k 2").exit_code == 1);
    CHECK(run_cli("derive").exit_code == 1);
    CHECK(run_cli("frobnicate").exit_code == 1);
    CHECK(run_cli("analyze " + kFixtureDir + "/paper_table6.csv --format pdf").exit_code == 1);
}

TEST_CASE("runtime and IO errors exit with 2") {
    CHECK(run_cli("analyze /nonexistent/table.csv").exit_code == 2);
    CHECK(run_cli("evaluate --mock oracle --strategy vanilla_io --benchmark /nonexistent.jsonl")
              .exit_code == 2);
}

TEST_CASE("help exits cleanly") {
    CHECK(run_cli("--help").exit_code == 0);
    CHECK(run_cli("evaluate --help").exit_code == 0);
}

TEST_CASE("an oracle mock run scores full accuracy") {
    const fs::path out_dir = fs::temp_directory_path() / "tokprof_cli_oracle";
    const CommandResult result =
        run_cli("evaluate --mock oracle --strategy vanilla_io --benchmark " + kFixtureDir +
                "/gsm8k_small.jsonl --limit 10 --out-dir " + out_dir.string());
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("acc=100.0%") != std::string::npos);
    CHECK(fs::exists(out_dir / "run_records.jsonl"));
    CHECK(fs::exists(out_dir / "summary.json"));
    CHECK(fs::exists(out_dir / "manifest.json"));
    fs::remove_all(out_dir);
}

TEST_CASE("a live endpoint without the API key names the variable") {
    // the variable may be set in the surrounding environment; drop it
    unsetenv("TOKPROF_API_KEY");
    const CommandResult result =
        run_cli("evaluate --strategy vanilla_io --benchmark " + kFixtureDir +
                "/gsm8k_small.jsonl --endpoint http://127.0.0.1:9/v1 --model m");
    CHECK(result.exit_code == 1);
    CHECK(result.output.find("TOKPROF_API_KEY") != std::string::npos);
}

TEST_CASE("analyze reproduces the headline ratio") {
    const CommandResult result =
        run_cli("analyze " + kFixtureDir + "/paper_table6.csv --ratios");
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("cot_sc10 / vanilla_io: 50; 29.30") != std::string::npos);
}

TEST_CASE("analyze prints a classified marginal TC for one cell") {
    const CommandResult result =
        run_cli("analyze " + kFixtureDir +
                "/paper_table6.csv --marginal vanilla_io fewshot_cot --cell llama,bbh");
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("42.22") != std::string::npos);
    CHECK(result.output.find("normal") != std::string::npos);
}

TEST_CASE("analyze costs apply the price sheet") {
    const CommandResult result =
        run_cli("analyze " + kFixtureDir + "/paper_table6.csv --cost " + kFixtureDir +
                "/prices.json --model gpt-4o-mini");
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("cost [gsm8k] (gpt-4o-mini): $4.35") != std::string::npos);
}

TEST_CASE("evaluate over multiple strategies writes per-strategy artifacts") {
    const fs::path out_dir = fs::temp_directory_path() / "tokprof_cli_multi";
    const CommandResult result = run_cli(
        "evaluate --mock gen:acc=0.7 --strategy vanilla_io --strategy vanilla_fewshot --k 2 "
        "--benchmark " +
        kFixtureDir + "/bbh_small.jsonl --limit 6 --seed 3 --out-dir " + out_dir.string());
    CHECK(result.exit_code == 0);
    CHECK(fs::exists(out_dir / "run_records_vanilla_io.jsonl"));
    CHECK(fs::exists(out_dir / "run_records_vanilla_fewshot.jsonl"));
    CHECK(fs::exists(out_dir / "summary_vanilla_fewshot.json"));
    fs::remove_all(out_dir);
}

TEST_CASE("report consumes run records produced by evaluate") {
    const fs::path out_dir = fs::temp_directory_path() / "tokprof_cli_report";
    CHECK(run_cli("evaluate --mock gen:acc=0.6 --strategy zeroshot_cot --benchmark " + kFixtureDir +
                  "/mmlu_small.jsonl --seed 5 --out-dir " + out_dir.string())
              .exit_code == 0);
    const CommandResult result =
        run_cli("report " + (out_dir / "run_records.jsonl").string() + " --format csv");
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("model,benchmark,strategy,tokens_in") != std::string::npos);
    CHECK(result.output.find("zeroshot_cot") != std::string::npos);
    fs::remove_all(out_dir);
}
