#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "tokprof/dataset.hpp"

using namespace tokprof;
namespace fs = std::filesystem;

namespace {

struct TempFile {
    fs::path path;
    explicit TempFile(const std::string& name, const std::string& content) {
        path = fs::temp_directory_path() / ("tokprof_test_" + name);
        std::ofstream out(path);
        out << content;
    }
    ~TempFile() {
        std::error_code ec;
        fs::remove(path, ec);
    }
};

BenchmarkConfig config_for(const std::string& path, AnswerMode mode) {
    BenchmarkConfig config;
    config.name = "test";
    config.answer_mode = mode;
    config.eval_path = path;
    return config;
}

}  // namespace

TEST_CASE("a well-formed three-line file loads three items") {
    const TempFile file("three.jsonl",
                        R"({"id":"a","question":"Q1?","answer":"1"})"
                        "\n"
                        R"({"id":"b","question":"Q2?","answer":"2"})"
                        "\n"
                        R"({"id":"c","question":"Q3?","answer":"3"})"
                        "\n");
    const Benchmark benchmark = load_benchmark(config_for(file.path.string(), AnswerMode::number));
    CHECK(benchmark.items.size() == 3);
    CHECK(benchmark.items[1].id == "b");
    CHECK(benchmark.items[1].gold_answer == "2");
    // pool aliases the eval split when no separate fewshot path is given
    CHECK(benchmark.pool.size() == 3);
    CHECK(benchmark.pool[2].id == "c");
}

TEST_CASE("duplicate ids are rejected by name") {
    const TempFile file("dup.jsonl",
                        R"({"id":"same","question":"Q1?","answer":"1"})"
                        "\n"
                        R"({"id":"same","question":"Q2?","answer":"2"})"
                        "\n");
    try {
        load_benchmark(config_for(file.path.string(), AnswerMode::number));
        FAIL("expected duplicate id error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("same") != std::string::npos);
    }
}

TEST_CASE("malformed lines report the line number") {
    const TempFile file("bad.jsonl",
                        R"({"id":"a","question":"Q1?","answer":"1"})"
                        "\n"
                        "{broken\n");
    try {
        load_benchmark(config_for(file.path.string(), AnswerMode::number));
        FAIL("expected parse error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find(":2:") != std::string::npos);
    }
}

TEST_CASE("multiple-choice validation") {
    const TempFile bad_letter("mc1.jsonl",
                              R"({"id":"a","question":"Q?","answer":"E","choices":["w","x"]})"
                              "\n");
    CHECK_THROWS_AS(load_benchmark(config_for(bad_letter.path.string(), AnswerMode::multiple_choice)),
                    std::runtime_error);

    const TempFile too_few("mc2.jsonl",
                           R"({"id":"a","question":"Q?","answer":"A","choices":["only"]})"
                           "\n");
    CHECK_THROWS_AS(load_benchmark(config_for(too_few.path.string(), AnswerMode::multiple_choice)),
                    std::runtime_error);
}

TEST_CASE("multiple-choice pools bake choices and parenthesized answers") {
    const TempFile file(
        "mc3.jsonl",
        R"({"id":"a","question":"Pick one.","answer":"b","choices":["first","second","third"],"reasoning":"why"})"
        "\n");
    const Benchmark benchmark =
        load_benchmark(config_for(file.path.string(), AnswerMode::multiple_choice));
    REQUIRE(benchmark.pool.size() == 1);
    CHECK(benchmark.pool[0].exemplar.answer == "(B)");
    CHECK(benchmark.pool[0].exemplar.question.find("(A) first; (B) second; (C) third") !=
          std::string::npos);
    CHECK(benchmark.pool[0].exemplar.reasoning == "why");
}

TEST_CASE("a separate fewshot file feeds the pool") {
    const TempFile eval_file("eval.jsonl",
                             R"({"id":"e1","question":"Q?","answer":"1"})"
                             "\n");
    const TempFile pool_file("pool.jsonl",
                             R"({"id":"p1","question":"P?","answer":"2","reasoning":"r"})"
                             "\n"
                             R"({"id":"p2","question":"P2?","answer":"3","reasoning":"r2"})"
                             "\n");
    BenchmarkConfig config = config_for(eval_file.path.string(), AnswerMode::number);
    config.fewshot_path = pool_file.path.string();
    const Benchmark benchmark = load_benchmark(config);
    CHECK(benchmark.items.size() == 1);
    CHECK(benchmark.pool.size() == 2);
    CHECK(benchmark.pool[0].id == "p1");
}

TEST_CASE("builtin benchmark configs pin mode and exemplar count") {
    const BenchmarkConfig bbh = *builtin_benchmark_config("bbh");
    CHECK(bbh.answer_mode == AnswerMode::exact_text);
    CHECK(bbh.default_k == 3);
    const BenchmarkConfig gsm8k = *builtin_benchmark_config("gsm8k");
    CHECK(gsm8k.answer_mode == AnswerMode::number);
    CHECK(gsm8k.default_k == 8);
    const BenchmarkConfig mmlu = *builtin_benchmark_config("mmlu");
    CHECK(mmlu.answer_mode == AnswerMode::multiple_choice);
    CHECK(mmlu.default_k == 4);
    CHECK(!builtin_benchmark_config("triviaqa"));

    CHECK(*benchmark_sample_count("bbh") == 6511);
    CHECK(*benchmark_sample_count("gsm8k") == 1319);
    CHECK(*benchmark_sample_count("mmlu") == 1531);
}

TEST_CASE("answer mode inference from file names") {
    CHECK(*infer_answer_mode("fixtures/gsm8k_small.jsonl") == AnswerMode::number);
    CHECK(*infer_answer_mode("data/mmlu_val.jsonl") == AnswerMode::multiple_choice);
    CHECK(*infer_answer_mode("bbh_test.jsonl") == AnswerMode::exact_text);
    CHECK(!infer_answer_mode("mystery.jsonl"));
}

TEST_CASE("sample fixtures load cleanly") {
    for (const auto& [name, count] :
         {std::pair<std::string, int>{"gsm8k_small.jsonl", 20},
          {"bbh_small.jsonl", 20},
          {"mmlu_small.jsonl", 20}}) {
        const std::string path = std::string(TOKPROF_FIXTURE_DIR) + "/" + name;
        BenchmarkConfig config = config_for(path, *infer_answer_mode(path));
        const Benchmark benchmark = load_benchmark(config);
        CAPTURE(name);
        CHECK(static_cast<int>(benchmark.items.size()) == count);
        CHECK(benchmark.pool.size() == benchmark.items.size());
        for (const auto& row : benchmark.pool) {
            CHECK(row.exemplar.reasoning.has_value());
        }
    }
}
