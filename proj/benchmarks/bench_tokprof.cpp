#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "tokprof/complexity.hpp"
#include "tokprof/dataset.hpp"
#include "tokprof/harness.hpp"
#include "tokprof/metrics.hpp"
#include "tokprof/strategy.hpp"

namespace {

using namespace tokprof;

void BM_DeriveAndSimplify(benchmark::State& state) {
    const StrategySpec spec = build_builtin("cot_sc", 8, 10);
    for (auto _ : state) {
        benchmark::DoNotOptimize(simplify_to_bigo(derive_complexity(spec)));
    }
}
BENCHMARK(BM_DeriveAndSimplify);

void BM_RenderFewshotPrompt(benchmark::State& state) {
    const StrategySpec spec = build_builtin("fewshot_cot", static_cast<int>(state.range(0)), 1);
    BenchmarkItem item;
    item.id = "bench";
    item.question = "If a train travels 60 miles per hour for 4 hours, how far does it go?";
    item.gold_answer = "240";
    std::vector<Exemplar> exemplars;
    for (int i = 0; i < state.range(0); ++i) {
        exemplars.push_back(Exemplar{"What is " + std::to_string(i) + " squared?",
                                     "multiplying the number by itself",
                                     std::to_string(i * i)});
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(render_prompt(spec, item, exemplars, 0));
    }
}
BENCHMARK(BM_RenderFewshotPrompt)->Arg(1)->Arg(4)->Arg(8);

void BM_ExtractNumber(benchmark::State& state) {
    std::string output = "Working through the steps keeps the reasoning consistent. ";
    for (int i = 0; i < 20; ++i) output += "Intermediate value " + std::to_string(i * 7) + ". ";
    output += "The answer is 1,234.5.";
    for (auto _ : state) {
        benchmark::DoNotOptimize(extract_answer(output, AnswerMode::number));
    }
}
BENCHMARK(BM_ExtractNumber);

void BM_SampleExemplars(benchmark::State& state) {
    std::vector<ExemplarRow> pool;
    for (int i = 0; i < 1000; ++i) {
        pool.push_back({"id" + std::to_string(i),
                        Exemplar{"Q" + std::to_string(i), std::nullopt, "A" + std::to_string(i)}});
    }
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_exemplars(pool, 8, "id500", ++seed));
    }
}
BENCHMARK(BM_SampleExemplars);

void BM_SummarizeRun(benchmark::State& state) {
    std::vector<EvalRecord> records;
    for (int i = 0; i < state.range(0); ++i) {
        EvalRecord record;
        record.item_id = "it" + std::to_string(i);
        record.correct = i % 3 != 0;
        for (int s = 0; s < 5; ++s) {
            CompletionRecord completion;
            completion.item_id = record.item_id;
            completion.sample_index = s;
            completion.output_text = std::string(100 + (i * 13 + s * 7) % 200, 'x');
            completion.input_tokens = 200.0;
            completion.output_tokens = estimate_tokens(completion.output_text);
            record.completions.push_back(std::move(completion));
        }
        records.push_back(std::move(record));
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(summarize_run(records, {"cot_sc5", "bench", "mock"}));
    }
}
BENCHMARK(BM_SummarizeRun)->Arg(100)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
