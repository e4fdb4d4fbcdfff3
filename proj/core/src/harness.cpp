#include "tokprof/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <regex>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "tokprof/metrics.hpp"

namespace tokprof {

namespace {

using nlohmann::json;

const std::regex kNumberPattern(R"([+-]?\d[\d,]*(?:\.\d+)?)");
const std::regex kChoicePattern(R"(\(([A-Z])\))");

std::string last_match(const std::string& text, const std::regex& pattern) {
    std::string found;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), pattern);
         it != std::sregex_iterator(); ++it) {
        found = it->str(it->size() > 1 ? 1 : 0);
    }
    return found;
}

std::string final_nonempty_line(const std::string& text) {
    std::size_t end = text.size();
    while (end > 0) {
        std::size_t start = text.rfind('\n', end - 1);
        const std::size_t line_start = start == std::string::npos ? 0 : start + 1;
        const std::string line = normalize_text(text.substr(line_start, end - line_start));
        if (!line.empty()) return line;
        if (start == std::string::npos) break;
        end = start;
    }
    return "";
}

json completion_to_json(const CompletionRecord& record) {
    json doc;
    doc["item_id"] = record.item_id;
    doc["sample_index"] = record.sample_index;
    doc["input_text"] = record.input_text;
    doc["output_text"] = record.output_text;
    doc["input_tokens"] = record.input_tokens;
    doc["output_tokens"] = record.output_tokens;
    doc["token_source"] = to_string(record.token_source);
    if (record.error) doc["error"] = *record.error;
    return doc;
}

CompletionRecord completion_from_json(const json& doc) {
    CompletionRecord record;
    record.item_id = doc.at("item_id").get<std::string>();
    record.sample_index = doc.at("sample_index").get<int>();
    record.input_text = doc.at("input_text").get<std::string>();
    record.output_text = doc.at("output_text").get<std::string>();
    record.input_tokens = doc.at("input_tokens").get<double>();
    record.output_tokens = doc.at("output_tokens").get<double>();
    record.token_source = doc.at("token_source").get<std::string>() == "provider"
                              ? CompletionRecord::TokenSource::provider
                              : CompletionRecord::TokenSource::estimated;
    if (doc.contains("error")) record.error = doc.at("error").get<std::string>();
    return record;
}

}  // namespace

std::string normalize_text(const std::string& text) {
    std::string out;
    bool pending_space = false;
    for (const char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out += ' ';
            pending_space = false;
        }
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

std::string normalize_decimal(const std::string& text) {
    std::string digits;
    bool negative = false;
    bool seen_dot = false;
    for (const char c : text) {
        if (c == ',') continue;
        if (c == '+') continue;
        if (c == '-') {
            negative = true;
            continue;
        }
        if (c == '.') {
            if (seen_dot) return "";
            seen_dot = true;
            digits += '.';
            continue;
        }
        if (!std::isdigit(static_cast<unsigned char>(c))) return "";
        digits += c;
    }
    if (digits.empty() || digits == ".") return "";

    std::string integer = digits;
    std::string fraction;
    if (const auto dot = digits.find('.'); dot != std::string::npos) {
        integer = digits.substr(0, dot);
        fraction = digits.substr(dot + 1);
    }
    while (integer.size() > 1 && integer.front() == '0') integer.erase(integer.begin());
    if (integer.empty()) integer = "0";
    while (!fraction.empty() && fraction.back() == '0') fraction.pop_back();

    std::string out = integer;
    if (!fraction.empty()) out += "." + fraction;
    if (negative && out != "0") out.insert(out.begin(), '-');
    return out;
}

std::string extract_answer(const std::string& output, AnswerMode mode) {
    switch (mode) {
        case AnswerMode::number: {
            const std::string literal = last_match(output, kNumberPattern);
            if (literal.empty()) return "";
            std::string cleaned;
            for (const char c : literal) {
                if (c != ',') cleaned += c;
            }
            if (!cleaned.empty() && cleaned.front() == '+') cleaned.erase(cleaned.begin());
            return cleaned;
        }
        case AnswerMode::multiple_choice: {
            const std::string letter = last_match(output, kChoicePattern);
            if (!letter.empty()) return letter;
            // A bare letter is accepted so extraction is a fixed point.
            const std::string trimmed = normalize_text(output);
            if (trimmed.size() == 1 && trimmed[0] >= 'a' && trimmed[0] <= 'z') {
                return std::string(1, static_cast<char>(std::toupper(
                                          static_cast<unsigned char>(trimmed[0]))));
            }
            return "";
        }
        case AnswerMode::exact_text:
            return final_nonempty_line(output);
    }
    return "";
}

std::string aggregate_sc(const std::vector<std::string>& answers) {
    if (answers.empty()) throw std::invalid_argument("aggregate_sc needs at least one answer");

    std::vector<std::string> voting;
    for (const auto& answer : answers) {
        if (!answer.empty()) voting.push_back(answer);
    }
    if (voting.empty()) return "";

    // First-occurrence order doubles as the tie break.
    std::vector<std::pair<std::string, int>> counts;
    for (const auto& answer : voting) {
        auto it = std::find_if(counts.begin(), counts.end(),
                               [&](const auto& entry) { return entry.first == answer; });
        if (it == counts.end()) {
            counts.emplace_back(answer, 1);
        } else {
            ++it->second;
        }
    }
    const auto best = std::max_element(counts.begin(), counts.end(),
                                       [](const auto& a, const auto& b) {
                                           return a.second < b.second;
                                       });
    return best->first;
}

bool answers_match(const std::string& extracted, const std::string& gold, AnswerMode mode) {
    switch (mode) {
        case AnswerMode::number: {
            const std::string lhs = normalize_decimal(extracted);
            return !lhs.empty() && lhs == normalize_decimal(gold);
        }
        case AnswerMode::multiple_choice: {
            const std::string lhs = normalize_text(extracted);
            return !lhs.empty() && lhs == normalize_text(gold);
        }
        case AnswerMode::exact_text: {
            const std::string lhs = normalize_text(extracted);
            return !lhs.empty() && lhs == normalize_text(gold);
        }
    }
    return false;
}

std::vector<EvalRecord> run_eval_items(const StrategySpec& spec, const Benchmark& benchmark,
                                       AnswerMode mode, CompletionClient& client,
                                       const RunOptions& options) {
    validate(spec);
    if (options.concurrency < 1) throw std::invalid_argument("concurrency must be >= 1");

    std::size_t item_count = benchmark.items.size();
    if (options.limit && *options.limit >= 0) {
        item_count = std::min<std::size_t>(item_count, static_cast<std::size_t>(*options.limit));
    }
    const int samples = spec.sample_count;

    // Exemplars are drawn up front per item, seeded by (run seed, item id),
    // so concurrency and arrival order cannot affect the prompts.
    std::vector<std::vector<Exemplar>> drawn(item_count);
    for (std::size_t i = 0; i < item_count; ++i) {
        const auto& item = benchmark.items[i];
        drawn[i] = sample_exemplars(benchmark.pool, spec.exemplar_count, item.id,
                                    mix_seed(options.seed, fnv1a64(item.id)));
    }

    // Completions land in preassigned (item, sample) slots; the worker pool
    // bounds in-flight endpoint calls.
    std::vector<std::vector<CompletionRecord>> completions(item_count);
    for (auto& slots : completions) slots.resize(samples);

    const std::size_t task_count = item_count * static_cast<std::size_t>(samples);
    std::atomic<std::size_t> next_task{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t task = next_task.fetch_add(1);
            if (task >= task_count) return;
            const std::size_t item_index = task / samples;
            const int sample_index = static_cast<int>(task % samples);
            const RenderedPrompt prompt =
                render_prompt(spec, benchmark.items[item_index], drawn[item_index], sample_index);
            completions[item_index][sample_index] = client.complete(prompt, spec.temperature);
        }
    };

    const int thread_count =
        static_cast<int>(std::min<std::size_t>(options.concurrency, std::max<std::size_t>(task_count, 1)));
    std::vector<std::thread> threads;
    threads.reserve(thread_count);
    for (int t = 0; t < thread_count; ++t) threads.emplace_back(worker);
    for (auto& thread : threads) thread.join();

    std::vector<EvalRecord> records;
    records.reserve(item_count);
    for (std::size_t i = 0; i < item_count; ++i) {
        const auto& item = benchmark.items[i];
        std::vector<std::string> answers;
        answers.reserve(samples);
        for (const auto& completion : completions[i]) {
            answers.push_back(extract_answer(completion.output_text, mode));
        }
        EvalRecord record;
        record.item_id = item.id;
        record.extracted_answer = aggregate_sc(answers);
        record.correct = answers_match(record.extracted_answer, item.gold_answer, mode);
        record.completions = std::move(completions[i]);
        records.push_back(std::move(record));
    }
    return records;
}

std::vector<EvalRecord> run_eval(const StrategySpec& spec, const BenchmarkConfig& config,
                                 CompletionClient& client, const RunOptions& options) {
    const Benchmark benchmark = load_benchmark(config);
    return run_eval_items(spec, benchmark, config.answer_mode, client, options);
}

std::string eval_record_to_json(const EvalRecord& record) {
    json doc;
    doc["item_id"] = record.item_id;
    doc["extracted_answer"] = record.extracted_answer;
    doc["correct"] = record.correct;
    doc["completions"] = json::array();
    for (const auto& completion : record.completions) {
        doc["completions"].push_back(completion_to_json(completion));
    }
    return doc.dump();
}

void write_run_records(const std::string& path, const RunMeta& meta,
                       const std::vector<EvalRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write run records: " + path);

    json header;
    header["type"] = "run_meta";
    header["seed"] = meta.seed;
    header["strategy"] = meta.strategy;
    header["benchmark"] = meta.benchmark;
    header["model"] = meta.model;
    header["k"] = meta.exemplar_count;
    header["p"] = meta.sample_count;
    header["limit"] = meta.limit ? json(*meta.limit) : json(nullptr);
    out << header.dump() << "\n";

    for (const auto& record : records) {
        out << eval_record_to_json(record) << "\n";
    }
    if (!out) throw std::runtime_error("short write: " + path);
}

RunRecordFile load_run_records(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open run records: " + path);

    RunRecordFile file;
    std::string line;
    long long line_number = 0;
    bool have_meta = false;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        json doc;
        try {
            doc = json::parse(line);
        } catch (const json::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(line_number) + ": " + e.what());
        }
        if (!have_meta) {
            if (!doc.is_object() || doc.value("type", "") != "run_meta") {
                throw std::runtime_error(path + ": first line must be a run_meta header");
            }
            file.meta.seed = doc.at("seed").get<std::uint64_t>();
            file.meta.strategy = doc.at("strategy").get<std::string>();
            file.meta.benchmark = doc.at("benchmark").get<std::string>();
            file.meta.model = doc.at("model").get<std::string>();
            file.meta.exemplar_count = doc.at("k").get<int>();
            file.meta.sample_count = doc.at("p").get<int>();
            if (!doc.at("limit").is_null()) file.meta.limit = doc.at("limit").get<long long>();
            have_meta = true;
            continue;
        }
        EvalRecord record;
        record.item_id = doc.at("item_id").get<std::string>();
        record.extracted_answer = doc.at("extracted_answer").get<std::string>();
        record.correct = doc.at("correct").get<bool>();
        for (const auto& completion : doc.at("completions")) {
            record.completions.push_back(completion_from_json(completion));
        }
        file.records.push_back(std::move(record));
    }
    if (!have_meta) throw std::runtime_error(path + ": missing run_meta header");
    return file;
}

}  // namespace tokprof
