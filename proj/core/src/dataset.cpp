#include "tokprof/dataset.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace tokprof {

namespace {

using nlohmann::json;

std::string json_string(const json& value) {
    if (value.is_string()) return value.get<std::string>();
    if (value.is_number_integer()) return std::to_string(value.get<long long>());
    if (value.is_number_float()) {
        // keep the literal spelling stable for numeric answers
        return value.dump();
    }
    throw std::invalid_argument("expected a string or number");
}

struct ParsedLine {
    BenchmarkItem item;
    std::optional<std::string> reasoning;
};

ParsedLine parse_line(const std::string& line) {
    const json doc = json::parse(line);
    if (!doc.is_object()) throw std::invalid_argument("expected a JSON object");

    ParsedLine parsed;
    parsed.item.id = json_string(doc.at("id"));
    parsed.item.question = doc.at("question").get<std::string>();
    parsed.item.gold_answer = json_string(doc.at("answer"));
    if (parsed.item.id.empty()) throw std::invalid_argument("empty id");
    if (parsed.item.question.empty()) throw std::invalid_argument("empty question");
    if (parsed.item.gold_answer.empty()) throw std::invalid_argument("empty answer");

    if (doc.contains("choices")) {
        for (const auto& choice : doc.at("choices")) {
            parsed.item.choices.push_back(choice.get<std::string>());
        }
    }
    if (doc.contains("subject")) parsed.item.subject = doc.at("subject").get<std::string>();
    if (doc.contains("reasoning")) parsed.reasoning = doc.at("reasoning").get<std::string>();
    return parsed;
}

void validate_for_mode(const BenchmarkItem& item, AnswerMode mode) {
    if (mode == AnswerMode::multiple_choice) {
        if (item.choices.size() < 2) {
            throw std::invalid_argument("multiple-choice item needs at least 2 choices");
        }
        if (item.gold_answer.size() != 1) {
            throw std::invalid_argument("multiple-choice answer must be a single letter");
        }
        const char upper = static_cast<char>(std::toupper(
            static_cast<unsigned char>(item.gold_answer[0])));
        const int index = upper - 'A';
        if (index < 0 || index >= static_cast<int>(item.choices.size())) {
            throw std::invalid_argument("answer letter '" + item.gold_answer +
                                        "' does not reference a choice");
        }
    }
}

std::vector<ParsedLine> load_lines(const std::string& path, AnswerMode mode) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open benchmark file: " + path);

    std::vector<ParsedLine> lines;
    std::set<std::string> seen;
    std::string line;
    long long line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        try {
            ParsedLine parsed = parse_line(line);
            validate_for_mode(parsed.item, mode);
            if (!seen.insert(parsed.item.id).second) {
                throw std::invalid_argument("duplicate id: " + parsed.item.id);
            }
            lines.push_back(std::move(parsed));
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(line_number) + ": " + e.what());
        }
    }
    return lines;
}

// Pool entries for multiple choice bake the choice list into the question and
// render the answer in the minimal "(X)" form.
ExemplarRow to_pool_row(const ParsedLine& parsed, AnswerMode mode) {
    ExemplarRow row;
    row.id = parsed.item.id;
    row.exemplar.question = format_question(parsed.item);
    row.exemplar.reasoning = parsed.reasoning;
    if (mode == AnswerMode::multiple_choice) {
        const char upper = static_cast<char>(std::toupper(
            static_cast<unsigned char>(parsed.item.gold_answer[0])));
        row.exemplar.answer = std::string("(") + upper + ")";
    } else {
        row.exemplar.answer = parsed.item.gold_answer;
    }
    return row;
}

}  // namespace

std::string to_string(AnswerMode mode) {
    switch (mode) {
        case AnswerMode::number: return "number";
        case AnswerMode::multiple_choice: return "multiple_choice";
        case AnswerMode::exact_text: return "exact_text";
    }
    return "exact_text";
}

std::optional<AnswerMode> answer_mode_from_string(const std::string& text) {
    if (text == "number") return AnswerMode::number;
    if (text == "multiple_choice") return AnswerMode::multiple_choice;
    if (text == "exact_text") return AnswerMode::exact_text;
    return std::nullopt;
}

std::optional<BenchmarkConfig> builtin_benchmark_config(const std::string& name) {
    BenchmarkConfig config;
    config.name = name;
    if (name == "bbh") {
        config.answer_mode = AnswerMode::exact_text;
        config.default_k = 3;
    } else if (name == "gsm8k") {
        config.answer_mode = AnswerMode::number;
        config.default_k = 8;
    } else if (name == "mmlu") {
        config.answer_mode = AnswerMode::multiple_choice;
        config.default_k = 4;
    } else {
        return std::nullopt;
    }
    return config;
}

std::optional<AnswerMode> infer_answer_mode(const std::string& path) {
    if (path.find("gsm8k") != std::string::npos) return AnswerMode::number;
    if (path.find("mmlu") != std::string::npos) return AnswerMode::multiple_choice;
    if (path.find("bbh") != std::string::npos) return AnswerMode::exact_text;
    return std::nullopt;
}

std::string format_question(const BenchmarkItem& item) {
    if (item.choices.empty()) return item.question;
    std::string text = item.question + "\n";
    for (std::size_t i = 0; i < item.choices.size(); ++i) {
        if (i > 0) text += "; ";
        text += "(";
        text += static_cast<char>('A' + i);
        text += ") " + item.choices[i];
    }
    return text;
}

Benchmark load_benchmark(const BenchmarkConfig& config) {
    if (config.eval_path.empty()) throw std::invalid_argument("benchmark eval_path is empty");

    Benchmark benchmark;
    const std::vector<ParsedLine> eval_lines = load_lines(config.eval_path, config.answer_mode);
    for (const auto& parsed : eval_lines) benchmark.items.push_back(parsed.item);

    const bool aliased = config.fewshot_path.empty() || config.fewshot_path == config.eval_path;
    if (aliased) {
        for (const auto& parsed : eval_lines) {
            benchmark.pool.push_back(to_pool_row(parsed, config.answer_mode));
        }
    } else {
        for (const auto& parsed : load_lines(config.fewshot_path, config.answer_mode)) {
            benchmark.pool.push_back(to_pool_row(parsed, config.answer_mode));
        }
    }
    return benchmark;
}

std::optional<long long> benchmark_sample_count(const std::string& name) {
    if (name == "bbh") return 6511;
    if (name == "gsm8k") return 1319;
    if (name == "mmlu") return 1531;
    return std::nullopt;
}

}  // namespace tokprof
