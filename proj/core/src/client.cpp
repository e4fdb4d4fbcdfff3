#include "tokprof/client.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "tokprof/metrics.hpp"

namespace tokprof {

namespace {

using nlohmann::json;

// Neutral filler the generator mock pads outputs with; content is irrelevant,
// only the character count feeds the token estimate.
constexpr const char* kFillerSentences[] = {
    "Consider the question carefully before answering.",
    "Each part of the problem constrains the solution.",
    "Working through the steps keeps the reasoning consistent.",
    "The intermediate values follow from the given quantities.",
    "Checking the result against the question avoids mistakes.",
};

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t draw;
    do {
        draw = rng();
    } while (draw >= limit);
    return draw % bound;
}

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct SplitUrl {
    std::string host;  // scheme://host[:port]
    std::string path;  // leading path prefix, possibly empty
};

SplitUrl split_base_url(const std::string& base_url) {
    const auto scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos) {
        throw std::invalid_argument("endpoint base_url needs a scheme: " + base_url);
    }
    const auto path_start = base_url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {base_url, ""};
    std::string path = base_url.substr(path_start);
    while (!path.empty() && path.back() == '/') path.pop_back();
    return {base_url.substr(0, path_start), path};
}

}  // namespace

std::string to_string(CompletionRecord::TokenSource source) {
    return source == CompletionRecord::TokenSource::provider ? "provider" : "estimated";
}

std::string prompt_input_text(const RenderedPrompt& prompt) {
    std::string text;
    for (const auto& message : prompt.messages) {
        if (!text.empty()) text += "\n";
        text += message.role + ": " + message.content;
    }
    return text;
}

HttpCompletionClient::HttpCompletionClient(ModelEndpoint endpoint)
    : endpoint_(std::move(endpoint)) {
    if (endpoint_.max_tokens <= 0) throw std::invalid_argument("max_tokens must be > 0");
    if (endpoint_.retry_attempts < 1) throw std::invalid_argument("retry_attempts must be >= 1");
}

CompletionRecord HttpCompletionClient::complete(const RenderedPrompt& prompt, double temperature) {
    CompletionRecord record;
    record.item_id = prompt.meta.item_id;
    record.sample_index = prompt.meta.sample_index;
    record.input_text = prompt_input_text(prompt);

    json body;
    body["model"] = endpoint_.model_name;
    body["messages"] = json::array();
    for (const auto& message : prompt.messages) {
        body["messages"].push_back({{"role", message.role}, {"content", message.content}});
    }
    body["temperature"] = temperature;
    body["max_tokens"] = endpoint_.max_tokens;
    body["n"] = 1;
    const std::string payload = body.dump();

    const SplitUrl url = split_base_url(endpoint_.base_url);
    httplib::Client client(url.host);
    client.set_connection_timeout(std::chrono::milliseconds(
        static_cast<long long>(endpoint_.timeout_seconds * 1000)));
    client.set_read_timeout(std::chrono::milliseconds(
        static_cast<long long>(endpoint_.timeout_seconds * 1000)));
    httplib::Headers headers;
    if (!endpoint_.api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + endpoint_.api_key);
    }

    std::string last_error;
    double backoff = endpoint_.backoff_initial_seconds;
    for (int attempt = 0; attempt < endpoint_.retry_attempts; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
            backoff *= 2.0;
        }
        auto result = client.Post(url.path + "/chat/completions", headers, payload,
                                  "application/json");
        if (!result) {
            last_error = "transport error: " + httplib::to_string(result.error());
            continue;
        }
        if (result->status < 200 || result->status >= 300) {
            last_error = "http status " + std::to_string(result->status);
            continue;
        }
        try {
            const json response = json::parse(result->body);
            record.output_text =
                response.at("choices").at(0).at("message").at("content").get<std::string>();
            if (response.contains("usage") && response["usage"].contains("prompt_tokens") &&
                response["usage"].contains("completion_tokens")) {
                record.input_tokens = response["usage"]["prompt_tokens"].get<double>();
                record.output_tokens = response["usage"]["completion_tokens"].get<double>();
                record.token_source = CompletionRecord::TokenSource::provider;
            } else {
                record.input_tokens = estimate_tokens(record.input_text);
                record.output_tokens = estimate_tokens(record.output_text);
                record.token_source = CompletionRecord::TokenSource::estimated;
            }
            return record;
        } catch (const json::exception& e) {
            last_error = std::string("malformed response body: ") + e.what();
        }
    }

    record.output_text.clear();
    record.input_tokens = estimate_tokens(record.input_text);
    record.output_tokens = 0.0;
    record.token_source = CompletionRecord::TokenSource::estimated;
    record.error = last_error.empty() ? "request failed" : last_error;
    return record;
}

MockSpec parse_mock_spec(const std::string& text) {
    MockSpec spec;
    if (text == "oracle") {
        spec.mode = MockSpec::Mode::oracle;
        return spec;
    }
    if (text.rfind("script:", 0) == 0) {
        spec.mode = MockSpec::Mode::scripted;
        spec.script_path = text.substr(7);
        if (spec.script_path.empty()) throw std::invalid_argument("script mock needs a path");
        return spec;
    }
    if (text.rfind("gen", 0) == 0) {
        spec.mode = MockSpec::Mode::generator;
        if (text.size() > 3) {
            if (text[3] != ':') throw std::invalid_argument("bad mock spec: " + text);
            std::stringstream args(text.substr(4));
            std::string pair;
            while (std::getline(args, pair, ',')) {
                const auto eq = pair.find('=');
                if (eq == std::string::npos) {
                    throw std::invalid_argument("bad mock option: " + pair);
                }
                const std::string key = pair.substr(0, eq);
                const std::string value = pair.substr(eq + 1);
                try {
                    if (key == "seed") {
                        spec.seed = std::stoull(value);
                    } else if (key == "acc") {
                        spec.correct_rate = std::stod(value);
                    } else if (key == "min") {
                        spec.min_output_chars = std::stoi(value);
                    } else if (key == "max") {
                        spec.max_output_chars = std::stoi(value);
                    } else {
                        throw std::invalid_argument("unknown mock option: " + key);
                    }
                } catch (const std::invalid_argument&) {
                    throw;
                } catch (const std::exception&) {
                    throw std::invalid_argument("bad mock option value: " + pair);
                }
            }
        }
        if (spec.correct_rate < 0.0 || spec.correct_rate > 1.0) {
            throw std::invalid_argument("mock acc must be in [0,1]");
        }
        if (spec.min_output_chars < 0 || spec.max_output_chars < spec.min_output_chars) {
            throw std::invalid_argument("mock output length band is invalid");
        }
        return spec;
    }
    throw std::invalid_argument("unknown mock spec: " + text +
                                " (expected oracle, gen:..., or script:<path>)");
}

MockCompletionClient::MockCompletionClient(MockSpec spec, const Benchmark& benchmark,
                                           AnswerMode mode, std::uint64_t default_seed)
    : spec_(spec), mode_(mode), seed_(spec.seed.value_or(default_seed)) {
    for (const auto& item : benchmark.items) {
        items_[item.id] = ItemInfo{item.gold_answer, item.choices};
    }
    if (spec_.mode == MockSpec::Mode::scripted) {
        std::ifstream in(spec_.script_path);
        if (!in) throw std::runtime_error("cannot open mock script: " + spec_.script_path);
        json doc;
        try {
            in >> doc;
        } catch (const json::exception& e) {
            throw std::runtime_error("bad mock script " + spec_.script_path + ": " + e.what());
        }
        for (const auto& [id, output] : doc.items()) {
            script_[id] = output.get<std::string>();
        }
    }
}

std::string MockCompletionClient::answer_line(const ItemInfo& info, bool correct) const {
    switch (mode_) {
        case AnswerMode::multiple_choice: {
            char letter = static_cast<char>(std::toupper(static_cast<unsigned char>(info.gold[0])));
            if (!correct) {
                const int n = static_cast<int>(info.choices.size());
                letter = static_cast<char>('A' + (letter - 'A' + 1) % std::max(n, 2));
            }
            return std::string("(") + letter + ")";
        }
        case AnswerMode::number: {
            if (!correct) {
                try {
                    return std::to_string(std::llround(std::stod(info.gold)) + 1);
                } catch (const std::exception&) {
                    return "0";
                }
            }
            return info.gold;
        }
        case AnswerMode::exact_text:
            return correct ? info.gold : "not " + info.gold;
    }
    return info.gold;
}

CompletionRecord MockCompletionClient::complete(const RenderedPrompt& prompt,
                                                double /*temperature*/) {
    CompletionRecord record;
    record.item_id = prompt.meta.item_id;
    record.sample_index = prompt.meta.sample_index;
    record.input_text = prompt_input_text(prompt);

    const auto found = items_.find(record.item_id);
    if (found == items_.end()) {
        record.error = "mock has no item: " + record.item_id;
    } else if (spec_.mode == MockSpec::Mode::scripted) {
        const auto scripted = script_.find(record.item_id);
        if (scripted == script_.end()) {
            record.error = "mock script has no output for item: " + record.item_id;
        } else {
            record.output_text = scripted->second;
        }
    } else if (spec_.mode == MockSpec::Mode::oracle) {
        record.output_text = answer_line(found->second, true);
    } else {
        // Keyed only by (seed, item, sample): call order and prompt content
        // cannot change the output.
        std::mt19937_64 rng(mix_seed(seed_, fnv1a64(record.item_id) +
                                                0x9e3779b97f4a7c15ULL *
                                                    (static_cast<std::uint64_t>(record.sample_index) + 1)));
        const bool correct = uniform01(rng) < spec_.correct_rate;
        std::string filler;
        const int span = spec_.max_output_chars - spec_.min_output_chars + 1;
        const int target = spec_.min_output_chars +
                           static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(span)));
        while (static_cast<int>(filler.size()) < target) {
            const auto pick = uniform_below(rng, std::size(kFillerSentences));
            if (!filler.empty()) filler += " ";
            filler += kFillerSentences[pick];
        }
        if (static_cast<int>(filler.size()) > target) filler.resize(target);
        record.output_text = filler + "\n" + answer_line(found->second, correct);
    }

    record.input_tokens = estimate_tokens(record.input_text);
    record.output_tokens = estimate_tokens(record.output_text);
    record.token_source = CompletionRecord::TokenSource::estimated;
    if (record.error) {
        record.output_text.clear();
        record.output_tokens = 0.0;
    }
    return record;
}

}  // namespace tokprof
