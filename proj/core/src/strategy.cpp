#include "tokprof/strategy.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "tokprof/complexity.hpp"
#include "tokprof/dataset.hpp"

namespace tokprof {

namespace {

using nlohmann::json;

constexpr const char* kCotTrigger = "Let's think step by step.";
constexpr const char* kVanillaFraming = "The following are questions (with answers).";
constexpr double kSelfConsistencyTemperature = 0.5;

const char* role_name(ElementRole role) {
    switch (role) {
        case ElementRole::system: return "system";
        case ElementRole::user_prefix: return "user_prefix";
        case ElementRole::user_suffix: return "user_suffix";
    }
    return "user_prefix";
}

ElementRole role_from_name(const std::string& name) {
    if (name == "system") return ElementRole::system;
    if (name == "user_prefix") return ElementRole::user_prefix;
    if (name == "user_suffix") return ElementRole::user_suffix;
    throw std::invalid_argument("unknown element role: " + name);
}

const char* kind_name(ElementKind kind) {
    switch (kind) {
        case ElementKind::fixed_text: return "fixed_text";
        case ElementKind::exemplar_block: return "exemplar_block";
        case ElementKind::query_slot: return "query_slot";
    }
    return "query_slot";
}

ElementKind kind_from_name(const std::string& name) {
    if (name == "fixed_text") return ElementKind::fixed_text;
    if (name == "exemplar_block") return ElementKind::exemplar_block;
    if (name == "query_slot") return ElementKind::query_slot;
    throw std::invalid_argument("unknown element kind: " + name);
}

StrategyElement fixed(ElementRole role, std::string text, std::string symbol) {
    StrategyElement element;
    element.kind = ElementKind::fixed_text;
    element.role = role;
    element.text = std::move(text);
    element.symbol = std::move(symbol);
    return element;
}

StrategyElement exemplars(bool with_reasoning) {
    StrategyElement element;
    element.kind = ElementKind::exemplar_block;
    element.with_reasoning = with_reasoning;
    return element;
}

StrategyElement query() {
    StrategyElement element;
    element.kind = ElementKind::query_slot;
    return element;
}

// Unbiased bounded draw; std::uniform_int_distribution is implementation
// defined, and run records must be reproducible across toolchains.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t draw;
    do {
        draw = rng();
    } while (draw >= limit);
    return draw % bound;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (const char c : text) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    // splitmix64 finalizer
    std::uint64_t z = seed ^ salt;
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

void validate(const StrategySpec& spec) {
    if (spec.name.empty()) throw std::invalid_argument("strategy needs a name");
    if (spec.exemplar_count < 0) throw std::invalid_argument("exemplar_count must be >= 0");
    if (spec.sample_count < 1) throw std::invalid_argument("sample_count must be >= 1");
    if (spec.temperature < 0.0) throw std::invalid_argument("temperature must be >= 0");

    int query_slots = 0;
    int exemplar_blocks = 0;
    for (const auto& element : spec.elements) {
        switch (element.kind) {
            case ElementKind::query_slot:
                ++query_slots;
                break;
            case ElementKind::exemplar_block:
                ++exemplar_blocks;
                break;
            case ElementKind::fixed_text:
                if (element.text.empty()) {
                    throw std::invalid_argument("fixed_text element with empty text");
                }
                break;
        }
    }
    if (query_slots != 1) {
        throw std::invalid_argument("strategy must contain exactly one query_slot, found " +
                                    std::to_string(query_slots));
    }
    if (spec.exemplar_count > 0 && exemplar_blocks == 0) {
        throw std::invalid_argument("exemplar_count > 0 requires an exemplar_block element");
    }
    if (spec.sample_count > 1) {
        if (spec.aggregation != Aggregation::majority_vote) {
            throw std::invalid_argument("sample_count > 1 requires majority_vote aggregation");
        }
        if (spec.temperature <= 0.0) {
            throw std::invalid_argument("sample_count > 1 requires temperature > 0");
        }
    }
}

const std::vector<std::string>& builtin_strategy_names() {
    static const std::vector<std::string> names = {
        "vanilla_io", "zeroshot_cot", "vanilla_fewshot", "fewshot_cot", "cot_sc",
    };
    return names;
}

bool is_builtin_strategy(const std::string& name) {
    const auto& names = builtin_strategy_names();
    return std::find(names.begin(), names.end(), name) != names.end();
}

StrategySpec build_builtin(const std::string& name, int exemplar_count, int sample_count) {
    if (!is_builtin_strategy(name)) {
        throw std::invalid_argument("unknown strategy: " + name);
    }
    const bool zeroshot = name == "vanilla_io" || name == "zeroshot_cot";
    if (zeroshot && exemplar_count > 0) {
        throw std::invalid_argument(name + " is zero-shot; k must be 0");
    }
    if (name != "cot_sc" && sample_count > 1) {
        throw std::invalid_argument("sample_count > 1 is only valid for cot_sc");
    }
    if (exemplar_count < 0 || sample_count < 1) {
        throw std::invalid_argument("invalid k or p for " + name);
    }

    StrategySpec spec;
    spec.name = name;
    spec.exemplar_count = exemplar_count;
    spec.sample_count = sample_count;

    if (name == "vanilla_io") {
        spec.elements = {fixed(ElementRole::system, kVanillaFraming, kFramingOverheadSymbol),
                         query()};
    } else if (name == "zeroshot_cot") {
        spec.elements = {query(),
                         fixed(ElementRole::user_suffix, kCotTrigger, kReasoningOverheadSymbol)};
    } else if (name == "vanilla_fewshot") {
        spec.elements = {exemplars(false), query()};
    } else if (name == "fewshot_cot") {
        spec.elements = {exemplars(true), query(),
                         fixed(ElementRole::user_suffix, kCotTrigger, kReasoningOverheadSymbol)};
    } else {  // cot_sc
        spec.elements = {exemplars(true), query(),
                         fixed(ElementRole::user_suffix, kCotTrigger, kReasoningOverheadSymbol)};
        spec.aggregation = Aggregation::majority_vote;
        spec.temperature = kSelfConsistencyTemperature;
    }

    validate(spec);
    return spec;
}

std::string strategy_label(const StrategySpec& spec) {
    if (spec.aggregation == Aggregation::majority_vote) {
        return spec.name + std::to_string(spec.sample_count);
    }
    return spec.name;
}

StrategySpec strategy_from_json(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("invalid strategy JSON: ") + e.what());
    }

    StrategySpec spec;
    spec.name = doc.at("name").get<std::string>();
    spec.exemplar_count = doc.value("k", 0);
    spec.sample_count = doc.value("p", 1);
    const std::string aggregation = doc.value("aggregation", "none");
    if (aggregation == "majority_vote") {
        spec.aggregation = Aggregation::majority_vote;
    } else if (aggregation != "none") {
        throw std::invalid_argument("unknown aggregation: " + aggregation);
    }
    spec.temperature = doc.value("temperature", 0.0);

    for (const auto& entry : doc.at("elements")) {
        StrategyElement element;
        element.kind = kind_from_name(entry.at("kind").get<std::string>());
        element.text = entry.value("text", "");
        element.role = role_from_name(entry.value("role", "user_prefix"));
        element.with_reasoning = entry.value("with_reasoning", false);
        element.symbol = entry.value("symbol", "");
        spec.elements.push_back(std::move(element));
    }

    validate(spec);
    return spec;
}

std::string strategy_to_json(const StrategySpec& spec) {
    json doc;
    doc["name"] = spec.name;
    doc["k"] = spec.exemplar_count;
    doc["p"] = spec.sample_count;
    doc["aggregation"] = spec.aggregation == Aggregation::majority_vote ? "majority_vote" : "none";
    doc["temperature"] = spec.temperature;
    doc["elements"] = json::array();
    for (const auto& element : spec.elements) {
        json entry;
        entry["kind"] = kind_name(element.kind);
        entry["role"] = role_name(element.role);
        if (element.kind == ElementKind::fixed_text) {
            entry["text"] = element.text;
            if (!element.symbol.empty()) entry["symbol"] = element.symbol;
        }
        if (element.kind == ElementKind::exemplar_block) {
            entry["with_reasoning"] = element.with_reasoning;
        }
        doc["elements"].push_back(std::move(entry));
    }
    return doc.dump(2);
}

StrategySpec load_strategy_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open strategy file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return strategy_from_json(buffer.str());
}

RenderedPrompt render_prompt(const StrategySpec& spec, const BenchmarkItem& item,
                             const std::vector<Exemplar>& exemplars, int sample_index) {
    validate(spec);
    if (static_cast<int>(exemplars.size()) != spec.exemplar_count) {
        throw std::invalid_argument("expected " + std::to_string(spec.exemplar_count) +
                                    " exemplars, got " + std::to_string(exemplars.size()));
    }
    if (sample_index < 0 || sample_index >= spec.sample_count) {
        throw std::invalid_argument("sample_index out of range");
    }

    std::string system_text;
    std::string prefix_text;
    std::string suffix_text;
    bool with_reasoning = false;
    for (const auto& element : spec.elements) {
        if (element.kind == ElementKind::exemplar_block) {
            with_reasoning = element.with_reasoning;
            continue;
        }
        if (element.kind != ElementKind::fixed_text) continue;
        switch (element.role) {
            case ElementRole::system:
                if (!system_text.empty()) system_text += "\n\n";
                system_text += element.text;
                break;
            case ElementRole::user_prefix:
                if (!prefix_text.empty()) prefix_text += "\n\n";
                prefix_text += element.text;
                break;
            case ElementRole::user_suffix:
                if (!suffix_text.empty()) suffix_text += " ";
                suffix_text += element.text;
                break;
        }
    }

    std::vector<std::string> blocks;
    if (!prefix_text.empty()) blocks.push_back(prefix_text);
    for (const auto& exemplar : exemplars) {
        if (exemplar.question.empty() || exemplar.answer.empty()) {
            throw std::invalid_argument("exemplar with empty question or answer");
        }
        std::string block = "Question: " + exemplar.question + "\nAnswer:";
        if (with_reasoning) {
            if (!exemplar.reasoning || exemplar.reasoning->empty()) {
                throw std::invalid_argument("reasoning exemplar block given an exemplar without reasoning");
            }
            block += " " + *exemplar.reasoning;
        }
        block += " " + exemplar.answer;
        blocks.push_back(std::move(block));
    }

    std::string target = "Question: " + format_question(item) + "\nAnswer:";
    if (!suffix_text.empty()) target += " " + suffix_text;
    blocks.push_back(std::move(target));

    std::string user_text;
    for (const auto& block : blocks) {
        if (!user_text.empty()) user_text += "\n\n";
        user_text += block;
    }

    RenderedPrompt prompt;
    if (!system_text.empty()) prompt.messages.push_back({"system", system_text});
    prompt.messages.push_back({"user", user_text});
    prompt.meta = {spec.name, item.id, spec.exemplar_count, spec.sample_count, sample_index};
    return prompt;
}

std::vector<Exemplar> sample_exemplars(const std::vector<ExemplarRow>& pool, int count,
                                       const std::string& exclude_id, std::uint64_t seed) {
    if (count < 0) throw std::invalid_argument("exemplar count must be >= 0");
    if (count == 0) return {};

    std::vector<const ExemplarRow*> candidates;
    candidates.reserve(pool.size());
    for (const auto& row : pool) {
        if (row.id != exclude_id) candidates.push_back(&row);
    }
    if (static_cast<int>(candidates.size()) < count) {
        throw std::invalid_argument("exemplar pool too small: need " + std::to_string(count) +
                                    ", have " + std::to_string(candidates.size()) +
                                    " after excluding " + exclude_id);
    }

    // Partial Fisher-Yates: the first `count` slots are the draw, in order.
    std::mt19937_64 rng(seed);
    const std::size_t n = candidates.size();
    for (int i = 0; i < count; ++i) {
        const std::size_t j = i + bounded(rng, n - i);
        std::swap(candidates[i], candidates[j]);
    }

    std::vector<Exemplar> drawn;
    drawn.reserve(count);
    for (int i = 0; i < count; ++i) drawn.push_back(candidates[i]->exemplar);
    return drawn;
}

}  // namespace tokprof
