#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tokprof {

// A prompting strategy is an ordered composition of structural elements
// around exactly one query slot. Fixed texts are constant overheads, an
// exemplar block expands to k in-context examples, and sample_count > 1
// means the strategy samples p chains and majority-votes the answers.

enum class ElementKind { fixed_text, exemplar_block, query_slot };
enum class ElementRole { system, user_prefix, user_suffix };
enum class Aggregation { none, majority_vote };

struct StrategyElement {
    ElementKind kind = ElementKind::query_slot;
    std::string text;              // fixed_text only; must be non-empty
    ElementRole role = ElementRole::user_prefix;
    bool with_reasoning = false;   // exemplar_block only
    std::string symbol;            // overhead constant name (fixed_text); auto-named when empty
};

struct StrategySpec {
    std::string name;
    std::vector<StrategyElement> elements;
    int exemplar_count = 0;        // k
    int sample_count = 1;          // p
    Aggregation aggregation = Aggregation::none;
    double temperature = 0.0;
};

struct Exemplar {
    std::string question;
    std::optional<std::string> reasoning;
    std::string answer;
};

// Pool entry an exemplar is drawn from; the id drives overlap exclusion.
struct ExemplarRow {
    std::string id;
    Exemplar exemplar;
};

struct ChatMessage {
    std::string role;              // "system" or "user"
    std::string content;
};

struct PromptMeta {
    std::string strategy;
    std::string item_id;
    int exemplar_count = 0;
    int sample_count = 1;
    int sample_index = 0;
};

struct RenderedPrompt {
    std::vector<ChatMessage> messages;
    PromptMeta meta;
};

struct BenchmarkItem;  // dataset.hpp

/// Throws std::invalid_argument on any structural invariant violation.
void validate(const StrategySpec& spec);

const std::vector<std::string>& builtin_strategy_names();
bool is_builtin_strategy(const std::string& name);

// The five builtins: vanilla_io, zeroshot_cot, vanilla_fewshot, fewshot_cot,
// cot_sc. Zero-shot strategies reject k > 0; only cot_sc accepts p > 1.
StrategySpec build_builtin(const std::string& name, int exemplar_count, int sample_count);

StrategySpec strategy_from_json(const std::string& json_text);
std::string strategy_to_json(const StrategySpec& spec);
StrategySpec load_strategy_file(const std::string& path);

// Summary/report key; distinguishes sampled variants ("cot_sc5", "cot_sc10").
std::string strategy_label(const StrategySpec& spec);

RenderedPrompt render_prompt(const StrategySpec& spec, const BenchmarkItem& item,
                             const std::vector<Exemplar>& exemplars, int sample_index);

// Draws `count` distinct exemplars, never the excluded id, preserving draw
// order. Deterministic for a fixed (pool, count, exclude, seed) tuple.
std::vector<Exemplar> sample_exemplars(const std::vector<ExemplarRow>& pool, int count,
                                       const std::string& exclude_id, std::uint64_t seed);

// Stable string hash / mixer used wherever derived seeds must not depend on
// the platform's std::hash.
std::uint64_t fnv1a64(std::string_view text);
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace tokprof
