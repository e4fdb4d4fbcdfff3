#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "tokprof/dataset.hpp"
#include "tokprof/strategy.hpp"

namespace tokprof {

inline constexpr const char* kApiKeyEnvVar = "TOKPROF_API_KEY";

struct CompletionRecord {
    std::string item_id;
    int sample_index = 0;
    std::string input_text;
    std::string output_text;
    double input_tokens = 0.0;   // fractional when estimated from characters
    double output_tokens = 0.0;
    enum class TokenSource { provider, estimated };
    TokenSource token_source = TokenSource::estimated;
    std::optional<std::string> error;  // set => output_text is empty
};

std::string to_string(CompletionRecord::TokenSource source);

struct ModelEndpoint {
    std::string base_url;      // e.g. "http://localhost:8000/v1"
    std::string model_name;
    int max_tokens = 1024;
    double timeout_seconds = 120.0;
    std::string api_key;       // sent as bearer token when non-empty
    int retry_attempts = 3;
    double backoff_initial_seconds = 1.0;
};

// Flattened prompt text (role markers included) used for character-based
// token estimation and run records.
std::string prompt_input_text(const RenderedPrompt& prompt);

class CompletionClient {
public:
    virtual ~CompletionClient() = default;
    virtual CompletionRecord complete(const RenderedPrompt& prompt, double temperature) = 0;
    virtual std::string model_label() const = 0;
};

// POSTs {base_url}/chat/completions with {"model","messages","temperature",
// "max_tokens","n":1}. Provider usage counts are used when present, otherwise
// tokens are estimated as characters/4. Failures retry with exponential
// backoff and finally yield a record with `error` set; a run never aborts on
// a single call.
class HttpCompletionClient final : public CompletionClient {
public:
    explicit HttpCompletionClient(ModelEndpoint endpoint);
    CompletionRecord complete(const RenderedPrompt& prompt, double temperature) override;
    std::string model_label() const override { return endpoint_.model_name; }

private:
    ModelEndpoint endpoint_;
};

struct MockSpec {
    enum class Mode { oracle, generator, scripted };
    Mode mode = Mode::oracle;
    std::optional<std::uint64_t> seed;   // generator; falls back to the run seed
    double correct_rate = 1.0;           // generator
    int min_output_chars = 80;           // generator filler length band
    int max_output_chars = 240;
    std::string script_path;             // scripted: JSON map item id -> output
};

// "oracle" | "gen:seed=7,acc=0.5[,min=80,max=240]" | "script:<path>".
MockSpec parse_mock_spec(const std::string& text);

// Deterministic stand-in for a model endpoint. Output depends only on
// (item id, sample index, seed), never on the prompt text, so token usage
// differences across strategies come entirely from the input side and the
// number of sampled chains. Tokens are always estimated (characters/4).
class MockCompletionClient final : public CompletionClient {
public:
    MockCompletionClient(MockSpec spec, const Benchmark& benchmark, AnswerMode mode,
                         std::uint64_t default_seed);
    CompletionRecord complete(const RenderedPrompt& prompt, double temperature) override;
    std::string model_label() const override { return "mock"; }

private:
    struct ItemInfo {
        std::string gold;
        std::vector<std::string> choices;
    };
    std::string answer_line(const ItemInfo& info, bool correct) const;

    MockSpec spec_;
    AnswerMode mode_;
    std::uint64_t seed_ = 0;
    std::map<std::string, ItemInfo> items_;
    std::map<std::string, std::string> script_;
};

}  // namespace tokprof
