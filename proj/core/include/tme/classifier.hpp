#pragma once

#include "tme/intent.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace tme {

class Forest;
class Responder;

// Turn decomposition + intent classification in one call. Implementations
// are stateless after construction and safe for concurrent use.
class Classifier {
public:
    virtual ~Classifier() = default;

    // `round` is the 1-based turn index; fixture-driven backends key on it,
    // live backends ignore it. `forest_view` may be null (flat variants).
    virtual std::vector<SubtaskIntent> decompose(const std::string& user_input,
                                                 int round,
                                                 const Forest* forest_view) = 0;
};

// Replays a fixed intent stream for deterministic replay. Total over its
// fixture's rounds; any unknown (round, input) pair fails loudly.
class ScriptedClassifier : public Classifier {
public:
    struct Entry {
        int round = 0;
        std::string user_input;
        std::vector<SubtaskIntent> intents;
    };

    explicit ScriptedClassifier(std::vector<Entry> entries);

    // Accepts either a bare JSON array of {round, user_input, intents} rows
    // or a scenario document whose rounds carry gold_intents.
    static ScriptedClassifier from_file(const std::string& path);
    static ScriptedClassifier from_json(const std::string& json_text);

    std::vector<SubtaskIntent> decompose(const std::string& user_input, int round,
                                         const Forest* forest_view) override;

private:
    std::map<int, Entry> by_round_;
};

// Uniform random intent type keyed on (seed, round) via splitmix64; the
// subtask title is the raw input and every other field stays empty. Used by
// the classifier-ablation variant.
class RandomClassifier : public Classifier {
public:
    explicit RandomClassifier(std::uint64_t seed) : seed_(seed) {}

    std::vector<SubtaskIntent> decompose(const std::string& user_input, int round,
                                         const Forest* forest_view) override;

    static IntentType draw(std::uint64_t seed, int round);

private:
    std::uint64_t seed_;
};

// Surface-pattern rules covering the recurring shapes of the demo scripts:
// "field: text" prefixes, "My <field> is <value>" statements, correction
// markers, interrogatives. Returns an empty list when nothing matches so a
// fallback backend can take over.
class RuleBasedClassifier : public Classifier {
public:
    std::vector<SubtaskIntent> decompose(const std::string& user_input, int round,
                                         const Forest* forest_view) override;
};

// Few-shot LLM classification through a responder backend; the reply must be
// the JSON array schema and is parsed strictly (MalformedOutput on drift).
class LlmClassifier : public Classifier {
public:
    LlmClassifier(Responder& responder, std::string model = "gpt-4o", double temperature = 0.3);

    std::vector<SubtaskIntent> decompose(const std::string& user_input, int round,
                                         const Forest* forest_view) override;

private:
    Responder* responder_;
    std::string model_;
    double temperature_;
};

// Hybrid pipeline: rules first, LLM fallback when no rule fires.
class ChainedClassifier : public Classifier {
public:
    ChainedClassifier(std::unique_ptr<Classifier> primary, std::unique_ptr<Classifier> fallback)
        : primary_(std::move(primary)), fallback_(std::move(fallback)) {}

    std::vector<SubtaskIntent> decompose(const std::string& user_input, int round,
                                         const Forest* forest_view) override;

private:
    std::unique_ptr<Classifier> primary_;
    std::unique_ptr<Classifier> fallback_;
};

// The system prompt and few-shot exemplars shipped as a versioned asset;
// renders the classification prompt: asset text, a compact listing of the
// active memory nodes, then the user input.
std::string fewshot_prompt_text();
std::string render_fewshot_prompt(const std::string& user_input, const Forest* forest_view);

} // namespace tme
