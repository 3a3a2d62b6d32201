#pragma once

#include "tme/intent.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tme {

// Mechanical check against a forest snapshot (no LLM involved). When the
// target resolves to a task root, the value predicates run against the
// concatenated values of that task's active nodes.
struct StateAssertion {
    enum class Predicate { ValueEquals, ValueContains, ValueNotContains, NodeAbsent, NodeInactive };

    std::string slot_or_title;
    Predicate predicate = Predicate::ValueEquals;
    std::string argument;

    std::string describe() const;
};

StateAssertion::Predicate predicate_from(const std::string& name);
const char* predicate_name(StateAssertion::Predicate p);

struct ScenarioRound {
    int index = 0;
    std::string user_input;
    std::vector<SubtaskIntent> gold_intents;
    // Recorded classifier output when it diverges from the gold labels
    // (regression fixtures); replay scripts these, scores against gold.
    std::optional<std::vector<SubtaskIntent>> scripted_intents;
    std::vector<StateAssertion> gold_state;
    std::map<std::string, std::string> recorded_responses;  // variant -> reply
    std::map<std::string, int> recorded_tokens;             // variant -> prompt tokens
};

// One replayable script with gold labels, recorded replies, and (for the
// token study) the measured per-round prompt token counts.
struct ScenarioScript {
    std::string name;
    std::uint64_t random_seed = 1;     // pinned seed for the classifier ablation
    bool trim_adaptation = false;      // flattened item handling (cart)
    std::vector<int> uncounted_rounds; // rounds outside the headline turn count
    std::vector<ScenarioRound> rounds;

    // Labelled token pair for the side-by-side prompt comparison, kept apart
    // from the per-round table it does not reconcile with.
    struct PromptComparison {
        int round = 0;
        std::map<std::string, int> tokens;  // variant -> tokens
    };
    std::optional<PromptComparison> prompt_comparison;

    int comparable_rounds() const;

    static ScenarioScript from_json(const std::string& json_text);
    static ScenarioScript from_file(const std::string& path);
};

// Fixture root resolution: TME_FIXTURE_DIR when set, else ./fixtures.
std::string fixture_dir();

// Named fixture paths under a root: <name>.json, <name>.responses.json,
// <name>.tokens.json.
std::string scenario_path(const std::string& dir, const std::string& name);
std::string responses_path(const std::string& dir, const std::string& name);
std::string tokens_path(const std::string& dir, const std::string& name);

} // namespace tme
