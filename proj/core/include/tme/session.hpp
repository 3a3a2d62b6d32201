#pragma once

#include "tme/classifier.hpp"
#include "tme/forest.hpp"
#include "tme/intent.hpp"
#include "tme/responder.hpp"
#include "tme/token_counter.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tme {

// Memory policy under test. The DAG variants maintain a task forest; the
// flat variants keep only the linear transcript.
enum class Variant { TmeDag, TmeFlat, TmeRandomTrim, BaselineFlat };

const char* variant_name(Variant v);
Variant variant_from(const std::string& name);
bool variant_uses_forest(Variant v);

struct TokenLedger {
    struct Row {
        int round = 0;
        int prompt_tokens = 0;
    };
    std::vector<Row> rows;

    int total() const;
    int total_first(std::size_t n) const;
};

// One processed turn, as written to the round log.
struct RoundLog {
    Variant variant = Variant::TmeDag;
    int round = 0;
    std::string user_input;
    std::vector<SubtaskIntent> intents;
    std::vector<std::string> operations;
    std::vector<std::string> warnings;
    std::string prompt;
    std::string prompt_hash;
    int prompt_tokens = 0;
    std::string response;
    bool mutated = false;
};

std::string round_log_json(const RoundLog& log);

struct SessionConfig {
    std::string model = "gpt-4o";
    double temperature = 0.3;
};

// One conversation under a fixed memory variant. Rounds are processed
// strictly in order by a single writer; distinct sessions are independent.
class Session {
public:
    explicit Session(Variant variant, SessionConfig config = {});

    // Run one user turn through the five-step workflow: decompose/classify,
    // apply graph operations, retrieve context, synthesize the prompt and
    // count its tokens, then obtain the response. `classifier` may be null
    // only for the baseline variant (it performs no classification);
    // `responder` may be null, in which case a deterministic local
    // acknowledgment is generated (interactive offline use).
    const RoundLog& step(const std::string& user_input,
                         Classifier* classifier,
                         Responder* responder,
                         const TokenCounter& counter);

    Variant variant() const { return variant_; }
    int rounds_processed() const { return static_cast<int>(logs_.size()); }

    bool has_forest() const { return variant_uses_forest(variant_); }
    const Forest& forest() const { return forest_; }
    Forest& forest() { return forest_; }

    const std::vector<std::pair<std::string, std::string>>& transcript() const {
        return transcript_;
    }
    const TokenLedger& ledger() const { return ledger_; }
    const std::vector<RoundLog>& logs() const { return logs_; }
    const std::optional<std::string>& focus() const { return focus_; }

    // Every active node's value grouped by root task, topological order.
    std::string summarize_all() const;

    const SessionConfig& config() const { return config_; }

private:
    struct TurnEffects {
        std::vector<std::string> operations;
        std::vector<std::string> warnings;
        std::optional<std::string> focus;
        bool mutated = false;
        bool summary_context = false;
        std::vector<NodeRevision> revisions;
    };

    TurnEffects apply_intents(const std::vector<SubtaskIntent>& intents, int round);
    void apply_new_intent(const SubtaskIntent& intent, TurnEffects& fx);
    void apply_update_intent(const SubtaskIntent& intent, int round, TurnEffects& fx);

    std::string create_node(const std::string& title, const std::optional<std::string>& parent,
                            const std::vector<std::string>& deps, const std::string& value,
                            TurnEffects& fx);
    std::optional<std::string> resolve_parent(const std::optional<std::string>& parent,
                                              TurnEffects& fx);

    Variant variant_;
    SessionConfig config_;
    Forest forest_;
    std::vector<std::pair<std::string, std::string>> transcript_;  // (speaker, text)
    std::optional<std::string> focus_;
    TokenLedger ledger_;
    std::vector<RoundLog> logs_;
};

// Canonical prompt rendering. DAG form: each subgraph node with a non-empty
// value becomes "Task: <title> (current value: <value>)." in the given
// order, then "User: <user_input>", all joined by single spaces. Throws
// EmptyContext when a DAG subgraph has no nodes at all.
std::string synthesize_prompt(const Session& state, const ContextSubgraph& subgraph,
                              const std::string& user_input);

// Flat form: the transcript as "User: ..." / "Assistant: ..." segments
// followed by the new input, space-joined.
std::string synthesize_flat_prompt(
    const std::vector<std::pair<std::string, std::string>>& transcript,
    const std::string& user_input);

// Node cost under a counter: the token count of the node's prompt line, zero
// for structural (empty-value) nodes that render nothing.
NodeCostFn prompt_line_cost(const TokenCounter& counter);

} // namespace tme
