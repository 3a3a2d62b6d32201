#pragma once

#include "tme/scenario.hpp"
#include "tme/session.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tme {

struct RoundScore {
    int round = 0;
    bool confusion = false;
    std::vector<StateAssertion> failed_assertions;
    std::vector<std::string> operations;
    std::vector<std::string> warnings;
    std::string prompt_hash;
    int prompt_tokens = 0;
    std::string response;
};

// Scored outcome of one scenario under one memory variant.
// consistent := zero hallucinations, zero confusions, and every final-round
// assertion passing.
struct RunReport {
    std::string scenario;
    Variant variant = Variant::TmeDag;
    int rounds = 0;             // raw round count
    int rounds_comparable = 0;  // headline count (uncounted rounds excluded)
    int hallucinations = 0;     // rounds with a failed assertion
    int confusions = 0;         // rounds whose intent types diverge from gold
    bool consistent = false;
    std::vector<RoundScore> round_details;
    std::optional<std::string> error;  // cell-level failure (suite keeps going)
};

// Replay every round of `script` under `variant`, scoring intents against
// the gold labels and post-round state against the gold assertions.
//
// Forest variants evaluate assertions on the forest snapshot. Flat variants
// have no forest; for them value_equals fails when the round's reply omits
// the expected value and value_not_contains fails when the transcript still
// carries the forbidden value — the remaining predicates are not observable
// and pass vacuously.
RunReport replay(const ScenarioScript& script, Variant variant, Classifier* classifier,
                 Responder* responder, const TokenCounter& counter);

// Loads scenario/response/token fixtures from one directory and wires the
// offline backend set for each (scenario, variant) cell: the scripted
// classifier on gold intents (or the seeded random classifier for the
// ablation variant), the recorded responder, and the recorded counter.
class FixtureSet {
public:
    explicit FixtureSet(std::string dir = fixture_dir()) : dir_(std::move(dir)) {}

    const std::string& dir() const { return dir_; }
    ScenarioScript scenario(const std::string& name) const;

    RunReport replay_cell(const ScenarioScript& script, Variant variant) const;
    RunReport replay_cell(const std::string& name, Variant variant) const;

    // Replay capturing the full session (token tables, exports, prompts).
    Session replay_session(const ScenarioScript& script, Variant variant,
                           int up_to_round = -1) const;

private:
    std::string dir_;
};

// Cross product of scenarios and variants; cell errors are captured in the
// report so the remaining cells still run. jobs > 1 runs cells in parallel.
std::vector<RunReport> run_suite(const FixtureSet& fixtures,
                                 const std::vector<std::string>& scenarios,
                                 const std::vector<Variant>& variants, int jobs = 1);

} // namespace tme
