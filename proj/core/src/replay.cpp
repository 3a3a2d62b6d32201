#include "tme/replay.hpp"

#include "tme/errors.hpp"
#include "tme/snapshot.hpp"

#include <algorithm>
#include <future>

namespace tme {

namespace {

// Resolve an assertion target to a slot, matching inactive nodes too (status
// predicates must see them).
std::optional<std::string> resolve_any(const Forest& forest, const std::string& slot_or_title) {
    if (forest.contains(slot_or_title)) return slot_or_title;
    if (auto slot = forest.shared_slot(slot_or_title)) return slot;
    return forest.find_node(slot_or_title);
}

// Aggregate value of a task root: the concatenated values of its DAG's
// active nodes.
std::string aggregate_value(const Forest& forest, const std::string& slot) {
    const TaskNode* n = forest.node(slot);
    if (!n) return {};
    if (n->parent) return n->value;
    std::string out;
    for (const auto& s : forest.dag_slots(slot)) {
        const TaskNode* m = forest.node(s);
        if (m->value.empty()) continue;
        if (!out.empty()) out.push_back('\n');
        out += m->value;
    }
    return out;
}

bool assertion_holds_forest(const Forest& forest, const StateAssertion& a) {
    using P = StateAssertion::Predicate;
    auto slot = resolve_any(forest, a.slot_or_title);
    switch (a.predicate) {
    case P::NodeAbsent:
        return !slot.has_value();
    case P::NodeInactive:
        return slot && !forest.node(*slot)->active();
    case P::ValueEquals:
        return slot && forest.node(*slot)->active() && forest.node(*slot)->value == a.argument;
    case P::ValueContains:
        return slot && forest.node(*slot)->active() &&
               aggregate_value(forest, *slot).find(a.argument) != std::string::npos;
    case P::ValueNotContains:
        if (!slot || !forest.node(*slot)->active()) return true;
        return aggregate_value(forest, *slot).find(a.argument) == std::string::npos;
    }
    return true;
}

// Flat variants expose no structured state: equality is judged by the reply,
// absence by the transcript (linear memory never forgets).
bool assertion_holds_flat(const Session& session, const std::string& response,
                          const StateAssertion& a) {
    using P = StateAssertion::Predicate;
    switch (a.predicate) {
    case P::ValueEquals:
        return response.empty() || response.find(a.argument) != std::string::npos;
    case P::ValueNotContains: {
        if (response.find(a.argument) != std::string::npos) return false;
        for (const auto& [speaker, text] : session.transcript()) {
            (void)speaker;
            if (text.find(a.argument) != std::string::npos) return false;
        }
        return true;
    }
    default:
        return true;  // not observable without a forest
    }
}

bool intents_confused(const std::vector<SubtaskIntent>& produced,
                      const std::vector<SubtaskIntent>& gold) {
    if (gold.empty()) return false;
    if (produced.size() != gold.size()) return true;
    for (std::size_t i = 0; i < produced.size(); ++i) {
        if (produced[i].intent_type != gold[i].intent_type) return true;
    }
    return false;
}

} // namespace

RunReport replay(const ScenarioScript& script, Variant variant, Classifier* classifier,
                 Responder* responder, const TokenCounter& counter) {
    RunReport report;
    report.scenario = script.name;
    report.variant = variant;
    report.rounds = static_cast<int>(script.rounds.size());
    report.rounds_comparable = script.comparable_rounds();

    Session session(variant);
    bool final_assertions_pass = true;

    for (const auto& round : script.rounds) {
        const RoundLog* log = nullptr;
        try {
            log = &session.step(round.user_input, classifier, responder, counter);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::UnrecordedRequest || e.code() == ErrorCode::OffScript ||
                e.code() == ErrorCode::UnrecordedPrompt)
                throw Error(ErrorCode::FixtureGap, script.name + " round " +
                                                       std::to_string(round.index) + ": " + e.what());
            throw;
        }

        RoundScore score;
        score.round = round.index;
        score.operations = log->operations;
        score.warnings = log->warnings;
        score.prompt_hash = log->prompt_hash;
        score.prompt_tokens = log->prompt_tokens;
        score.response = log->response;

        if (variant != Variant::BaselineFlat)
            score.confusion = intents_confused(log->intents, round.gold_intents);

        for (const auto& assertion : round.gold_state) {
            bool ok = session.has_forest()
                          ? assertion_holds_forest(session.forest(), assertion)
                          : assertion_holds_flat(session, log->response, assertion);
            if (!ok) score.failed_assertions.push_back(assertion);
        }

        if (score.confusion) ++report.confusions;
        if (!score.failed_assertions.empty()) ++report.hallucinations;
        if (round.index == static_cast<int>(script.rounds.size()))
            final_assertions_pass = score.failed_assertions.empty();
        report.round_details.push_back(std::move(score));
    }

    report.consistent =
        report.hallucinations == 0 && report.confusions == 0 && final_assertions_pass;
    return report;
}

ScenarioScript FixtureSet::scenario(const std::string& name) const {
    return ScenarioScript::from_file(scenario_path(dir_, name));
}

namespace {

std::unique_ptr<Classifier> offline_classifier(const ScenarioScript& script, Variant variant) {
    if (variant == Variant::TmeRandomTrim)
        return std::make_unique<RandomClassifier>(script.random_seed);
    if (variant == Variant::BaselineFlat) return nullptr;
    std::vector<ScriptedClassifier::Entry> entries;
    for (const auto& r : script.rounds)
        entries.push_back({r.index, r.user_input,
                           r.scripted_intents ? *r.scripted_intents : r.gold_intents});
    return std::make_unique<ScriptedClassifier>(std::move(entries));
}

} // namespace

RunReport FixtureSet::replay_cell(const ScenarioScript& script, Variant variant) const {
    auto responder = RecordedResponder::from_file(responses_path(dir_, script.name));
    auto counter = RecordedCounter::from_file(tokens_path(dir_, script.name));
    auto classifier = offline_classifier(script, variant);
    return replay(script, variant, classifier.get(), &responder, counter);
}

RunReport FixtureSet::replay_cell(const std::string& name, Variant variant) const {
    return replay_cell(scenario(name), variant);
}

Session FixtureSet::replay_session(const ScenarioScript& script, Variant variant,
                                   int up_to_round) const {
    auto responder = RecordedResponder::from_file(responses_path(dir_, script.name));
    auto counter = RecordedCounter::from_file(tokens_path(dir_, script.name));
    auto classifier = offline_classifier(script, variant);

    Session session(variant);
    for (const auto& round : script.rounds) {
        if (up_to_round >= 0 && round.index > up_to_round) break;
        session.step(round.user_input, classifier.get(), &responder, counter);
    }
    return session;
}

std::vector<RunReport> run_suite(const FixtureSet& fixtures,
                                 const std::vector<std::string>& scenarios,
                                 const std::vector<Variant>& variants, int jobs) {
    struct Cell {
        std::string scenario;
        Variant variant;
    };
    std::vector<Cell> cells;
    for (Variant v : variants)
        for (const auto& s : scenarios) cells.push_back({s, v});

    auto run_cell = [&](const Cell& cell) {
        try {
            return fixtures.replay_cell(cell.scenario, cell.variant);
        } catch (const std::exception& e) {
            RunReport report;
            report.scenario = cell.scenario;
            report.variant = cell.variant;
            report.error = e.what();
            return report;
        }
    };

    std::vector<RunReport> reports;
    if (jobs <= 1) {
        for (const auto& cell : cells) reports.push_back(run_cell(cell));
        return reports;
    }
    std::vector<std::future<RunReport>> futures;
    for (const auto& cell : cells)
        futures.push_back(std::async(std::launch::async, run_cell, cell));
    for (auto& f : futures) reports.push_back(f.get());
    return reports;
}

} // namespace tme
