#include "tme/scenario.hpp"

#include "tme/errors.hpp"

#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace tme {

const char* predicate_name(StateAssertion::Predicate p) {
    switch (p) {
    case StateAssertion::Predicate::ValueEquals: return "value_equals";
    case StateAssertion::Predicate::ValueContains: return "value_contains";
    case StateAssertion::Predicate::ValueNotContains: return "value_not_contains";
    case StateAssertion::Predicate::NodeAbsent: return "node_absent";
    case StateAssertion::Predicate::NodeInactive: return "node_inactive";
    }
    return "value_equals";
}

StateAssertion::Predicate predicate_from(const std::string& name) {
    if (name == "value_equals") return StateAssertion::Predicate::ValueEquals;
    if (name == "value_contains") return StateAssertion::Predicate::ValueContains;
    if (name == "value_not_contains") return StateAssertion::Predicate::ValueNotContains;
    if (name == "node_absent") return StateAssertion::Predicate::NodeAbsent;
    if (name == "node_inactive") return StateAssertion::Predicate::NodeInactive;
    throw Error(ErrorCode::FixtureGap, "unknown predicate '" + name + "'");
}

std::string StateAssertion::describe() const {
    return slot_or_title + " " + predicate_name(predicate) +
           (argument.empty() ? "" : " \"" + argument + "\"");
}

int ScenarioScript::comparable_rounds() const {
    int n = static_cast<int>(rounds.size());
    for (int r : uncounted_rounds) {
        if (r >= 1 && r <= static_cast<int>(rounds.size())) --n;
    }
    return n;
}

ScenarioScript ScenarioScript::from_json(const std::string& json_text) {
    nlohmann::json doc = nlohmann::json::parse(json_text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
        throw Error(ErrorCode::FixtureGap, "scenario fixture is not a JSON object");
    ScenarioScript script;
    script.name = doc.value("name", "");
    if (doc.contains("random_seed")) script.random_seed = doc["random_seed"].get<std::uint64_t>();
    script.trim_adaptation = doc.value("trim_adaptation", false);
    if (doc.contains("uncounted_rounds"))
        script.uncounted_rounds = doc["uncounted_rounds"].get<std::vector<int>>();
    if (!doc.contains("rounds") || !doc["rounds"].is_array())
        throw Error(ErrorCode::FixtureGap, "scenario fixture needs a rounds array");

    for (const auto& rj : doc["rounds"]) {
        ScenarioRound round;
        round.index = rj.at("round").get<int>();
        round.user_input = rj.at("user_input").get<std::string>();
        if (rj.contains("gold_intents"))
            round.gold_intents = parse_intent_json(rj["gold_intents"].dump());
        if (rj.contains("scripted_intents"))
            round.scripted_intents = parse_intent_json(rj["scripted_intents"].dump());
        if (rj.contains("gold_state")) {
            for (const auto& aj : rj["gold_state"]) {
                StateAssertion a;
                a.slot_or_title = aj.at("slot_or_title").get<std::string>();
                a.predicate = predicate_from(aj.at("predicate").get<std::string>());
                a.argument = aj.value("argument", "");
                round.gold_state.push_back(std::move(a));
            }
        }
        if (rj.contains("recorded_responses"))
            round.recorded_responses =
                rj["recorded_responses"].get<std::map<std::string, std::string>>();
        if (rj.contains("recorded_tokens"))
            round.recorded_tokens = rj["recorded_tokens"].get<std::map<std::string, int>>();
        script.rounds.push_back(std::move(round));
    }
    for (std::size_t i = 0; i < script.rounds.size(); ++i) {
        if (script.rounds[i].index != static_cast<int>(i + 1))
            throw Error(ErrorCode::FixtureGap,
                        "scenario rounds must be contiguous from 1; found index " +
                            std::to_string(script.rounds[i].index) + " at position " +
                            std::to_string(i + 1));
    }
    if (doc.contains("prompt_comparison")) {
        PromptComparison pc;
        pc.round = doc["prompt_comparison"].at("round").get<int>();
        pc.tokens = doc["prompt_comparison"].at("tokens").get<std::map<std::string, int>>();
        script.prompt_comparison = pc;
    }
    return script;
}

ScenarioScript ScenarioScript::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::FixtureGap, "cannot open scenario fixture '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return from_json(buf.str());
    } catch (const Error& e) {
        throw Error(ErrorCode::FixtureGap, path + ": " + e.what());
    }
}

std::string fixture_dir() {
    if (const char* env = std::getenv("TME_FIXTURE_DIR"); env && *env) return env;
    return "fixtures";
}

std::string scenario_path(const std::string& dir, const std::string& name) {
    return dir + "/" + name + ".json";
}

std::string responses_path(const std::string& dir, const std::string& name) {
    return dir + "/" + name + ".responses.json";
}

std::string tokens_path(const std::string& dir, const std::string& name) {
    return dir + "/" + name + ".tokens.json";
}

} // namespace tme
