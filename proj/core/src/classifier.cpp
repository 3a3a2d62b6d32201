#include "tme/classifier.hpp"

#include "tme/errors.hpp"
#include "tme/forest.hpp"
#include "tme/responder.hpp"
#include "tme/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace tme {

// ---------------------------------------------------------------------------
// ScriptedClassifier

ScriptedClassifier::ScriptedClassifier(std::vector<Entry> entries) {
    for (auto& e : entries) by_round_[e.round] = std::move(e);
}

ScriptedClassifier ScriptedClassifier::from_json(const std::string& json_text) {
    nlohmann::json doc = nlohmann::json::parse(json_text, nullptr, false);
    if (doc.is_discarded())
        throw Error(ErrorCode::FixtureGap, "intent script is not valid JSON");
    const nlohmann::json* rows = nullptr;
    const char* intents_key = "intents";
    if (doc.is_array()) {
        rows = &doc;
    } else if (doc.is_object() && doc.contains("rounds") && doc["rounds"].is_array()) {
        rows = &doc["rounds"];
        intents_key = "gold_intents";
    } else {
        throw Error(ErrorCode::FixtureGap,
                    "intent script must be an array or a scenario with rounds");
    }
    std::vector<Entry> entries;
    for (const auto& row : *rows) {
        if (!row.is_object() || !row.contains("round") || !row.contains("user_input") ||
            !row.contains(intents_key))
            throw Error(ErrorCode::FixtureGap, "intent script row missing round/user_input/intents");
        Entry e;
        e.round = row["round"].get<int>();
        e.user_input = row["user_input"].get<std::string>();
        e.intents = parse_intent_json(row[intents_key].dump());
        entries.push_back(std::move(e));
    }
    return ScriptedClassifier(std::move(entries));
}

ScriptedClassifier ScriptedClassifier::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::FixtureGap, "cannot open intent script '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

std::vector<SubtaskIntent> ScriptedClassifier::decompose(const std::string& user_input, int round,
                                                         const Forest*) {
    auto it = by_round_.find(round);
    if (it == by_round_.end())
        throw Error(ErrorCode::OffScript, "no scripted round " + std::to_string(round));
    if (it->second.user_input != user_input)
        throw Error(ErrorCode::OffScript,
                    "round " + std::to_string(round) + " input differs from script: got \"" +
                        user_input + "\"");
    return it->second.intents;
}

// ---------------------------------------------------------------------------
// RandomClassifier

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

} // namespace

IntentType RandomClassifier::draw(std::uint64_t seed, int round) {
    // One splitmix64 step keyed on (seed, round); value mod 3 picks the type.
    std::uint64_t v = splitmix64(seed ^ (static_cast<std::uint64_t>(round) * 0x9E3779B97F4A7C15ULL));
    switch (v % 3) {
    case 0: return IntentType::New;
    case 1: return IntentType::Update;
    default: return IntentType::Check;
    }
}

std::vector<SubtaskIntent> RandomClassifier::decompose(const std::string& user_input, int round,
                                                       const Forest*) {
    SubtaskIntent intent;
    intent.intent_type = draw(seed_, round);
    intent.subtask_title = user_input;
    if (intent.intent_type == IntentType::Update) {
        // The schema requires the pair on updates; a random backend has no
        // basis for either side, so both point at the raw input.
        intent.replacement = user_input;
        intent.replaced = user_input;
    }
    return {intent};
}

// ---------------------------------------------------------------------------
// RuleBasedClassifier

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    auto e = s.find_last_not_of(" \t\r\n");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

std::string strip_trailing_punct(std::string s) {
    while (!s.empty() && (s.back() == '.' || s.back() == '!' || s.back() == ',')) s.pop_back();
    return trim(s);
}

std::string lower(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

// Pulls the payload out of imperative field sentences: the text after the
// last " to " / " from " / " on ", falling back to the whole sentence.
std::string extract_value(const std::string& text) {
    const std::string low = lower(text);
    for (const char* marker : {" to ", " from ", " on "}) {
        auto pos = low.rfind(marker);
        if (pos != std::string::npos)
            return strip_trailing_punct(text.substr(pos + std::string(marker).size()));
    }
    return strip_trailing_punct(text);
}

bool is_interrogative(const std::string& text) {
    if (text.find('?') != std::string::npos) return true;
    static const char* openers[] = {"what", "why", "when", "where", "who", "how",
                                    "did", "do ", "does", "can ", "could", "was ",
                                    "is ", "are "};
    const std::string low = lower(trim(text));
    for (const char* o : openers) {
        if (low.rfind(o, 0) == 0) return true;
    }
    return false;
}

} // namespace

std::vector<SubtaskIntent> RuleBasedClassifier::decompose(const std::string& user_input, int,
                                                          const Forest*) {
    const std::string input = trim(user_input);
    const std::string low = lower(input);

    // "field: text" prefix, e.g. "destination: Actually, make that San Francisco."
    if (auto colon = input.find(':');
        colon != std::string::npos && colon > 0 && colon < 24 &&
        input.substr(0, colon).find(' ') == std::string::npos) {
        std::string field = lower(trim(input.substr(0, colon)));
        std::string rest = trim(input.substr(colon + 1));
        SubtaskIntent intent;
        if (is_interrogative(rest)) {
            intent.intent_type = IntentType::Check;
            intent.subtask_title = "verify " + field;
        } else {
            intent.intent_type = IntentType::Update;
            intent.subtask_title = field;
            intent.replacement = extract_value(rest);
            intent.replaced = field;
        }
        return {intent};
    }

    // "My <field> is <value>", with or without a leading correction marker.
    if (auto my = low.find("my "); my != std::string::npos) {
        auto is_pos = low.find(" is ", my);
        if (is_pos != std::string::npos) {
            std::string field = trim(input.substr(my + 3, is_pos - my - 3));
            std::string value = strip_trailing_punct(input.substr(is_pos + 4));
            if (!field.empty() && field.find(' ') == std::string::npos && !value.empty()) {
                SubtaskIntent intent;
                intent.intent_type = IntentType::Update;
                intent.subtask_title = "collect " + lower(field);
                intent.replacement = value;
                intent.replaced = "collect " + lower(field);
                return {intent};
            }
        }
    }

    // Questions are checks; the raw input keeps the query tokens matchable.
    if (is_interrogative(input)) {
        SubtaskIntent intent;
        intent.intent_type = IntentType::Check;
        intent.subtask_title = input;
        return {intent};
    }

    // "Help me <task>" opens a new top-level task.
    if (low.rfind("help me ", 0) == 0) {
        std::string title = input.substr(8);
        if (auto cut = title.find_first_of(",."); cut != std::string::npos)
            title = title.substr(0, cut);
        SubtaskIntent intent;
        intent.intent_type = IntentType::New;
        intent.subtask_title = trim(title);
        return {intent};
    }

    return {};  // no rule fired; caller decides the fallback
}

// ---------------------------------------------------------------------------
// LlmClassifier

LlmClassifier::LlmClassifier(Responder& responder, std::string model, double temperature)
    : responder_(&responder), model_(std::move(model)), temperature_(temperature) {}

std::vector<SubtaskIntent> LlmClassifier::decompose(const std::string& user_input, int,
                                                    const Forest* forest_view) {
    ChatRequest request;
    request.model = model_;
    request.temperature = temperature_;
    request.messages.push_back({"user", render_fewshot_prompt(user_input, forest_view)});
    std::string reply = responder_->respond(request);

    // Tolerate prose or code fences around the JSON array, nothing more.
    auto begin = reply.find('[');
    auto end = reply.rfind(']');
    if (begin == std::string::npos || end == std::string::npos || end < begin)
        throw Error(ErrorCode::MalformedOutput, "no JSON array in reply; raw output: " + reply);
    return parse_intent_json(reply.substr(begin, end - begin + 1));
}

// ---------------------------------------------------------------------------
// ChainedClassifier

std::vector<SubtaskIntent> ChainedClassifier::decompose(const std::string& user_input, int round,
                                                        const Forest* forest_view) {
    auto intents = primary_->decompose(user_input, round, forest_view);
    if (!intents.empty()) return intents;
    return fallback_->decompose(user_input, round, forest_view);
}

} // namespace tme
