#include "tme/intent.hpp"

#include "tme/errors.hpp"

#include <json.hpp>

namespace tme {

using nlohmann::ordered_json;

const char* intent_type_name(IntentType t) {
    switch (t) {
    case IntentType::New: return "new";
    case IntentType::Update: return "update";
    case IntentType::Check: return "check";
    }
    return "new";
}

IntentType intent_type_from(const std::string& name) {
    if (name == "new") return IntentType::New;
    if (name == "update") return IntentType::Update;
    if (name == "check") return IntentType::Check;
    throw Error(ErrorCode::MalformedOutput, "unknown intent_type '" + name + "'");
}

namespace {

std::optional<std::string> optional_string(const ordered_json& j, const char* key,
                                           const std::string& raw) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    if (!j[key].is_string())
        throw Error(ErrorCode::MalformedOutput,
                    std::string("field '") + key + "' must be a string; raw output: " + raw);
    return j[key].get<std::string>();
}

SubtaskIntent parse_one(const ordered_json& j, const std::string& raw) {
    if (!j.is_object())
        throw Error(ErrorCode::MalformedOutput, "intent entry is not an object; raw output: " + raw);
    if (!j.contains("intent_type") || !j["intent_type"].is_string())
        throw Error(ErrorCode::MalformedOutput, "missing intent_type; raw output: " + raw);
    if (!j.contains("subtask_title") || !j["subtask_title"].is_string())
        throw Error(ErrorCode::MalformedOutput, "missing subtask_title; raw output: " + raw);

    SubtaskIntent intent;
    intent.intent_type = intent_type_from(j["intent_type"].get<std::string>());
    intent.subtask_title = j["subtask_title"].get<std::string>();
    if (intent.subtask_title.empty())
        throw Error(ErrorCode::MalformedOutput, "empty subtask_title; raw output: " + raw);
    intent.parent_node = optional_string(j, "parent_node", raw);
    if (j.contains("dependency_nodes")) {
        if (!j["dependency_nodes"].is_array())
            throw Error(ErrorCode::MalformedOutput,
                        "dependency_nodes must be an array; raw output: " + raw);
        for (const auto& d : j["dependency_nodes"]) {
            if (!d.is_string())
                throw Error(ErrorCode::MalformedOutput,
                            "dependency_nodes entries must be strings; raw output: " + raw);
            intent.dependency_nodes.push_back(d.get<std::string>());
        }
    }
    // Both key conventions are accepted: "from"/"to" on the wire map to
    // replacement/replaced (from = incoming value, to = superseded value).
    intent.replacement = optional_string(j, "from", raw);
    if (!intent.replacement) intent.replacement = optional_string(j, "replacement", raw);
    intent.replaced = optional_string(j, "to", raw);
    if (!intent.replaced) intent.replaced = optional_string(j, "replaced", raw);

    if (intent.replacement.has_value() != intent.replaced.has_value())
        throw Error(ErrorCode::MalformedOutput,
                    "replacement/replaced must appear together; raw output: " + raw);
    if (intent.replacement && intent.intent_type != IntentType::Update)
        throw Error(ErrorCode::MalformedOutput,
                    "replacement fields require intent_type update; raw output: " + raw);
    return intent;
}

} // namespace

std::vector<SubtaskIntent> parse_intent_json(const std::string& raw) {
    ordered_json doc = ordered_json::parse(raw, nullptr, false);
    if (doc.is_discarded())
        throw Error(ErrorCode::MalformedOutput, "not valid JSON; raw output: " + raw);
    std::vector<SubtaskIntent> intents;
    if (doc.is_object()) {
        intents.push_back(parse_one(doc, raw));
    } else if (doc.is_array()) {
        for (const auto& j : doc) intents.push_back(parse_one(j, raw));
    } else {
        throw Error(ErrorCode::MalformedOutput, "expected array or object; raw output: " + raw);
    }
    return intents;
}

std::string intents_to_json(const std::vector<SubtaskIntent>& intents, IntentKeys keys,
                            int indent) {
    ordered_json arr = ordered_json::array();
    for (const auto& intent : intents) {
        ordered_json j;
        j["intent_type"] = intent_type_name(intent.intent_type);
        j["subtask_title"] = intent.subtask_title;
        if (intent.parent_node)
            j["parent_node"] = *intent.parent_node;
        else
            j["parent_node"] = nullptr;
        j["dependency_nodes"] = intent.dependency_nodes;
        if (intent.replacement && intent.replaced) {
            if (keys == IntentKeys::Paper) {
                j["from"] = *intent.replacement;
                j["to"] = *intent.replaced;
            } else {
                j["replacement"] = *intent.replacement;
                j["replaced"] = *intent.replaced;
            }
        }
        arr.push_back(std::move(j));
    }
    return arr.dump(indent);
}

} // namespace tme
