#pragma once

#include <optional>
#include <string>
#include <vector>

namespace tme {

enum class IntentType { New, Update, Check };

const char* intent_type_name(IntentType t);
IntentType intent_type_from(const std::string& name);

// Structured classification of one subtask within a user turn.
// `replacement` carries the incoming value and `replaced` the value or node
// being superseded; the wire schema calls these "from" and "to". They appear
// together and only on update intents.
struct SubtaskIntent {
    IntentType intent_type = IntentType::New;
    std::string subtask_title;
    std::optional<std::string> parent_node;
    std::vector<std::string> dependency_nodes;
    std::optional<std::string> replacement;  // wire field "from"
    std::optional<std::string> replaced;     // wire field "to"

    bool operator==(const SubtaskIntent&) const = default;
};

enum class IntentKeys { Paper, Internal };  // "from"/"to" vs "replacement"/"replaced"

// Parse a JSON array (or single object) of intent records. Accepts both key
// conventions, ignores unknown keys, defaults missing optionals. Throws
// MalformedOutput carrying the offending text on any schema violation.
std::vector<SubtaskIntent> parse_intent_json(const std::string& raw);

// Serialize intents back to the wire schema under either key convention.
std::string intents_to_json(const std::vector<SubtaskIntent>& intents,
                            IntentKeys keys = IntentKeys::Paper,
                            int indent = -1);

} // namespace tme
