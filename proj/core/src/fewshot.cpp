#include "tme/classifier.hpp"

#include "tme/forest.hpp"

#include <sstream>

namespace tme {

namespace {

// Keep in sync with assets/trim_fewshot_v1.txt; the asset file is the
// reviewable copy and a test pins the two together.
const char* kFewshotPrompt =
    R"(System: You are a task intent classifier. Generate structured JSON output with fields: intent_type (new/update/check), subtask_title, parent_node, dependency_nodes, from, to (if applicable). Use few-shot examples to classify the user's intent based on the input and memory context.

Input: "Wait! There's no celery in the refrigerator at all. Let's all use mushrooms instead."
Output:
[
  {
    "intent_type": "update",
    "subtask_title": "use mushrooms instead of celery",
    "parent_node": null,
    "dependency_nodes": [],
    "from": "Prepare mushrooms",
    "to": "Prepare celery"
  }
]

Input: "start: By the way, wasn't I departing from Boston?"
Output:
[
  {
    "intent_type": "check",
    "subtask_title": "verify start location",
    "parent_node": "schedule trip",
    "dependency_nodes": []
  }
]

Input: "Schedule a team meeting on Thursday at 2 PM with Alice, Bob, and Carol."
Output:
[
  {
    "intent_type": "new",
    "subtask_title": "schedule team meeting",
    "parent_node": null,
    "dependency_nodes": []
  }
]
)";

} // namespace

std::string fewshot_prompt_text() { return kFewshotPrompt; }

std::string render_fewshot_prompt(const std::string& user_input, const Forest* forest_view) {
    std::ostringstream out;
    out << kFewshotPrompt << "\nMemory:\n";
    bool any = false;
    if (forest_view) {
        for (const auto& slot : forest_view->topological_slots()) {
            const TaskNode* n = forest_view->node(slot);
            out << "- " << slot;
            if (!n->value.empty()) out << ": " << n->value;
            out << "\n";
            any = true;
        }
    }
    if (!any) out << "(empty)\n";
    out << "\nInput: \"" << user_input << "\"\nOutput:\n";
    return out.str();
}

} // namespace tme
