#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tme {

enum class NodeStatus { Active, Inactive };

// One subtask in the task memory structure. `history` holds superseded
// values oldest-first; the current value enters history only when replaced.
struct TaskNode {
    std::string slot;                       // unique hierarchical id, e.g. "prepare.ingredient"
    std::string value;                      // current task content
    std::vector<std::string> history;       // prior values, oldest first
    std::optional<std::string> parent;      // parent slot, nullopt for roots
    std::vector<std::string> dependencies;  // prerequisite slots
    NodeStatus status = NodeStatus::Active;
    std::string user_response;              // utterance that last touched this node
    std::string ai_response;                // system reply emitted after that touch

    // Runtime-only bookkeeping, not part of the serialized schema.
    bool context_stale = false;             // include in the next retrieval
    std::uint64_t created_seq = 0;          // forest-wide creation order

    bool active() const { return status == NodeStatus::Active; }
};

// Audit record for one value change.
struct NodeRevision {
    std::string slot;
    std::string old_value;
    std::string new_value;
    int round = 0;  // 1-based turn index
};

} // namespace tme
