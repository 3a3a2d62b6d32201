#pragma once

#include "tme/task_node.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace tme {

// A single task graph: the nodes reachable from one top-level task root.
// Nodes are stored in creation order; `index` maps slot -> position.
struct TaskDAG {
    std::vector<std::string> roots;
    std::vector<TaskNode> nodes;
    std::unordered_map<std::string, std::size_t> index;

    const TaskNode* find(const std::string& slot) const;
    TaskNode* find(const std::string& slot);
};

// Per-node token cost function used by subgraph retrieval.
using NodeCostFn = std::function<int(const TaskNode&)>;

// The node set retrieved as LLM context, with its token cost.
struct ContextSubgraph {
    std::string focus;
    std::vector<std::string> slots;  // topological order
    int total_cost = 0;
};

// Forest of task DAGs. Owns every node, maintains the shared-title index and
// a reverse-edge index (children + dependents) for propagation queries.
//
// All mutations are validated up front and either apply fully or throw with
// the forest unchanged. A Forest is a plain value: copyable, movable, no
// internal locking; one writer at a time, any number of concurrent readers
// when no writer is present.
class Forest {
public:
    // -- mutations ----------------------------------------------------------

    // Insert a fresh node. Parent and dependencies must resolve.
    void add_node(TaskNode node);

    // Add a dependency edge from_slot -> to_slot. Rejects cycles.
    void add_dependency(const std::string& from_slot, const std::string& to_slot);

    // Replace the node's value, pushing the old value onto history.
    // Updating to the identical value is a no-op and returns nullopt.
    std::optional<NodeRevision> update_node(const std::string& slot,
                                            const std::string& new_value,
                                            int round);

    // Update every active node matching `replaced_title` (exact normalized
    // title first, best fuzzy match otherwise) and propagate to dependents.
    std::vector<NodeRevision> replace_global(const std::string& replaced_title,
                                             const std::string& replacement_value,
                                             int round);

    // Restore the value from `steps` entries back in history and truncate the
    // rolled-past entries. steps == 0 is the identity.
    void rollback_node(const std::string& slot, std::size_t steps);

    // Mark a node obsolete. Topology is kept; the node disappears from
    // matching and retrieval.
    void inactivate_node(const std::string& slot);

    // -- queries ------------------------------------------------------------

    // Best-matching active node for a free-text query, or nullopt.
    // Priority: exact slot, exact normalized title, then highest token
    // overlap with the slot tail plus value; ties go to the earliest node.
    std::optional<std::string> find_node(const std::string& query_title) const;

    // Exact-only matching (slot or normalized title), active nodes only.
    std::optional<std::string> find_exact(const std::string& query) const;

    // Transitive dependents of `slot` (dependency or ancestor chain reaches
    // it), topologically ordered. Marks them context-stale.
    std::vector<std::string> propagate_dependencies(const std::string& slot);

    // Root-to-focus path plus the focus's direct dependencies and its
    // context-stale dependents, inactive nodes excluded, minimizing token
    // cost. Included stale nodes have their stale flag consumed.
    // With a budget, stale dependents are dropped first (latest first), then
    // dependencies; the path is never dropped.
    ContextSubgraph retrieve_subgraph(const std::string& focus,
                                      const NodeCostFn& cost,
                                      std::optional<int> budget = std::nullopt);

    // Shared-title lookup used for node sharing across tasks.
    std::optional<std::string> shared_slot(const std::string& title) const;

    const TaskNode* node(const std::string& slot) const;
    bool contains(const std::string& slot) const { return locate(slot) != nullptr; }

    const std::vector<TaskDAG>& dags() const { return dags_; }
    std::size_t node_count() const { return ref_.size(); }
    bool empty() const { return ref_.empty(); }

    // Every slot in forest-wide topological order (parents and dependencies
    // before their dependents), active nodes only unless include_inactive.
    std::vector<std::string> topological_slots(bool include_inactive = false) const;

    // Active slots of the DAG owning `slot`, topologically ordered.
    std::vector<std::string> dag_slots(const std::string& slot) const;

    // True when dependency edges from another DAG reference this node.
    bool is_shared(const std::string& slot) const;

    // Clear a node's context-stale flag (used after prompt assembly).
    void consume_stale(const std::string& slot);

    // Record the conversational exchange on a node.
    void set_responses(const std::string& slot,
                       const std::string& user_response,
                       const std::string& ai_response);

    // Internal consistency check over parent and dependency edges.
    bool is_acyclic() const;

    // Rebuild derived indexes after bulk load. Throws IntegrityError when
    // invariants do not hold.
    void validate();

private:
    friend class SnapshotReader;

    struct NodeRef {
        std::size_t dag = 0;
        std::size_t pos = 0;
    };

    const NodeRef* locate(const std::string& slot) const;
    TaskNode& node_at(const NodeRef& ref) { return dags_[ref.dag].nodes[ref.pos]; }
    const TaskNode& node_at(const NodeRef& ref) const { return dags_[ref.dag].nodes[ref.pos]; }
    TaskNode& require(const std::string& slot);
    const TaskNode& require(const std::string& slot) const;

    // Outgoing edge targets (parent + dependencies) of a node.
    std::vector<std::string> edges_from(const TaskNode& n) const;

    // True if `to` is reachable from `from` following parent/dependency
    // edges upward (used to veto cycle-creating edges).
    bool reaches(const std::string& from, const std::string& to) const;

    void index_node(const std::string& slot, NodeRef ref);

    std::vector<TaskDAG> dags_;
    std::unordered_map<std::string, NodeRef> ref_;
    std::unordered_map<std::string, std::string> shared_index_;  // normalized title -> slot
    // Reverse edges: slot -> nodes that depend on it or are its children.
    std::unordered_map<std::string, std::vector<std::string>> reverse_;
    std::uint64_t next_seq_ = 0;
};

// True iff the DAG's parent and dependency edges admit a topological order.
// Dependency references outside the DAG are ignored (cross-task edges are
// checked at forest level).
bool check_acyclic(const TaskDAG& dag);

} // namespace tme
