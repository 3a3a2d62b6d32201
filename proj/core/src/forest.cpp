#include "tme/forest.hpp"

#include "tme/errors.hpp"
#include "tme/text.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <unordered_set>

namespace tme {

const TaskNode* TaskDAG::find(const std::string& slot) const {
    auto it = index.find(slot);
    return it == index.end() ? nullptr : &nodes[it->second];
}

TaskNode* TaskDAG::find(const std::string& slot) {
    auto it = index.find(slot);
    return it == index.end() ? nullptr : &nodes[it->second];
}

const Forest::NodeRef* Forest::locate(const std::string& slot) const {
    auto it = ref_.find(slot);
    return it == ref_.end() ? nullptr : &it->second;
}

TaskNode& Forest::require(const std::string& slot) {
    auto* ref = locate(slot);
    if (!ref) throw Error(ErrorCode::UnknownSlot, "no node '" + slot + "'");
    return node_at(*ref);
}

const TaskNode& Forest::require(const std::string& slot) const {
    auto* ref = locate(slot);
    if (!ref) throw Error(ErrorCode::UnknownSlot, "no node '" + slot + "'");
    return node_at(*ref);
}

const TaskNode* Forest::node(const std::string& slot) const {
    auto* ref = locate(slot);
    return ref ? &node_at(*ref) : nullptr;
}

std::vector<std::string> Forest::edges_from(const TaskNode& n) const {
    std::vector<std::string> out;
    if (n.parent) out.push_back(*n.parent);
    out.insert(out.end(), n.dependencies.begin(), n.dependencies.end());
    return out;
}

bool Forest::reaches(const std::string& from, const std::string& to) const {
    if (from == to) return true;
    std::unordered_set<std::string> seen;
    std::deque<std::string> queue{from};
    while (!queue.empty()) {
        auto cur = queue.front();
        queue.pop_front();
        if (!seen.insert(cur).second) continue;
        const auto* n = node(cur);
        if (!n) continue;
        for (const auto& next : edges_from(*n)) {
            if (next == to) return true;
            queue.push_back(next);
        }
    }
    return false;
}

void Forest::index_node(const std::string& slot, NodeRef ref) {
    ref_[slot] = ref;
    const TaskNode& n = node_at(ref);
    shared_index_.emplace(normalize(title_from_slot(slot)), slot);
    if (n.parent) reverse_[*n.parent].push_back(slot);
    for (const auto& dep : n.dependencies) reverse_[dep].push_back(slot);
}

void Forest::add_node(TaskNode node) {
    if (node.slot.empty())
        throw Error(ErrorCode::IntegrityError, "empty slot");
    if (contains(node.slot))
        throw Error(ErrorCode::DuplicateSlot, "slot '" + node.slot + "' exists");
    if (node.parent && !contains(*node.parent))
        throw Error(ErrorCode::DanglingReference,
                    "parent '" + *node.parent + "' of '" + node.slot + "' not found");
    for (const auto& dep : node.dependencies) {
        if (!contains(dep))
            throw Error(ErrorCode::DanglingReference,
                        "dependency '" + dep + "' of '" + node.slot + "' not found");
    }

    node.created_seq = next_seq_++;
    NodeRef ref;
    if (node.parent) {
        ref.dag = locate(*node.parent)->dag;
    } else {
        ref.dag = dags_.size();
        dags_.emplace_back();
        dags_.back().roots.push_back(node.slot);
    }
    auto& dag = dags_[ref.dag];
    ref.pos = dag.nodes.size();
    dag.index[node.slot] = ref.pos;
    std::string slot = node.slot;
    dag.nodes.push_back(std::move(node));
    index_node(slot, ref);
    // A fresh node has no dependents, so resolved references cannot close a
    // cycle; this assert guards the bookkeeping above.
    if (!is_acyclic()) throw Error(ErrorCode::CycleDetected, "graph inconsistent after add");
}

void Forest::add_dependency(const std::string& from_slot, const std::string& to_slot) {
    TaskNode& from = require(from_slot);
    require(to_slot);
    if (std::find(from.dependencies.begin(), from.dependencies.end(), to_slot) !=
        from.dependencies.end())
        return;  // edge already present
    // Adding from -> to creates a cycle iff `from` is reachable from `to`.
    if (reaches(to_slot, from_slot))
        throw Error(ErrorCode::CycleDetected,
                    "dependency " + from_slot + " -> " + to_slot + " would close a cycle");
    from.dependencies.push_back(to_slot);
    reverse_[to_slot].push_back(from_slot);
}

std::optional<NodeRevision> Forest::update_node(const std::string& slot,
                                                const std::string& new_value,
                                                int round) {
    TaskNode& n = require(slot);
    if (!n.active()) throw Error(ErrorCode::InactiveNode, "node '" + slot + "' is inactive");
    if (n.value == new_value) return std::nullopt;  // identical value: no-op
    NodeRevision rev{slot, n.value, new_value, round};
    n.history.push_back(n.value);
    n.value = new_value;
    return rev;
}

std::vector<NodeRevision> Forest::replace_global(const std::string& replaced_title,
                                                 const std::string& replacement_value,
                                                 int round) {
    // Exact normalized-title matches take precedence; otherwise fall back to
    // the single best fuzzy match. Slot identifiers derive from titles, so
    // the exact set has at most one element in practice.
    std::vector<std::string> targets;
    const std::string wanted = normalize(replaced_title);
    for (const auto& slot : topological_slots()) {
        if (normalize(title_from_slot(slot)) == wanted) targets.push_back(slot);
    }
    if (targets.empty()) {
        if (auto best = find_node(replaced_title)) targets.push_back(*best);
    }
    if (targets.empty())
        throw Error(ErrorCode::NoMatch, "no active node matches '" + replaced_title + "'");

    std::vector<NodeRevision> revisions;
    for (const auto& slot : targets) {
        if (auto rev = update_node(slot, replacement_value, round)) {
            revisions.push_back(*rev);
            propagate_dependencies(slot);
        }
    }
    return revisions;
}

void Forest::rollback_node(const std::string& slot, std::size_t steps) {
    TaskNode& n = require(slot);
    if (steps == 0) return;
    if (steps > n.history.size())
        throw Error(ErrorCode::HistoryUnderflow,
                    "cannot roll back " + std::to_string(steps) + " steps with " +
                        std::to_string(n.history.size()) + " history entries");
    // Restore the entry `steps` back and drop it plus everything after it;
    // the superseded current value is discarded, so rolling back again is
    // not double-counted.
    std::size_t restore = n.history.size() - steps;
    n.value = n.history[restore];
    n.history.resize(restore);
    propagate_dependencies(slot);
}

void Forest::inactivate_node(const std::string& slot) {
    TaskNode& n = require(slot);
    if (!n.active())
        throw Error(ErrorCode::AlreadyInactive, "node '" + slot + "' already inactive");
    n.status = NodeStatus::Inactive;
}

std::optional<std::string> Forest::find_exact(const std::string& query) const {
    if (const auto* n = node(query); n && n->active()) return query;
    if (auto it = shared_index_.find(normalize(query)); it != shared_index_.end()) {
        if (const auto* n = node(it->second); n && n->active()) return it->second;
    }
    return std::nullopt;
}

std::optional<std::string> Forest::find_node(const std::string& query_title) const {
    // (a) exact slot, (b) exact normalized title
    if (auto exact = find_exact(query_title)) return exact;

    // (c) highest token overlap with slot tail + value, earliest node wins ties
    auto query_tokens = tokenize(query_title);
    std::optional<std::string> best;
    std::size_t best_score = 0;
    std::uint64_t best_seq = 0;
    for (const auto& dag : dags_) {
        for (const auto& n : dag.nodes) {
            if (!n.active()) continue;
            std::set<std::string> node_tokens;
            node_tokens.insert(slot_tail(n.slot));
            for (const auto& tok : tokenize(n.value)) node_tokens.insert(tok);
            std::size_t score = 0;
            std::set<std::string> counted;
            for (const auto& q : query_tokens) {
                if (node_tokens.count(q) && counted.insert(q).second) ++score;
            }
            if (score == 0) continue;
            if (!best || score > best_score || (score == best_score && n.created_seq < best_seq)) {
                best = n.slot;
                best_score = score;
                best_seq = n.created_seq;
            }
        }
    }
    return best;
}

std::vector<std::string> Forest::propagate_dependencies(const std::string& slot) {
    require(slot);
    std::unordered_set<std::string> dependents;
    std::deque<std::string> queue{slot};
    while (!queue.empty()) {
        auto cur = queue.front();
        queue.pop_front();
        auto it = reverse_.find(cur);
        if (it == reverse_.end()) continue;
        for (const auto& dep : it->second) {
            if (dependents.insert(dep).second) queue.push_back(dep);
        }
    }
    std::vector<std::string> ordered;
    for (const auto& s : topological_slots(true)) {
        if (dependents.count(s)) {
            ordered.push_back(s);
            node_at(*locate(s)).context_stale = true;
        }
    }
    return ordered;
}

ContextSubgraph Forest::retrieve_subgraph(const std::string& focus,
                                          const NodeCostFn& cost,
                                          std::optional<int> budget) {
    const TaskNode* focus_node = node(focus);
    if (!focus_node) throw Error(ErrorCode::UnknownSlot, "no node '" + focus + "'");
    if (!focus_node->active())
        throw Error(ErrorCode::InactiveFocus, "focus '" + focus + "' is inactive");

    // Root-to-focus path along parent edges, active nodes only.
    std::vector<std::string> path;
    for (const TaskNode* cur = focus_node;;) {
        if (cur->active()) path.insert(path.begin(), cur->slot);
        if (!cur->parent) break;
        cur = &require(*cur->parent);
    }

    std::unordered_set<std::string> in_path(path.begin(), path.end());
    std::vector<std::string> deps;
    for (const auto& dep : focus_node->dependencies) {
        const TaskNode& d = require(dep);
        if (d.active() && !in_path.count(dep)) deps.push_back(dep);
    }

    // Context-stale transitive dependents of the focus.
    std::unordered_set<std::string> dependents;
    {
        std::deque<std::string> queue{focus};
        while (!queue.empty()) {
            auto cur = queue.front();
            queue.pop_front();
            auto it = reverse_.find(cur);
            if (it == reverse_.end()) continue;
            for (const auto& dep : it->second) {
                if (dependents.insert(dep).second) queue.push_back(dep);
            }
        }
    }
    std::vector<std::string> stale;
    std::unordered_set<std::string> in_deps(deps.begin(), deps.end());
    for (const auto& s : topological_slots()) {
        if (!dependents.count(s) || in_path.count(s) || in_deps.count(s)) continue;
        const TaskNode& n = require(s);
        if (n.active() && n.context_stale) stale.push_back(s);
    }

    int path_cost = 0;
    for (const auto& s : path) path_cost += cost(require(s));
    if (budget && path_cost > *budget)
        throw Error(ErrorCode::BudgetTooSmall,
                    "path cost " + std::to_string(path_cost) + " exceeds budget " +
                        std::to_string(*budget));

    auto total = [&](const std::vector<std::string>& extra) {
        int t = path_cost;
        for (const auto& s : extra) t += cost(require(s));
        return t;
    };

    // Budget trimming: drop stale dependents first (latest in topological
    // order first), then dependencies; the path is untouchable.
    std::vector<std::string> kept_stale = stale;
    std::vector<std::string> kept_deps = deps;
    if (budget) {
        auto over = [&] {
            std::vector<std::string> extra = kept_deps;
            extra.insert(extra.end(), kept_stale.begin(), kept_stale.end());
            return total(extra) > *budget;
        };
        while (over() && !kept_stale.empty()) kept_stale.pop_back();
        while (over() && !kept_deps.empty()) kept_deps.pop_back();
    }

    std::unordered_set<std::string> selected(path.begin(), path.end());
    selected.insert(kept_deps.begin(), kept_deps.end());
    selected.insert(kept_stale.begin(), kept_stale.end());

    ContextSubgraph out;
    out.focus = focus;
    for (const auto& s : topological_slots()) {
        if (selected.count(s)) {
            out.slots.push_back(s);
            out.total_cost += cost(require(s));
            consume_stale(s);
        }
    }
    return out;
}

std::optional<std::string> Forest::shared_slot(const std::string& title) const {
    auto it = shared_index_.find(normalize(title));
    if (it == shared_index_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::string> Forest::topological_slots(bool include_inactive) const {
    // Kahn's algorithm over parent + dependency edges; FIFO seeded in
    // creation order keeps output deterministic.
    std::unordered_map<std::string, std::size_t> out_degree;
    std::vector<const TaskNode*> all;
    for (const auto& dag : dags_)
        for (const auto& n : dag.nodes) all.push_back(&n);
    std::sort(all.begin(), all.end(),
              [](const TaskNode* a, const TaskNode* b) { return a->created_seq < b->created_seq; });

    for (const auto* n : all) out_degree[n->slot] = edges_from(*n).size();
    std::deque<const TaskNode*> ready;
    for (const auto* n : all)
        if (out_degree[n->slot] == 0) ready.push_back(n);

    std::vector<std::string> order;
    std::unordered_set<std::string> emitted;
    while (!ready.empty()) {
        const TaskNode* n = ready.front();
        ready.pop_front();
        emitted.insert(n->slot);
        if (include_inactive || n->active()) order.push_back(n->slot);
        auto it = reverse_.find(n->slot);
        if (it == reverse_.end()) continue;
        std::vector<const TaskNode*> next;
        for (const auto& dep : it->second) {
            if (--out_degree[dep] == 0) next.push_back(&require(dep));
        }
        std::sort(next.begin(), next.end(),
                  [](const TaskNode* a, const TaskNode* b) { return a->created_seq < b->created_seq; });
        for (const auto* m : next) ready.push_back(m);
    }
    if (emitted.size() != all.size())
        throw Error(ErrorCode::CycleDetected, "topological order does not exist");
    return order;
}

std::vector<std::string> Forest::dag_slots(const std::string& slot) const {
    const auto* ref = locate(slot);
    if (!ref) throw Error(ErrorCode::UnknownSlot, "no node '" + slot + "'");
    const auto& dag = dags_[ref->dag];
    std::unordered_set<std::string> members;
    for (const auto& n : dag.nodes) members.insert(n.slot);
    std::vector<std::string> out;
    for (const auto& s : topological_slots()) {
        if (members.count(s)) out.push_back(s);
    }
    return out;
}

bool Forest::is_shared(const std::string& slot) const {
    const auto* ref = locate(slot);
    if (!ref) return false;
    auto it = reverse_.find(slot);
    if (it == reverse_.end()) return false;
    for (const auto& dependent : it->second) {
        const auto* dref = locate(dependent);
        if (dref && dref->dag != ref->dag) return true;
    }
    return false;
}

void Forest::consume_stale(const std::string& slot) {
    if (const auto* ref = locate(slot)) node_at(*ref).context_stale = false;
}

void Forest::set_responses(const std::string& slot,
                           const std::string& user_response,
                           const std::string& ai_response) {
    TaskNode& n = require(slot);
    n.user_response = user_response;
    n.ai_response = ai_response;
}

bool Forest::is_acyclic() const {
    try {
        topological_slots(true);
        return true;
    } catch (const Error&) {
        return false;
    }
}

void Forest::validate() {
    ref_.clear();
    shared_index_.clear();
    reverse_.clear();
    next_seq_ = 0;
    for (std::size_t d = 0; d < dags_.size(); ++d) {
        auto& dag = dags_[d];
        dag.index.clear();
        dag.roots.clear();
        for (std::size_t p = 0; p < dag.nodes.size(); ++p) {
            auto& n = dag.nodes[p];
            if (n.slot.empty())
                throw Error(ErrorCode::IntegrityError, "node with empty slot");
            if (ref_.count(n.slot))
                throw Error(ErrorCode::IntegrityError, "duplicate slot '" + n.slot + "'");
            n.created_seq = next_seq_++;
            n.context_stale = false;
            dag.index[n.slot] = p;
            ref_[n.slot] = NodeRef{d, p};
            if (!n.parent) dag.roots.push_back(n.slot);
        }
    }
    for (const auto& dag : dags_) {
        for (const auto& n : dag.nodes) {
            if (n.parent) {
                const auto* pref = locate(*n.parent);
                if (!pref)
                    throw Error(ErrorCode::IntegrityError,
                                "parent '" + *n.parent + "' of '" + n.slot + "' missing");
                if (pref->dag != locate(n.slot)->dag)
                    throw Error(ErrorCode::IntegrityError,
                                "parent of '" + n.slot + "' lives in another task graph");
            }
            for (const auto& dep : n.dependencies) {
                if (!contains(dep))
                    throw Error(ErrorCode::IntegrityError,
                                "dependency '" + dep + "' of '" + n.slot + "' missing");
            }
        }
    }
    for (std::size_t d = 0; d < dags_.size(); ++d) {
        for (std::size_t p = 0; p < dags_[d].nodes.size(); ++p) {
            const auto& n = dags_[d].nodes[p];
            shared_index_.emplace(normalize(title_from_slot(n.slot)), n.slot);
            if (n.parent) reverse_[*n.parent].push_back(n.slot);
            for (const auto& dep : n.dependencies) reverse_[dep].push_back(n.slot);
        }
    }
    if (!is_acyclic()) throw Error(ErrorCode::IntegrityError, "loaded graph contains a cycle");
}

bool check_acyclic(const TaskDAG& dag) {
    // Edges whose endpoints both live in this DAG; DFS three-color check.
    enum class Mark { White, Grey, Black };
    std::unordered_map<std::string, Mark> mark;
    for (const auto& n : dag.nodes) mark[n.slot] = Mark::White;

    std::function<bool(const TaskNode&)> visit = [&](const TaskNode& n) -> bool {
        mark[n.slot] = Mark::Grey;
        std::vector<std::string> targets;
        if (n.parent && dag.find(*n.parent)) targets.push_back(*n.parent);
        for (const auto& dep : n.dependencies)
            if (dag.find(dep)) targets.push_back(dep);
        for (const auto& t : targets) {
            if (mark[t] == Mark::Grey) return false;
            if (mark[t] == Mark::White && !visit(*dag.find(t))) return false;
        }
        mark[n.slot] = Mark::Black;
        return true;
    };

    for (const auto& n : dag.nodes) {
        if (mark[n.slot] == Mark::White && !visit(n)) return false;
    }
    return true;
}

} // namespace tme
