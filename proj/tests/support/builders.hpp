#pragma once

// Shared test scaffolding: quick node/forest builders, a fixed-width token
// counter, and the randomized forest generator used by the property suites.

#include "tme/forest.hpp"
#include "tme/snapshot.hpp"
#include "tme/token_counter.hpp"

#include <cstdlib>
#include <random>
#include <string>
#include <vector>

namespace tme::testsupport {

inline TaskNode make_node(std::string slot, std::string value = "",
                          std::optional<std::string> parent = std::nullopt,
                          std::vector<std::string> deps = {}) {
    TaskNode n;
    n.slot = std::move(slot);
    n.value = std::move(value);
    n.parent = std::move(parent);
    n.dependencies = std::move(deps);
    return n;
}

// Every node costs 1 regardless of content; keeps subgraph math obvious.
class UnitCounter : public TokenCounter {
public:
    int count(const std::string&) const override { return 1; }
};

inline NodeCostFn unit_cost() {
    return [](const TaskNode&) { return 1; };
}

// The five-node form graph: root -> three fields, submit depending on them.
inline Forest form_forest() {
    Forest f;
    f.add_node(make_node("fill.form"));
    f.add_node(make_node("collect.name", "John Doe", "fill.form"));
    f.add_node(make_node("collect.email", "john@example.com", "fill.form"));
    f.add_node(make_node("collect.address", "Market Street, San Francisco", "fill.form"));
    f.add_node(make_node("submit", "", "fill.form",
                         {"collect.name", "collect.email", "collect.address"}));
    return f;
}

// Two tasks sharing one preparation node through a cross-graph dependency.
inline Forest cooking_forest() {
    Forest f;
    f.add_node(make_node("make.soup"));
    f.add_node(make_node("prepare.celery", "wash and chop celery", "make.soup"));
    f.add_node(make_node("make.dumplings"));
    f.add_node(make_node("prepare.tomatoes", "chop tomatoes", "make.dumplings"));
    f.add_node(make_node("prepare.shrimp", "peel & chop shrimp", "make.dumplings"));
    f.add_dependency("make.dumplings", "prepare.celery");
    return f;
}

// Random forest with `n` nodes: each node may pick an earlier node as parent
// and up to two earlier nodes as dependencies (acyclic by construction).
inline Forest random_forest(std::mt19937_64& rng, int n) {
    Forest f;
    std::vector<std::string> slots;
    for (int i = 0; i < n; ++i) {
        std::string slot = "node." + std::to_string(i);
        std::optional<std::string> parent;
        std::vector<std::string> deps;
        if (!slots.empty() && rng() % 4 != 0)
            parent = slots[rng() % slots.size()];
        for (int d = 0; d < 2 && !slots.empty(); ++d) {
            if (rng() % 3 == 0) {
                std::string dep = slots[rng() % slots.size()];
                if (dep != parent.value_or("") &&
                    std::find(deps.begin(), deps.end(), dep) == deps.end())
                    deps.push_back(dep);
            }
        }
        std::string value = rng() % 5 == 0 ? "" : "value " + std::to_string(rng() % 1000);
        f.add_node(make_node(slot, value, parent, deps));
        slots.push_back(slot);
    }
    return f;
}

inline std::vector<std::string> all_slots(const Forest& f) {
    return f.topological_slots(true);
}

inline std::vector<std::string> active_slots(const Forest& f) {
    return f.topological_slots(false);
}

// Structural equality via the canonical serialization.
inline bool structurally_equal(const Forest& a, const Forest& b) {
    return snapshot(a) == snapshot(b);
}

} // namespace tme::testsupport
