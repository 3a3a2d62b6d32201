#pragma once

// Randomized graph properties shared by the unit suite and the acceptance
// gate. Each runs `cases` independent trials and returns the number of
// violations (0 expected); the seed pins the trial stream.

#include "support/builders.hpp"
#include "tme/errors.hpp"
#include "tme/snapshot.hpp"

#include <algorithm>
#include <random>

namespace tme::testsupport {

// Cycle-creating dependency edges are rejected atomically.
inline int property_cycle_rejection(std::uint64_t seed, int cases) {
    std::mt19937_64 rng(seed);
    int violations = 0;
    for (int i = 0; i < cases; ++i) {
        Forest f = random_forest(rng, 3 + static_cast<int>(rng() % 8));
        // Pick a node with an ancestor and aim the edge back down the chain.
        auto slots = all_slots(f);
        std::string child, ancestor;
        for (const auto& slot : slots) {
            const TaskNode* n = f.node(slot);
            if (n->parent) {
                child = slot;
                const TaskNode* cur = n;
                while (cur->parent && rng() % 2 == 0) cur = f.node(*cur->parent);
                ancestor = cur->parent ? *cur->parent : *n->parent;
                break;
            }
        }
        if (child.empty()) continue;
        auto before = snapshot(f);
        bool rejected = false;
        try {
            f.add_dependency(ancestor, child);
        } catch (const Error& e) {
            rejected = e.code() == ErrorCode::CycleDetected;
        }
        if (!rejected || snapshot(f) != before || !f.is_acyclic()) ++violations;
    }
    return violations;
}

// History only grows, and by exactly one entry per value change.
inline int property_history_append_only(std::uint64_t seed, int cases) {
    std::mt19937_64 rng(seed);
    int violations = 0;
    for (int i = 0; i < cases; ++i) {
        Forest f = random_forest(rng, 2 + static_cast<int>(rng() % 6));
        auto slots = active_slots(f);
        if (slots.empty()) continue;
        const std::string slot = slots[rng() % slots.size()];
        for (int step = 0; step < 4; ++step) {
            std::size_t before = f.node(slot)->history.size();
            bool same = rng() % 3 == 0;
            std::string next = same ? f.node(slot)->value : "v" + std::to_string(rng() % 1000);
            bool changed = f.node(slot)->value != next;
            f.update_node(slot, next, step + 1);
            std::size_t after = f.node(slot)->history.size();
            if (after != before + (changed ? 1 : 0)) ++violations;
        }
    }
    return violations;
}

// rollback(update(f, s, v), s, 1) restores the pre-update value and history.
inline int property_rollback_inverse(std::uint64_t seed, int cases) {
    std::mt19937_64 rng(seed);
    int violations = 0;
    for (int i = 0; i < cases; ++i) {
        Forest f = random_forest(rng, 2 + static_cast<int>(rng() % 6));
        auto slots = active_slots(f);
        if (slots.empty()) continue;
        const std::string slot = slots[rng() % slots.size()];
        const std::string old_value = f.node(slot)->value;
        const auto old_history = f.node(slot)->history;
        std::string next = "changed " + std::to_string(rng() % 1000);
        if (next == old_value) next += "!";
        f.update_node(slot, next, 1);
        f.rollback_node(slot, 1);
        if (f.node(slot)->value != old_value || f.node(slot)->history != old_history)
            ++violations;
    }
    return violations;
}

// load(snapshot(f)) is structurally identical to f.
inline int property_snapshot_roundtrip(std::uint64_t seed, int cases) {
    std::mt19937_64 rng(seed);
    int violations = 0;
    for (int i = 0; i < cases; ++i) {
        Forest f = random_forest(rng, 1 + static_cast<int>(rng() % 10));
        auto slots = active_slots(f);
        // A few mutations for: history entries, inactive nodes.
        for (int m = 0; m < 3 && !slots.empty(); ++m) {
            const std::string slot = slots[rng() % slots.size()];
            if (rng() % 4 == 0 && f.node(slot)->active()) {
                f.inactivate_node(slot);
            } else if (f.node(slot)->active()) {
                f.update_node(slot, "m" + std::to_string(rng() % 100), m + 1);
            }
            slots = active_slots(f);
        }
        if (!structurally_equal(load_forest(snapshot(f)), f)) ++violations;
    }
    return violations;
}

// Inactive nodes never appear in a retrieved subgraph.
inline int property_inactive_exclusion(std::uint64_t seed, int cases) {
    std::mt19937_64 rng(seed);
    int violations = 0;
    for (int i = 0; i < cases; ++i) {
        Forest f = random_forest(rng, 3 + static_cast<int>(rng() % 8));
        auto slots = active_slots(f);
        for (int m = 0; m < 2 && slots.size() > 1; ++m) {
            f.inactivate_node(slots[rng() % slots.size()]);
            slots = active_slots(f);
        }
        if (slots.empty()) continue;
        for (const auto& slot : slots) f.propagate_dependencies(slot);
        const std::string focus = slots[rng() % slots.size()];
        auto sub = f.retrieve_subgraph(focus, unit_cost());
        for (const auto& s : sub.slots) {
            if (!f.node(s)->active()) ++violations;
        }
    }
    return violations;
}

} // namespace tme::testsupport
