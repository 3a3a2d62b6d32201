#include "tme/session.hpp"

#include "tme/chat.hpp"
#include "tme/errors.hpp"
#include "tme/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace tme {

const char* variant_name(Variant v) {
    switch (v) {
    case Variant::TmeDag: return "tme_dag";
    case Variant::TmeFlat: return "tme_flat";
    case Variant::TmeRandomTrim: return "tme_random_trim";
    case Variant::BaselineFlat: return "baseline_flat";
    }
    return "tme_dag";
}

Variant variant_from(const std::string& name) {
    if (name == "tme_dag") return Variant::TmeDag;
    if (name == "tme_flat") return Variant::TmeFlat;
    if (name == "tme_random_trim") return Variant::TmeRandomTrim;
    if (name == "baseline_flat") return Variant::BaselineFlat;
    throw Error(ErrorCode::UsageError, "unknown variant '" + name + "'");
}

bool variant_uses_forest(Variant v) {
    return v == Variant::TmeDag || v == Variant::TmeRandomTrim;
}

int TokenLedger::total() const {
    return std::accumulate(rows.begin(), rows.end(), 0,
                           [](int acc, const Row& r) { return acc + r.prompt_tokens; });
}

int TokenLedger::total_first(std::size_t n) const {
    int acc = 0;
    for (std::size_t i = 0; i < rows.size() && i < n; ++i) acc += rows[i].prompt_tokens;
    return acc;
}

std::string round_log_json(const RoundLog& log) {
    nlohmann::ordered_json j;
    j["variant"] = variant_name(log.variant);
    j["round"] = log.round;
    j["user_input"] = log.user_input;
    j["intents"] = nlohmann::ordered_json::parse(intents_to_json(log.intents));
    j["operations"] = log.operations;
    if (!log.warnings.empty()) j["warnings"] = log.warnings;
    j["prompt_hash"] = log.prompt_hash;
    j["prompt_tokens"] = log.prompt_tokens;
    j["response"] = log.response;
    return j.dump();
}

// ---------------------------------------------------------------------------
// Prompt rendering

namespace {

std::string node_prompt_line(const std::string& slot, const std::string& value) {
    return "Task: " + title_from_slot(slot) + " (current value: " + value + ").";
}

std::string render_prompt(const std::vector<std::pair<std::string, std::string>>& lines,
                          const std::string& user_input) {
    std::string out;
    for (const auto& [slot, value] : lines) {
        if (value.empty()) continue;  // structural nodes render nothing
        if (!out.empty()) out.push_back(' ');
        out += node_prompt_line(slot, value);
    }
    if (!out.empty()) out.push_back(' ');
    out += "User: " + user_input;
    return out;
}

} // namespace

std::string synthesize_prompt(const Session& state, const ContextSubgraph& subgraph,
                              const std::string& user_input) {
    if (!state.has_forest())
        return synthesize_flat_prompt(state.transcript(), user_input);
    if (subgraph.slots.empty())
        throw Error(ErrorCode::EmptyContext, "subgraph is empty");
    std::vector<std::pair<std::string, std::string>> lines;
    for (const auto& slot : subgraph.slots) {
        const TaskNode* n = state.forest().node(slot);
        if (n) lines.emplace_back(slot, n->value);
    }
    return render_prompt(lines, user_input);
}

std::string synthesize_flat_prompt(
    const std::vector<std::pair<std::string, std::string>>& transcript,
    const std::string& user_input) {
    std::string out;
    for (const auto& [speaker, text] : transcript) {
        if (!out.empty()) out.push_back(' ');
        out += speaker + ": " + text;
    }
    if (!out.empty()) out.push_back(' ');
    out += "User: " + user_input;
    return out;
}

NodeCostFn prompt_line_cost(const TokenCounter& counter) {
    return [&counter](const TaskNode& n) {
        if (n.value.empty()) return 0;
        return counter.count(node_prompt_line(n.slot, n.value));
    };
}

// ---------------------------------------------------------------------------
// Session

Session::Session(Variant variant, SessionConfig config)
    : variant_(variant), config_(std::move(config)) {}

std::optional<std::string> Session::resolve_parent(const std::optional<std::string>& parent,
                                                   TurnEffects& fx) {
    if (!parent || parent->empty()) return std::nullopt;
    if (auto slot = forest_.find_node(*parent)) return slot;
    // Unknown parent title: open it as a fresh root so the child has a home.
    std::string slot = slot_from_title(*parent);
    if (slot.empty()) return std::nullopt;
    TaskNode root;
    root.slot = slot;
    forest_.add_node(std::move(root));
    fx.operations.push_back("add " + slot);
    fx.warnings.push_back("parent '" + *parent + "' not found; created root '" + slot + "'");
    fx.mutated = true;
    return slot;
}

std::string Session::create_node(const std::string& title,
                                 const std::optional<std::string>& parent,
                                 const std::vector<std::string>& deps, const std::string& value,
                                 TurnEffects& fx) {
    TaskNode node;
    node.slot = slot_from_title(title);
    if (node.slot.empty())
        throw Error(ErrorCode::IntegrityError, "title '" + title + "' normalizes to nothing");
    node.value = value;
    node.parent = resolve_parent(parent, fx);
    for (const auto& dep : deps) {
        if (auto slot = forest_.find_node(dep)) {
            node.dependencies.push_back(*slot);
        } else {
            fx.warnings.push_back("dependency '" + dep + "' not found; skipped");
        }
    }
    forest_.add_node(node);
    fx.operations.push_back("add " + node.slot);
    fx.focus = node.slot;
    fx.mutated = true;
    return node.slot;
}

void Session::apply_new_intent(const SubtaskIntent& intent, TurnEffects& fx) {
    // Shared-subtask rule: a new intent whose title matches an existing
    // active node links it as a dependency of the parent task instead of
    // duplicating the node.
    if (auto shared = forest_.shared_slot(intent.subtask_title)) {
        const TaskNode* existing = forest_.node(*shared);
        if (existing && existing->active()) {
            if (intent.parent_node) {
                if (auto parent = forest_.find_node(*intent.parent_node)) {
                    try {
                        forest_.add_dependency(*parent, *shared);
                        fx.operations.push_back("link " + *parent + " -> " + *shared);
                        fx.mutated = true;
                    } catch (const Error& e) {
                        fx.warnings.push_back(e.what());
                    }
                } else {
                    fx.warnings.push_back("parent '" + *intent.parent_node +
                                          "' not found for shared subtask '" +
                                          intent.subtask_title + "'");
                }
            } else {
                fx.warnings.push_back("subtask '" + intent.subtask_title + "' already exists");
            }
            fx.focus = *shared;
            return;
        }
        fx.warnings.push_back("subtask '" + intent.subtask_title +
                              "' matches an inactive node; skipped");
        return;
    }
    try {
        create_node(intent.subtask_title, intent.parent_node, intent.dependency_nodes, "", fx);
    } catch (const Error& e) {
        fx.warnings.push_back(e.what());
    }
}

void Session::apply_update_intent(const SubtaskIntent& intent, int round, TurnEffects& fx) {
    // Update targets resolve by exact slot/title only: fuzzy matching here
    // could revise a sibling node when the user introduces a new one.
    std::optional<std::string> target;
    if (intent.replaced && !intent.replaced->empty()) target = forest_.find_exact(*intent.replaced);
    if (!target) target = forest_.find_exact(intent.subtask_title);

    const bool inactivation = intent.replacement && intent.replacement->empty();

    if (target) {
        if (inactivation) {
            forest_.inactivate_node(*target);
            fx.operations.push_back("inactivate " + *target);
            // Keep retrieval anchored on something alive.
            const TaskNode* n = forest_.node(*target);
            fx.focus = n->parent ? *n->parent : fx.focus;
            fx.mutated = true;
            return;
        }
        const std::string new_value = intent.replacement.value_or(intent.subtask_title);
        const std::string replaced_title =
            (intent.replaced && !intent.replaced->empty()) ? *intent.replaced
                                                           : intent.subtask_title;
        if (forest_.is_shared(*target)) {
            // A shared subtask revision must reach every task that uses it.
            auto revs = forest_.replace_global(replaced_title, new_value, round);
            for (const auto& rev : revs) {
                fx.operations.push_back("replace " + rev.slot);
                fx.revisions.push_back(rev);
            }
            fx.mutated |= !revs.empty();
        } else {
            if (auto rev = forest_.update_node(*target, new_value, round)) {
                forest_.propagate_dependencies(*target);
                fx.operations.push_back("update " + *target);
                fx.revisions.push_back(*rev);
                fx.mutated = true;
            } else {
                fx.operations.push_back("noop update " + *target);
            }
        }
        fx.focus = *target;
        return;
    }

    if (inactivation) {
        fx.warnings.push_back("cannot inactivate '" +
                              intent.replaced.value_or(intent.subtask_title) + "': not found");
        return;
    }

    // Unresolvable update target: record the value as a fresh node and flag
    // the round so the discrepancy stays observable.
    const std::string title = (intent.replaced && !intent.replaced->empty())
                                  ? *intent.replaced
                                  : intent.subtask_title;
    try {
        std::string slot = create_node(title, intent.parent_node, intent.dependency_nodes,
                                       intent.replacement.value_or(""), fx);
        fx.warnings.push_back("update target '" + title + "' not found; initialized node '" +
                              slot + "'");
    } catch (const Error& e) {
        fx.warnings.push_back(e.what());
    }
}

Session::TurnEffects Session::apply_intents(const std::vector<SubtaskIntent>& intents, int round) {
    TurnEffects fx;
    for (const auto& intent : intents) {
        switch (intent.intent_type) {
        case IntentType::New:
            apply_new_intent(intent, fx);
            break;
        case IntentType::Update:
            apply_update_intent(intent, round, fx);
            break;
        case IntentType::Check: {
            auto target = forest_.find_node(intent.subtask_title);
            fx.operations.push_back("check " + target.value_or("(summary)"));
            if (target) fx.focus = *target;
            // Queries against a task root or with no match read the whole
            // task state rather than a single node path.
            const TaskNode* n = target ? forest_.node(*target) : nullptr;
            fx.summary_context = !n || !n->parent;
            break;
        }
        }
    }
    return fx;
}

std::string Session::summarize_all() const {
    std::ostringstream out;
    bool first = true;
    for (const auto& dag : forest_.dags()) {
        std::vector<std::string> lines;
        std::string heading;
        for (const auto& slot : forest_.dag_slots(dag.nodes.empty() ? "" : dag.nodes.front().slot)) {
            const TaskNode* n = forest_.node(slot);
            if (!n->parent) heading = title_from_slot(slot);
            if (!n->value.empty())
                lines.push_back("- " + title_from_slot(slot) + ": " + n->value);
        }
        if (heading.empty() && lines.empty()) continue;
        if (!first) out << "\n";
        first = false;
        out << (heading.empty() ? "Tasks" : heading) << ":";
        for (const auto& line : lines) out << "\n" << line;
    }
    return out.str();
}

const RoundLog& Session::step(const std::string& user_input, Classifier* classifier,
                              Responder* responder, const TokenCounter& counter) {
    if (user_input.empty())
        throw Error(ErrorCode::UsageError, "user input must be non-empty");
    const int round = rounds_processed() + 1;

    RoundLog log;
    log.variant = variant_;
    log.round = round;
    log.user_input = user_input;

    // Step 1+2: decomposition and intent classification (one backend call).
    if (variant_ != Variant::BaselineFlat) {
        if (!classifier)
            throw Error(ErrorCode::BackendUnavailable, "classifier required for this variant");
        try {
            log.intents = classifier->decompose(user_input, round,
                                                has_forest() ? &forest_ : nullptr);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::MalformedOutput)
                throw Error(ErrorCode::ClassificationFailed,
                            "round " + std::to_string(round) + ": " + e.what());
            throw;
        }
        if (log.intents.empty())
            throw Error(ErrorCode::ClassificationFailed,
                        "round " + std::to_string(round) + ": classifier returned no intents");
    }

    std::string prompt;
    TurnEffects fx;
    if (has_forest()) {
        // Step 3: graph update.
        fx = apply_intents(log.intents, round);
        if (fx.focus) focus_ = fx.focus;

        // Step 4: context retrieval. Values revised this round render as
        // they stood when the user spoke, so the prompt shows the state the
        // correction applies to.
        std::unordered_map<std::string, std::string> old_values;
        for (const auto& rev : fx.revisions) old_values.emplace(rev.slot, rev.old_value);

        std::vector<std::pair<std::string, std::string>> lines;
        auto add_line = [&](const std::string& slot) {
            const TaskNode* n = forest_.node(slot);
            if (!n) return;
            auto it = old_values.find(slot);
            lines.emplace_back(slot, it != old_values.end() ? it->second : n->value);
        };

        const TaskNode* focus_node =
            focus_ ? forest_.node(*focus_) : nullptr;
        if (!focus_node || !focus_node->active()) {
            for (const auto& slot : forest_.topological_slots()) add_line(slot);
        } else if (fx.summary_context && !focus_node->parent) {
            for (const auto& slot : forest_.dag_slots(*focus_)) add_line(slot);
        } else {
            auto subgraph = forest_.retrieve_subgraph(*focus_, prompt_line_cost(counter));
            for (const auto& slot : subgraph.slots) add_line(slot);
        }
        prompt = render_prompt(lines, user_input);
    } else {
        prompt = synthesize_flat_prompt(transcript_, user_input);
    }

    log.operations = fx.operations;
    log.warnings = fx.warnings;
    log.mutated = fx.mutated;
    log.prompt = prompt;
    log.prompt_hash = sha256_hex(prompt);
    log.prompt_tokens = counter.count(prompt);
    ledger_.rows.push_back({round, log.prompt_tokens});

    // Step 5: response generation.
    ChatRequest request;
    request.model = config_.model;
    request.temperature = config_.temperature;
    if (has_forest()) {
        request.messages.push_back({"user", prompt});
    } else {
        for (const auto& [speaker, text] : transcript_)
            request.messages.push_back({speaker == "User" ? "user" : "assistant", text});
        request.messages.push_back({"user", user_input});
    }

    if (responder) {
        log.response = responder->respond(request);
    } else if (has_forest()) {
        // Offline acknowledgment: summaries for queries, applied operations
        // otherwise.
        if (!fx.mutated) {
            auto summary = summarize_all();
            log.response = summary.empty() ? "Nothing recorded yet." : summary;
        } else {
            std::string ops;
            for (const auto& op : fx.operations) {
                if (!ops.empty()) ops += "; ";
                ops += op;
            }
            log.response = "Recorded: " + ops + ".";
        }
    } else {
        log.response = "Noted.";
    }

    if (has_forest()) {
        if (fx.mutated && focus_ && forest_.contains(*focus_))
            forest_.set_responses(*focus_, user_input, log.response);
    } else {
        transcript_.emplace_back("User", user_input);
        transcript_.emplace_back("Assistant", log.response);
    }

    logs_.push_back(std::move(log));
    return logs_.back();
}

} // namespace tme
