#include "tme/snapshot.hpp"

#include "tme/errors.hpp"
#include "tme/text.hpp"

#include <json.hpp>

#include <sstream>

namespace tme {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json node_to_json(const TaskNode& n) {
    ordered_json j;
    j["slot"] = n.slot;
    j["value"] = n.value;
    j["history"] = n.history;
    if (n.parent)
        j["parent"] = *n.parent;
    else
        j["parent"] = nullptr;
    j["dependencies"] = n.dependencies;
    j["status"] = n.active() ? "active" : "inactive";
    j["user_response"] = n.user_response;
    j["ai_response"] = n.ai_response;
    return j;
}

std::string require_string(const ordered_json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_string())
        throw Error(ErrorCode::MalformedSnapshot, std::string("missing string field '") + key + "'");
    return j[key].get<std::string>();
}

} // namespace

// Grants the loader access to Forest internals so graphs can be rebuilt
// wholesale and then validated in one pass.
class SnapshotReader {
public:
    static Forest read(const std::string& json_text) {
        ordered_json doc = ordered_json::parse(json_text, nullptr, false);
        if (doc.is_discarded() || !doc.is_object() || !doc.contains("dags") ||
            !doc["dags"].is_array())
            throw Error(ErrorCode::MalformedSnapshot, "expected top-level {\"dags\": [...]}");

        Forest forest;
        for (const auto& dag_json : doc["dags"]) {
            if (!dag_json.is_object() || !dag_json.contains("nodes") ||
                !dag_json["nodes"].is_object())
                throw Error(ErrorCode::MalformedSnapshot, "each dag needs a 'nodes' object");
            TaskDAG dag;
            for (const auto& [slot, nj] : dag_json["nodes"].items()) {
                if (!nj.is_object())
                    throw Error(ErrorCode::MalformedSnapshot, "node entry must be an object");
                TaskNode n;
                n.slot = require_string(nj, "slot");
                if (n.slot != slot)
                    throw Error(ErrorCode::MalformedSnapshot,
                                "node key '" + slot + "' disagrees with slot field '" + n.slot + "'");
                n.value = require_string(nj, "value");
                if (!nj.contains("history") || !nj["history"].is_array())
                    throw Error(ErrorCode::MalformedSnapshot, "history must be an array");
                for (const auto& h : nj["history"]) {
                    if (!h.is_string())
                        throw Error(ErrorCode::MalformedSnapshot, "history entries must be strings");
                    n.history.push_back(h.get<std::string>());
                }
                if (!nj.contains("parent"))
                    throw Error(ErrorCode::MalformedSnapshot, "missing 'parent'");
                if (nj["parent"].is_string())
                    n.parent = nj["parent"].get<std::string>();
                else if (!nj["parent"].is_null())
                    throw Error(ErrorCode::MalformedSnapshot, "parent must be string or null");
                if (!nj.contains("dependencies") || !nj["dependencies"].is_array())
                    throw Error(ErrorCode::MalformedSnapshot, "dependencies must be an array");
                for (const auto& d : nj["dependencies"]) {
                    if (!d.is_string())
                        throw Error(ErrorCode::MalformedSnapshot, "dependencies must be strings");
                    n.dependencies.push_back(d.get<std::string>());
                }
                std::string status = require_string(nj, "status");
                if (status == "active")
                    n.status = NodeStatus::Active;
                else if (status == "inactive")
                    n.status = NodeStatus::Inactive;
                else
                    throw Error(ErrorCode::MalformedSnapshot, "status must be active|inactive");
                n.user_response = require_string(nj, "user_response");
                n.ai_response = require_string(nj, "ai_response");
                dag.nodes.push_back(std::move(n));
            }
            forest.dags_.push_back(std::move(dag));
        }
        forest.validate();
        return forest;
    }
};

std::string snapshot(const Forest& forest) {
    ordered_json doc;
    doc["dags"] = ordered_json::array();
    for (const auto& dag : forest.dags()) {
        ordered_json dj;
        dj["roots"] = dag.roots;
        dj["nodes"] = ordered_json::object();
        for (const auto& n : dag.nodes) dj["nodes"][n.slot] = node_to_json(n);
        doc["dags"].push_back(std::move(dj));
    }
    return doc.dump(2);
}

Forest load_forest(const std::string& json_text) {
    return SnapshotReader::read(json_text);
}

namespace {

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out.push_back(c);
    }
    return out;
}

} // namespace

std::string to_dot(const Forest& forest) {
    std::ostringstream out;
    std::size_t index = 0;
    for (const auto& dag : forest.dags()) {
        out << "digraph task_" << index++ << " {\n";
        out << "  rankdir=TB;\n  node [shape=box, style=rounded];\n";
        for (const auto& n : dag.nodes) {
            std::string label = title_from_slot(n.slot);
            if (!n.value.empty()) label += "\\n" + dot_escape(n.value);
            if (!n.history.empty()) {
                label += "\\nhistory: [";
                for (std::size_t i = 0; i < n.history.size(); ++i) {
                    if (i) label += ", ";
                    label += dot_escape(n.history[i]);
                }
                label += "]";
            }
            out << "  \"" << n.slot << "\" [label=\"" << label << "\"";
            if (!n.active()) out << ", color=grey, fontcolor=grey";
            out << "];\n";
        }
        for (const auto& n : dag.nodes) {
            if (n.parent) out << "  \"" << *n.parent << "\" -> \"" << n.slot << "\";\n";
            for (const auto& dep : n.dependencies)
                out << "  \"" << n.slot << "\" -> \"" << dep << "\" [style=dashed];\n";
        }
        out << "}\n";
    }
    return out.str();
}

} // namespace tme
