#pragma once

#include "tme/forest.hpp"

#include <string>

namespace tme {

// Serialize the forest to the snapshot JSON schema:
//   {"dags":[{"roots":[...],"nodes":{"<slot>":{"slot","value","history",
//    "parent","dependencies","status","user_response","ai_response"}}}]}
// Nodes are written in creation order; `parent` is null for roots and
// `history` lists prior values oldest-first.
std::string snapshot(const Forest& forest);

// Rebuild a forest from snapshot JSON. Throws MalformedSnapshot on schema
// violations and IntegrityError when the graph breaks forest invariants.
Forest load_forest(const std::string& json_text);

// Graphviz rendering: one digraph per task DAG, solid edges for parent
// links, dashed for dependencies, inactive nodes grey. Labels carry the
// current value and any history.
std::string to_dot(const Forest& forest);

} // namespace tme
