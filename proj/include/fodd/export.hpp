#pragma once

#include <string>
#include <string_view>

#include "fodd/manager.hpp"

namespace fodd {

/// Graphviz text: one declaration per reachable node in topological order,
/// solid edges for true branches, dashed for false branches.
std::string export_dot(Fodd b);

/// JSON with interned node ids, so shared sub-diagrams stay shared:
/// {"root": id, "nodes": [{"id", "leaf"} | {"id", "label", "high", "low"}]}.
std::string export_json(Fodd b);

/// Rebuild a diagram exported by export_json in manager `m`, resolving
/// predicates by name.
Fodd import_json(std::string_view text, Manager& m);

}  // namespace fodd
