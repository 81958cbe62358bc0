#pragma once

#include "llmcg/graph.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <string_view>

namespace llmcg {

enum class GraphFormat { Dot, StructuredGraphFile };

/// Deterministic rendering: entities sorted by canonical label, arcs by
/// (cause, effect). Suspected transitive arcs are dashed in DOT output and
/// arcs on directed cycles are drawn red.
std::string serialize_graph(const CausalGraph& graph, GraphFormat format);

/// Parses a StructuredGraphFile. Throws ParseError on schema violations and
/// the graph errors (UnknownEntity, SelfLoop, ...) on invalid content.
CausalGraph parse_graph(std::string_view text);

nlohmann::json graph_to_json(const CausalGraph& graph);
CausalGraph graph_from_json(const nlohmann::json& document);

}  // namespace llmcg
