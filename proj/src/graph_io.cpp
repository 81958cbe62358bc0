#include "llmcg/graph_io.hpp"

#include "llmcg/error.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>
#include <vector>

namespace llmcg {
namespace {

using nlohmann::json;

constexpr std::string_view kFormatTag = "llmcg.graph";
constexpr int kFormatVersion = 1;

std::vector<const Entity*> entities_by_label(const CausalGraph& graph) {
  std::vector<const Entity*> sorted;
  for (const auto& [id, entity] : graph.entities()) sorted.push_back(&entity);
  std::sort(sorted.begin(), sorted.end(), [](const Entity* a, const Entity* b) {
    return std::tie(a->canonical_label, a->id) < std::tie(b->canonical_label, b->id);
  });
  return sorted;
}

std::string dot_quote(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out.push_back('\\');
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string to_dot(const CausalGraph& graph) {
  std::ostringstream out;
  out << "digraph causal_graph {\n";
  out << "  // kind: " << to_string(graph.kind()) << "\n";
  for (const Entity* entity : entities_by_label(graph)) {
    out << "  " << dot_quote(entity->id.str()) << " [label=" << dot_quote(entity->canonical_label)
        << "];\n";
  }
  for (const auto& [key, arc] : graph.arcs()) {
    out << "  " << dot_quote(key.first.str()) << " -> " << dot_quote(key.second.str());
    std::vector<std::string> attributes;
    if (arc.flags.suspected_transitive) attributes.emplace_back("style=dashed");
    if (arc.flags.on_directed_cycle) attributes.emplace_back("color=red");
    if (!attributes.empty()) {
      out << " [";
      for (std::size_t i = 0; i < attributes.size(); ++i) {
        out << (i ? ", " : "") << attributes[i];
      }
      out << "]";
    }
    out << ";\n";
  }
  out << "}\n";
  return out.str();
}

template <typename T>
T required(const json& object, const char* key, std::string_view where) {
  if (!object.is_object() || !object.contains(key)) {
    throw Error(ErrorCode::ParseError, std::string(where) + ": missing '" + key + "'");
  }
  try {
    return object.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string(where) + ": bad '" + key + "': " + e.what());
  }
}

}  // namespace

nlohmann::json graph_to_json(const CausalGraph& graph) {
  json entities = json::array();
  for (const Entity* entity : entities_by_label(graph)) {
    entities.push_back({{"id", entity->id.str()},
                        {"canonical_label", entity->canonical_label},
                        {"surface_forms", entity->surface_forms},
                        {"first_offset", entity->first_offset}});
  }
  json arcs = json::array();
  for (const auto& [key, arc] : graph.arcs()) {
    json flags = json::array();
    if (arc.flags.on_directed_cycle) flags.push_back("on_directed_cycle");
    if (arc.flags.suspected_transitive) flags.push_back("suspected_transitive");
    json item = {{"cause", key.first.str()},
                 {"effect", key.second.str()},
                 {"provenance", to_string(arc.provenance)},
                 {"flags", flags}};
    if (arc.source_exchange) item["source_exchange"] = *arc.source_exchange;
    arcs.push_back(std::move(item));
  }
  return {{"format", kFormatTag},
          {"version", kFormatVersion},
          {"kind", to_string(graph.kind())},
          {"entities", std::move(entities)},
          {"arcs", std::move(arcs)}};
}

CausalGraph graph_from_json(const nlohmann::json& document) {
  if (!document.is_object()) throw Error(ErrorCode::ParseError, "graph file is not an object");
  if (document.contains("format") && document.at("format") != kFormatTag) {
    throw Error(ErrorCode::ParseError, "unexpected format tag");
  }
  const auto kind_text = document.contains("kind")
                             ? required<std::string>(document, "kind", "graph")
                             : std::string("extracted");
  CausalGraph graph(graph_kind_from_string(kind_text));

  const auto entities = required<json>(document, "entities", "graph");
  if (!entities.is_array()) throw Error(ErrorCode::ParseError, "'entities' is not a sequence");
  for (std::size_t i = 0; i < entities.size(); ++i) {
    const json& item = entities[i];
    const std::string where = "entities[" + std::to_string(i) + "]";
    Entity entity;
    entity.id = EntityId(required<std::string>(item, "id", where));
    entity.canonical_label = required<std::string>(item, "canonical_label", where);
    if (item.contains("surface_forms")) {
      for (auto& form : required<std::vector<std::string>>(item, "surface_forms", where)) {
        entity.surface_forms.insert(std::move(form));
      }
    } else {
      entity.surface_forms.insert(entity.canonical_label);
    }
    if (item.contains("first_offset")) {
      entity.first_offset = required<std::size_t>(item, "first_offset", where);
    }
    graph.add_entity(std::move(entity));
  }

  const auto arcs = required<json>(document, "arcs", "graph");
  if (!arcs.is_array()) throw Error(ErrorCode::ParseError, "'arcs' is not a sequence");
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    const json& item = arcs[i];
    const std::string where = "arcs[" + std::to_string(i) + "]";
    Arc arc;
    arc.cause = EntityId(required<std::string>(item, "cause", where));
    arc.effect = EntityId(required<std::string>(item, "effect", where));
    arc.provenance = item.contains("provenance")
                         ? provenance_from_string(required<std::string>(item, "provenance", where))
                         : (graph.kind() == GraphKind::GroundTruth
                                ? Provenance::GroundTruthAnnotation
                                : Provenance::Imported);
    if (item.contains("source_exchange")) {
      arc.source_exchange = required<std::string>(item, "source_exchange", where);
    }
    if (item.contains("flags")) {
      for (const auto& flag : required<std::vector<std::string>>(item, "flags", where)) {
        if (flag == "suspected_transitive") {
          arc.flags.suspected_transitive = true;
        } else if (flag == "on_directed_cycle") {
          arc.flags.on_directed_cycle = true;
        } else {
          throw Error(ErrorCode::ParseError, where + ": unknown flag '" + flag + "'");
        }
      }
    }
    graph.add_arc(std::move(arc));
  }
  return graph;
}

std::string serialize_graph(const CausalGraph& graph, GraphFormat format) {
  if (format == GraphFormat::Dot) return to_dot(graph);
  return graph_to_json(graph).dump(2) + "\n";
}

CausalGraph parse_graph(std::string_view text) {
  json document;
  try {
    document = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string("graph file: ") + e.what());
  }
  return graph_from_json(document);
}

}  // namespace llmcg
