#include "llmcg/graph.hpp"

#include "llmcg/error.hpp"
#include "llmcg/text.hpp"

namespace llmcg {

Entity Entity::make(EntityId id, std::string_view label, std::size_t first_offset,
                    const std::vector<std::string>& other_forms) {
  Entity entity;
  entity.id = std::move(id);
  entity.canonical_label = normalize_label(label);
  entity.surface_forms.insert(entity.canonical_label);
  for (const auto& form : other_forms) {
    auto normalized = normalize_label(form);
    if (!normalized.empty()) entity.surface_forms.insert(std::move(normalized));
  }
  entity.first_offset = first_offset;
  return entity;
}

void validate_entity(const Entity& entity) {
  if (entity.id.empty()) throw Error(ErrorCode::InvalidGraph, "entity with empty id");
  if (entity.canonical_label.empty()) {
    throw Error(ErrorCode::InvalidGraph, "entity " + entity.id.str() + " has an empty label");
  }
  if (normalize_label(entity.canonical_label) != entity.canonical_label) {
    throw Error(ErrorCode::InvalidGraph,
                "label '" + entity.canonical_label + "' is not normalized");
  }
  if (!entity.surface_forms.contains(entity.canonical_label)) {
    throw Error(ErrorCode::InvalidGraph,
                "surface forms of " + entity.id.str() + " miss the canonical label");
  }
}

void CausalGraph::add_entity(Entity entity) {
  validate_entity(entity);
  const EntityId id = entity.id;
  if (!entities_.emplace(id, std::move(entity)).second) {
    throw Error(ErrorCode::InvalidGraph, "duplicate entity id " + id.str());
  }
  successors_[id];
}

bool CausalGraph::add_arc(Arc arc) {
  if (!entities_.contains(arc.cause)) throw Error(ErrorCode::UnknownEntity, arc.cause.str());
  if (!entities_.contains(arc.effect)) throw Error(ErrorCode::UnknownEntity, arc.effect.str());
  if (arc.cause == arc.effect) throw Error(ErrorCode::SelfLoop, arc.cause.str());
  if (arc.provenance == Provenance::LLMVerdict && !arc.source_exchange) {
    throw Error(ErrorCode::InvalidGraph, "LLM verdict arc without a source exchange");
  }
  if (arcs_.contains(arc.key())) return false;
  if (kind_ == GraphKind::Extracted) {
    if (const Arc* reverse = find_arc({arc.effect, arc.cause})) {
      if (reverse->provenance == Provenance::LLMVerdict ||
          arc.provenance == Provenance::LLMVerdict) {
        throw Error(ErrorCode::OppositeArcConflict,
                    arc.cause.str() + " -> " + arc.effect.str() + " reverses an existing arc");
      }
    }
  }
  successors_[arc.cause].insert(arc.effect);
  auto key = arc.key();
  arcs_.emplace(std::move(key), std::move(arc));
  return true;
}

bool CausalGraph::remove_arc(const ArcKey& key) {
  if (arcs_.erase(key) == 0) return false;
  successors_[key.first].erase(key.second);
  return true;
}

const Entity* CausalGraph::find_entity(const EntityId& id) const {
  auto it = entities_.find(id);
  return it == entities_.end() ? nullptr : &it->second;
}

const Entity& CausalGraph::entity(const EntityId& id) const {
  if (const Entity* found = find_entity(id)) return *found;
  throw Error(ErrorCode::UnknownEntity, id.str());
}

const Entity* CausalGraph::find_by_label(std::string_view canonical_label) const {
  for (const auto& [id, entity] : entities_) {
    if (entity.canonical_label == canonical_label) return &entity;
  }
  return nullptr;
}

bool CausalGraph::has_arc(const EntityId& cause, const EntityId& effect) const {
  return arcs_.contains({cause, effect});
}

const Arc* CausalGraph::find_arc(const ArcKey& key) const {
  auto it = arcs_.find(key);
  return it == arcs_.end() ? nullptr : &it->second;
}

void CausalGraph::set_flags(const ArcKey& key, ArcFlags flags) {
  auto it = arcs_.find(key);
  if (it == arcs_.end()) {
    throw Error(ErrorCode::UnknownEntity, "no arc " + key.first.str() + " -> " + key.second.str());
  }
  it->second.flags = flags;
}

const std::set<EntityId>& CausalGraph::successors(const EntityId& id) const {
  static const std::set<EntityId> kNone;
  auto it = successors_.find(id);
  return it == successors_.end() ? kNone : it->second;
}

std::string_view to_string(Provenance provenance) {
  switch (provenance) {
    case Provenance::LLMVerdict: return "llm_verdict";
    case Provenance::GroundTruthAnnotation: return "ground_truth_annotation";
    case Provenance::Imported: return "imported";
  }
  return "imported";
}

std::string_view to_string(GraphKind kind) {
  return kind == GraphKind::Extracted ? "extracted" : "ground_truth";
}

Provenance provenance_from_string(std::string_view text) {
  if (text == "llm_verdict") return Provenance::LLMVerdict;
  if (text == "ground_truth_annotation") return Provenance::GroundTruthAnnotation;
  if (text == "imported") return Provenance::Imported;
  throw Error(ErrorCode::ParseError, "unknown provenance '" + std::string(text) + "'");
}

GraphKind graph_kind_from_string(std::string_view text) {
  if (text == "extracted") return GraphKind::Extracted;
  if (text == "ground_truth") return GraphKind::GroundTruth;
  throw Error(ErrorCode::ParseError, "unknown graph kind '" + std::string(text) + "'");
}

}  // namespace llmcg
