#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace llmcg {

class EntityId {
 public:
  EntityId() = default;
  explicit EntityId(std::string value) : value_(std::move(value)) {}

  const std::string& str() const noexcept { return value_; }
  bool empty() const noexcept { return value_.empty(); }

  auto operator<=>(const EntityId&) const = default;

 private:
  std::string value_;
};

/// A node of a causal graph. `surface_forms` holds every normalized mention
/// merged into this entity, the canonical label included.
struct Entity {
  EntityId id;
  std::string canonical_label;
  std::set<std::string> surface_forms;
  std::size_t first_offset = 0;

  /// Builds an entity whose label and forms are normalized.
  static Entity make(EntityId id, std::string_view label, std::size_t first_offset = 0,
                     const std::vector<std::string>& other_forms = {});

  bool operator==(const Entity&) const = default;
};

/// Throws InvalidGraph when the entity invariants do not hold.
void validate_entity(const Entity& entity);

enum class Provenance { LLMVerdict, GroundTruthAnnotation, Imported };

struct ArcFlags {
  bool suspected_transitive = false;
  bool on_directed_cycle = false;

  bool operator==(const ArcFlags&) const = default;
};

using ArcKey = std::pair<EntityId, EntityId>;

struct Arc {
  EntityId cause;
  EntityId effect;
  Provenance provenance = Provenance::Imported;
  // Fingerprint of the prompt whose answer produced this arc.
  std::optional<std::string> source_exchange;
  ArcFlags flags;

  ArcKey key() const { return {cause, effect}; }
  bool operator==(const Arc&) const = default;
};

enum class GraphKind { Extracted, GroundTruth };

/// Directed causal graph over entities. Entities and arcs are kept in ordered
/// containers so iteration order never depends on insertion order.
class CausalGraph {
 public:
  explicit CausalGraph(GraphKind kind = GraphKind::Extracted) : kind_(kind) {}

  GraphKind kind() const noexcept { return kind_; }

  /// Throws InvalidGraph on a duplicate id or an invalid entity.
  void add_entity(Entity entity);

  /// Inserts `arc`. Returns false (and leaves the graph unchanged) when the
  /// ordered pair already exists; the first insertion's provenance wins.
  /// Throws UnknownEntity, SelfLoop, InvalidGraph, or OppositeArcConflict
  /// (Extracted graphs, when either arc of the opposite pair is an LLM verdict).
  bool add_arc(Arc arc);

  bool remove_arc(const ArcKey& key);

  const Entity* find_entity(const EntityId& id) const;
  const Entity& entity(const EntityId& id) const;
  const Entity* find_by_label(std::string_view canonical_label) const;

  bool has_arc(const EntityId& cause, const EntityId& effect) const;
  const Arc* find_arc(const ArcKey& key) const;
  void set_flags(const ArcKey& key, ArcFlags flags);

  const std::map<EntityId, Entity>& entities() const noexcept { return entities_; }
  const std::map<ArcKey, Arc>& arcs() const noexcept { return arcs_; }
  std::size_t entity_count() const noexcept { return entities_.size(); }
  std::size_t arc_count() const noexcept { return arcs_.size(); }

  const std::set<EntityId>& successors(const EntityId& id) const;

  bool operator==(const CausalGraph& other) const {
    return kind_ == other.kind_ && entities_ == other.entities_ && arcs_ == other.arcs_;
  }

 private:
  GraphKind kind_;
  std::map<EntityId, Entity> entities_;
  std::map<ArcKey, Arc> arcs_;
  std::map<EntityId, std::set<EntityId>> successors_;
};

std::string_view to_string(Provenance provenance);
std::string_view to_string(GraphKind kind);
Provenance provenance_from_string(std::string_view text);
GraphKind graph_kind_from_string(std::string_view text);

}  // namespace llmcg
