#pragma once

#include "llmcg/graph.hpp"

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace llmcg {

struct RenderedPrompt {
  std::string system_text;
  std::string user_text;
  std::string fingerprint;  // SHA-256 over both texts

  static RenderedPrompt make(std::string system_text, std::string user_text);
  bool operator==(const RenderedPrompt&) const = default;
};

std::string prompt_fingerprint(std::string_view system_text, std::string_view user_text);

/// Replaces `{{name}}` slots in a single pass (interpolated values are never
/// rescanned). A slot alone on its line that expands to nothing removes the
/// whole line. Throws InvalidConfig on an unknown or unterminated slot.
std::string render_template(std::string_view tmpl,
                            const std::map<std::string, std::string>& slots);

/// One pairwise query: option A means "entity_a causes entity_b".
struct OrientationQuestion {
  std::string source_text;
  Entity entity_a;
  Entity entity_b;

  /// Orders the pair by (first_offset, canonical_label).
  static OrientationQuestion in_document_order(std::string source_text, Entity first,
                                               Entity second);
};

/// The text of the earliest mention of any of the entity's surface forms,
/// with whitespace collapsed. Throws EntityNotInText.
std::string mention_text(const Entity& entity, std::string_view source_text);

RenderedPrompt render_orientation_prompt(const OrientationQuestion& question);

/// The orientation prompt followed by a reminder to answer inside the tag.
RenderedPrompt render_reask_prompt(const OrientationQuestion& question);

enum class Verdict { Forward, Backward, NoRelation, Unparsable };

std::string_view to_string(Verdict verdict);
Verdict verdict_from_string(std::string_view text);

struct ParsedVerdict {
  Verdict verdict = Verdict::Unparsable;
  std::string rationale_text;

  bool operator==(const ParsedVerdict&) const = default;
};

/// Reads the last well-formed <Answer>X</Answer>; X in {A,B,C} (any case,
/// surrounding whitespace allowed) maps to Forward/Backward/NoRelation.
/// Never throws.
ParsedVerdict parse_verdict(std::string_view raw_reply);

/// Entity-recognition prompt. An empty `domain_hint` drops the emphasis line.
/// Throws EmptyText.
RenderedPrompt render_entity_prompt(std::string_view source_text, std::string_view domain_hint);

inline constexpr std::string_view kMedicalDomainHint =
    "diseases, medications, treatments, and symptoms";

struct EntityList {
  std::vector<std::string> entities;               // normalized, first occurrence order
  std::vector<std::set<std::string>> merge_groups;  // disjoint, each of size >= 2
};

/// Parses <Entity>..</Entity> spans and <Group>..</Group> synonym clusters.
/// Throws NoEntitiesFound when no non-empty span is present.
EntityList parse_entity_list(std::string_view raw_reply);

}  // namespace llmcg
