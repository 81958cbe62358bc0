#include "llmcg/prompt.hpp"

#include "llmcg/error.hpp"
#include "llmcg/prompt_templates.hpp"
#include "llmcg/text.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <optional>

namespace llmcg {
namespace {

constexpr std::string_view kAnswerOpen = "<Answer>";
constexpr std::string_view kAnswerClose = "</Answer>";

struct Tag {
  enum Kind { EntityOpen, EntityClose, GroupOpen, GroupClose } kind;
  std::size_t position;
  std::size_t length;
};

std::vector<Tag> scan_tags(std::string_view text) {
  static constexpr std::pair<std::string_view, Tag::Kind> kTags[] = {
      {"<Entity>", Tag::EntityOpen},
      {"</Entity>", Tag::EntityClose},
      {"<Group>", Tag::GroupOpen},
      {"</Group>", Tag::GroupClose},
  };
  std::vector<Tag> tags;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '<') continue;
    for (const auto& [literal, kind] : kTags) {
      if (text.substr(i, literal.size()) == literal) {
        tags.push_back({kind, i, literal.size()});
        break;
      }
    }
  }
  return tags;
}

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

std::string prompt_fingerprint(std::string_view system_text, std::string_view user_text) {
  std::string framed;
  framed.reserve(system_text.size() + user_text.size() + 32);
  framed += "system:" + std::to_string(system_text.size()) + ":";
  framed += system_text;
  framed += "user:" + std::to_string(user_text.size()) + ":";
  framed += user_text;
  return sha256_hex(framed);
}

RenderedPrompt RenderedPrompt::make(std::string system_text, std::string user_text) {
  RenderedPrompt prompt{std::move(system_text), std::move(user_text), {}};
  prompt.fingerprint = prompt_fingerprint(prompt.system_text, prompt.user_text);
  return prompt;
}

std::string render_template(std::string_view tmpl,
                            const std::map<std::string, std::string>& slots) {
  std::string out;
  out.reserve(tmpl.size() * 2);
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    const std::size_t open = tmpl.find("{{", pos);
    if (open == std::string_view::npos) {
      out.append(tmpl.substr(pos));
      break;
    }
    const std::size_t close = tmpl.find("}}", open + 2);
    if (close == std::string_view::npos) {
      throw Error(ErrorCode::InvalidConfig, "unterminated template slot");
    }
    out.append(tmpl.substr(pos, open - pos));
    const std::string name(tmpl.substr(open + 2, close - open - 2));
    auto it = slots.find(name);
    if (it == slots.end()) throw Error(ErrorCode::InvalidConfig, "unknown template slot " + name);
    pos = close + 2;

    const bool line_start = open == 0 || tmpl[open - 1] == '\n';
    const bool line_end = pos == tmpl.size() || tmpl[pos] == '\n';
    if (it->second.empty() && line_start && line_end) {
      if (pos < tmpl.size()) ++pos;
      continue;
    }
    out.append(it->second);
  }
  return out;
}

OrientationQuestion OrientationQuestion::in_document_order(std::string source_text, Entity first,
                                                           Entity second) {
  if (std::tie(second.first_offset, second.canonical_label) <
      std::tie(first.first_offset, first.canonical_label)) {
    std::swap(first, second);
  }
  return {std::move(source_text), std::move(first), std::move(second)};
}

std::string mention_text(const Entity& entity, std::string_view source_text) {
  std::optional<TextSpan> best;
  for (const auto& form : entity.surface_forms) {
    auto span = find_mention(source_text, form);
    if (span && (!best || span->offset < best->offset ||
                 (span->offset == best->offset && span->length > best->length))) {
      best = span;
    }
  }
  if (!best) {
    throw Error(ErrorCode::EntityNotInText,
                "'" + entity.canonical_label + "' does not occur in the source text");
  }
  std::string collapsed;
  bool space = false;
  for (char c : source_text.substr(best->offset, best->length)) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = true;
      continue;
    }
    if (space && !collapsed.empty()) collapsed.push_back(' ');
    space = false;
    collapsed.push_back(c);
  }
  return collapsed;
}

RenderedPrompt render_orientation_prompt(const OrientationQuestion& question) {
  if (question.entity_a.id == question.entity_b.id) {
    throw Error(ErrorCode::InvalidGraph, "orientation question over a single entity");
  }
  const std::map<std::string, std::string> slots = {
      {"text", question.source_text},
      {"entity_a", mention_text(question.entity_a, question.source_text)},
      {"entity_b", mention_text(question.entity_b, question.source_text)},
  };
  return RenderedPrompt::make(std::string(templates::kOrientationSystem),
                              render_template(templates::kOrientationUser, slots));
}

RenderedPrompt render_reask_prompt(const OrientationQuestion& question) {
  RenderedPrompt base = render_orientation_prompt(question);
  return RenderedPrompt::make(std::move(base.system_text),
                              base.user_text + std::string(templates::kOrientationReask));
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Forward: return "forward";
    case Verdict::Backward: return "backward";
    case Verdict::NoRelation: return "no_relation";
    case Verdict::Unparsable: return "unparsable";
  }
  return "unparsable";
}

Verdict verdict_from_string(std::string_view text) {
  if (text == "forward") return Verdict::Forward;
  if (text == "backward") return Verdict::Backward;
  if (text == "no_relation") return Verdict::NoRelation;
  if (text == "unparsable") return Verdict::Unparsable;
  throw Error(ErrorCode::ParseError, "unknown verdict '" + std::string(text) + "'");
}

ParsedVerdict parse_verdict(std::string_view raw_reply) {
  const std::size_t close = raw_reply.rfind(kAnswerClose);
  const std::size_t open =
      close == std::string_view::npos ? close : raw_reply.rfind(kAnswerOpen, close);
  if (open == std::string_view::npos) return {Verdict::Unparsable, trim(raw_reply)};

  ParsedVerdict parsed{Verdict::Unparsable, trim(raw_reply.substr(0, open))};
  const std::string answer =
      trim(raw_reply.substr(open + kAnswerOpen.size(), close - open - kAnswerOpen.size()));
  if (answer.size() == 1) {
    switch (std::toupper(static_cast<unsigned char>(answer[0]))) {
      case 'A': parsed.verdict = Verdict::Forward; break;
      case 'B': parsed.verdict = Verdict::Backward; break;
      case 'C': parsed.verdict = Verdict::NoRelation; break;
      default: break;
    }
  }
  if (parsed.verdict == Verdict::Unparsable) parsed.rationale_text = trim(raw_reply);
  return parsed;
}

RenderedPrompt render_entity_prompt(std::string_view source_text, std::string_view domain_hint) {
  if (trim(source_text).empty()) throw Error(ErrorCode::EmptyText, "no text to extract from");
  const std::string hint = trim(domain_hint);
  const std::string emphasis =
      hint.empty() ? std::string() : render_template(templates::kEntityEmphasis,
                                                     {{"domain_hint", hint}});
  return RenderedPrompt::make(
      std::string(templates::kEntitySystem),
      render_template(templates::kEntityUser,
                      {{"text", std::string(source_text)}, {"emphasis", emphasis}}));
}

EntityList parse_entity_list(std::string_view raw_reply) {
  EntityList list;
  std::map<std::string, std::size_t> index;
  std::vector<std::vector<std::size_t>> raw_groups;

  std::optional<std::size_t> open_entity;  // content start
  std::optional<std::vector<std::size_t>> group;
  for (const Tag& tag : scan_tags(raw_reply)) {
    switch (tag.kind) {
      case Tag::EntityOpen:
        open_entity = tag.position + tag.length;
        break;
      case Tag::EntityClose: {
        if (!open_entity) break;
        std::string span = normalize_label(raw_reply.substr(*open_entity, tag.position - *open_entity));
        open_entity.reset();
        if (span.empty()) break;
        auto [it, inserted] = index.emplace(span, list.entities.size());
        if (inserted) list.entities.push_back(std::move(span));
        if (group) group->push_back(it->second);
        break;
      }
      case Tag::GroupOpen:
        if (group) raw_groups.push_back(std::move(*group));
        group.emplace();
        open_entity.reset();
        break;
      case Tag::GroupClose:
        if (group) raw_groups.push_back(std::move(*group));
        group.reset();
        open_entity.reset();
        break;
    }
  }
  if (group) raw_groups.push_back(std::move(*group));
  if (list.entities.empty()) {
    throw Error(ErrorCode::NoEntitiesFound, "reply contains no <Entity> spans");
  }

  DisjointSets sets(list.entities.size());
  std::vector<bool> grouped(list.entities.size(), false);
  for (const auto& members : raw_groups) {
    for (std::size_t m : members) {
      if (m != members.front()) grouped[m] = grouped[members.front()] = true;
      sets.unite(members.front(), m);
    }
  }
  std::map<std::size_t, std::set<std::string>> clusters;  // keyed by earliest member
  for (std::size_t i = 0; i < list.entities.size(); ++i) {
    if (grouped[i]) clusters[sets.find(i)].insert(list.entities[i]);
  }
  for (auto& [root, members] : clusters) {
    if (members.size() >= 2) list.merge_groups.push_back(std::move(members));
  }
  return list;
}

}  // namespace llmcg
