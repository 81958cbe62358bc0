#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace llmcg {

enum class CausalOrientation { E1CausesE2, E2CausesE1 };

/// One SemEval-2010 Task 8 style block. `sentence` has the <e1>/<e2> tags
/// removed; the offsets locate the spans inside it.
struct SemEvalRecord {
  long record_id = 0;
  std::string sentence;
  std::string e1_span;
  std::size_t e1_offset = 0;
  std::string e2_span;
  std::size_t e2_offset = 0;
  std::string relation_label;
  std::optional<CausalOrientation> causal_orientation;
  std::optional<std::string> comment;  // text after "Comment:", verbatim

  bool operator==(const SemEvalRecord&) const = default;
};

/// Parses blocks of
///   <id>\t"<sentence with one <e1>..</e1> and one <e2>..</e2>>"
///   <relation label>
///   [Comment:<text>]
///   <blank line>
/// LF and CRLF line endings are accepted. Throws ParseError naming the line.
std::vector<SemEvalRecord> parse_semeval(std::string_view file_text);

/// Inverse of parse_semeval (LF endings).
std::string write_semeval(const std::vector<SemEvalRecord>& records);

/// `relation_label` -> orientation for the two Cause-Effect labels, nullopt
/// for any other relation. Throws ParseError on a malformed Cause-Effect label.
std::optional<CausalOrientation> causal_orientation_of(std::string_view relation_label);

}  // namespace llmcg
