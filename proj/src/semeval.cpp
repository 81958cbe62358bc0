#include "llmcg/semeval.hpp"

#include "llmcg/error.hpp"
#include "llmcg/text.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <sstream>

namespace llmcg {
namespace {

constexpr std::string_view kCauseEffect = "Cause-Effect";

struct Line {
  std::size_t number;
  std::string_view text;
};

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> lines;
  std::size_t start = 0;
  std::size_t number = 1;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back({number++, line});
    start = end + 1;
  }
  return lines;
}

[[noreturn]] void fail(std::size_t line, const std::string& reason) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + reason);
}

std::size_t find_once(std::string_view text, std::string_view tag, std::size_t line) {
  const std::size_t pos = text.find(tag);
  if (pos == std::string_view::npos) fail(line, "missing " + std::string(tag));
  if (text.find(tag, pos + 1) != std::string_view::npos) {
    fail(line, "more than one " + std::string(tag));
  }
  return pos;
}

void parse_sentence(std::string_view quoted, std::size_t line, SemEvalRecord& record) {
  if (quoted.size() < 2 || quoted.front() != '"' || quoted.back() != '"') {
    fail(line, "sentence is not double-quoted");
  }
  const std::string_view body = quoted.substr(1, quoted.size() - 2);
  struct Tag {
    std::size_t pos;
    std::string_view literal;
  };
  std::vector<Tag> tags = {{find_once(body, "<e1>", line), "<e1>"},
                           {find_once(body, "</e1>", line), "</e1>"},
                           {find_once(body, "<e2>", line), "<e2>"},
                           {find_once(body, "</e2>", line), "</e2>"}};
  if (tags[0].pos > tags[1].pos) fail(line, "</e1> precedes <e1>");
  if (tags[2].pos > tags[3].pos) fail(line, "</e2> precedes <e2>");
  if (!(tags[1].pos < tags[2].pos || tags[3].pos < tags[0].pos)) {
    fail(line, "entity spans overlap");
  }
  std::sort(tags.begin(), tags.end(), [](const Tag& a, const Tag& b) { return a.pos < b.pos; });

  std::string plain;
  std::size_t cursor = 0;
  for (const Tag& tag : tags) {
    plain.append(body.substr(cursor, tag.pos - cursor));
    if (tag.literal == "<e1>") record.e1_offset = plain.size();
    if (tag.literal == "<e2>") record.e2_offset = plain.size();
    if (tag.literal == "</e1>") record.e1_span = plain.substr(record.e1_offset);
    if (tag.literal == "</e2>") record.e2_span = plain.substr(record.e2_offset);
    cursor = tag.pos + tag.literal.size();
  }
  plain.append(body.substr(cursor));
  if (record.e1_span.empty() || record.e2_span.empty()) fail(line, "empty entity span");
  record.sentence = std::move(plain);
}

}  // namespace

std::optional<CausalOrientation> causal_orientation_of(std::string_view relation_label) {
  if (relation_label == "Cause-Effect(e1,e2)") return CausalOrientation::E1CausesE2;
  if (relation_label == "Cause-Effect(e2,e1)") return CausalOrientation::E2CausesE1;
  if (relation_label.starts_with(kCauseEffect)) {
    throw Error(ErrorCode::ParseError,
                "malformed cause-effect label '" + std::string(relation_label) + "'");
  }
  return std::nullopt;
}

std::vector<SemEvalRecord> parse_semeval(std::string_view file_text) {
  const std::vector<Line> lines = split_lines(file_text);
  std::vector<SemEvalRecord> records;
  std::set<long> seen;
  std::size_t i = 0;
  while (i < lines.size()) {
    if (trim(lines[i].text).empty()) {
      ++i;
      continue;
    }
    SemEvalRecord record;
    const Line& head = lines[i];
    const std::size_t tab = head.text.find('\t');
    if (tab == std::string_view::npos) fail(head.number, "expected <id>TAB<sentence>");
    const std::string id_text(head.text.substr(0, tab));
    char* end = nullptr;
    record.record_id = std::strtol(id_text.c_str(), &end, 10);
    if (id_text.empty() || end == nullptr || *end != '\0') {
      fail(head.number, "record id '" + id_text + "' is not an integer");
    }
    if (!seen.insert(record.record_id).second) {
      fail(head.number, "duplicate record id " + id_text);
    }
    parse_sentence(head.text.substr(tab + 1), head.number, record);

    if (++i >= lines.size() || trim(lines[i].text).empty()) {
      fail(head.number + 1, "missing relation label");
    }
    record.relation_label = trim(lines[i].text);
    try {
      record.causal_orientation = causal_orientation_of(record.relation_label);
    } catch (const Error& e) {
      fail(lines[i].number, e.what());
    }
    ++i;
    if (i < lines.size() && lines[i].text.starts_with("Comment:")) {
      record.comment = std::string(lines[i].text.substr(8));
      ++i;
    }
    if (i < lines.size() && !trim(lines[i].text).empty()) {
      fail(lines[i].number, "expected a blank line after record " + id_text);
    }
    records.push_back(std::move(record));
  }
  return records;
}

std::string write_semeval(const std::vector<SemEvalRecord>& records) {
  std::ostringstream out;
  for (const SemEvalRecord& r : records) {
    struct Insert {
      std::size_t pos;
      int order;
      std::string_view tag;
    };
    // Closing tags sort before opening tags at the same offset.
    std::vector<Insert> inserts = {{r.e1_offset, 1, "<e1>"},
                                   {r.e1_offset + r.e1_span.size(), 0, "</e1>"},
                                   {r.e2_offset, 1, "<e2>"},
                                   {r.e2_offset + r.e2_span.size(), 0, "</e2>"}};
    std::sort(inserts.begin(), inserts.end(), [](const Insert& a, const Insert& b) {
      return std::tie(a.pos, a.order) < std::tie(b.pos, b.order);
    });
    std::string tagged;
    std::size_t cursor = 0;
    for (const Insert& insert : inserts) {
      tagged.append(r.sentence, cursor, insert.pos - cursor);
      tagged.append(insert.tag);
      cursor = insert.pos;
    }
    tagged.append(r.sentence, cursor, std::string::npos);

    out << r.record_id << "\t\"" << tagged << "\"\n" << r.relation_label << '\n';
    if (r.comment) out << "Comment:" << *r.comment << '\n';
    out << '\n';
  }
  return out.str();
}

}  // namespace llmcg
