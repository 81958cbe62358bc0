#include "llmcg/fixture.hpp"

#include "llmcg/error.hpp"
#include "llmcg/log.hpp"
#include "llmcg/text.hpp"

#include <nlohmann/json.hpp>

namespace llmcg {
namespace {

using nlohmann::json;

constexpr std::string_view kFormatTag = "llmcg.replay";

void insert_entry(ReplayFixture& fixture, const std::string& fingerprint, FixtureEntry entry) {
  auto [it, inserted] = fixture.entries.emplace(fingerprint, entry);
  if (!inserted && it->second.reply_text != entry.reply_text) {
    throw Error(ErrorCode::DuplicateFingerprint,
                "fingerprint " + fingerprint + " recorded with two different replies");
  }
}

}  // namespace

ReplayFixture record_fixture(const std::vector<ChatExchange>& exchanges) {
  ReplayFixture fixture;
  for (const ChatExchange& exchange : exchanges) {
    insert_entry(fixture, exchange.prompt.fingerprint,
                 {exchange.reply_text, exchange.latency_seconds});
  }
  return fixture;
}

void merge_fixture(ReplayFixture& base, const ReplayFixture& more) {
  for (const auto& [fingerprint, entry] : more.entries) insert_entry(base, fingerprint, entry);
}

std::string serialize_fixture(const ReplayFixture& fixture) {
  json entries = json::array();
  for (const auto& [fingerprint, entry] : fixture.entries) {
    entries.push_back({{"fingerprint", fingerprint},
                       {"reply_text", entry.reply_text},
                       {"latency_seconds", entry.latency_seconds}});
  }
  const json document = {{"format", kFormatTag},
                         {"version", 1},
                         {"strict", fixture.strict},
                         {"entries", std::move(entries)}};
  return document.dump(2) + "\n";
}

ReplayFixture parse_fixture(std::string_view text) {
  ReplayFixture fixture;
  try {
    const json document = json::parse(text);
    if (document.contains("format") && document.at("format") != kFormatTag) {
      throw Error(ErrorCode::ParseError, "not a replay fixture");
    }
    fixture.strict = document.value("strict", true);
    for (const json& item : document.at("entries")) {
      const auto fingerprint = item.at("fingerprint").get<std::string>();
      FixtureEntry entry{item.at("reply_text").get<std::string>(),
                         item.value("latency_seconds", 0.0)};
      if (fixture.entries.contains(fingerprint)) {
        throw Error(ErrorCode::DuplicateFingerprint, "fingerprint " + fingerprint + " repeated");
      }
      fixture.entries.emplace(fingerprint, std::move(entry));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("replay fixture: ") + e.what());
  }
  return fixture;
}

ReplayFixture load_fixture(const std::filesystem::path& path) {
  return parse_fixture(read_file(path));
}

void save_fixture(const ReplayFixture& fixture, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  write_file_atomic(path, serialize_fixture(fixture));
}

ProviderReply ReplayProvider::send(const RenderedPrompt& prompt, const ProviderConfig&) {
  auto it = fixture_.entries.find(prompt.fingerprint);
  if (it == fixture_.entries.end()) {
    if (fixture_.strict) {
      throw Error(ErrorCode::FixtureMiss, "no recorded reply for prompt " + prompt.fingerprint);
    }
    warn("FixtureMiss: no recorded reply for prompt " + prompt.fingerprint +
         "; answering with an empty reply");
    return {"", 0.0, ExchangeSource::Replay, 0};
  }
  return {it->second.reply_text, it->second.latency_seconds, ExchangeSource::Replay, 0};
}

}  // namespace llmcg
