#pragma once

#include "llmcg/gateway.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace llmcg {

struct FixtureEntry {
  std::string reply_text;
  double latency_seconds = 0.0;

  bool operator==(const FixtureEntry&) const = default;
};

/// Recorded prompt-fingerprint -> reply mapping for offline runs.
struct ReplayFixture {
  std::map<std::string, FixtureEntry> entries;
  bool strict = true;

  bool operator==(const ReplayFixture&) const = default;
};

/// Throws DuplicateFingerprint when one fingerprint maps to two different replies.
ReplayFixture record_fixture(const std::vector<ChatExchange>& exchanges);

/// Adds `more` into `base`, with the same conflict rule as record_fixture.
void merge_fixture(ReplayFixture& base, const ReplayFixture& more);

std::string serialize_fixture(const ReplayFixture& fixture);
ReplayFixture parse_fixture(std::string_view text);
ReplayFixture load_fixture(const std::filesystem::path& path);
void save_fixture(const ReplayFixture& fixture, const std::filesystem::path& path);

/// Answers from a fixture. A miss throws FixtureMiss when strict; otherwise it
/// warns and answers with an empty reply (which parses as Unparsable).
class ReplayProvider : public ChatProvider {
 public:
  explicit ReplayProvider(ReplayFixture fixture) : fixture_(std::move(fixture)) {}

  ProviderReply send(const RenderedPrompt& prompt, const ProviderConfig& config) override;

  const ReplayFixture& fixture() const noexcept { return fixture_; }

 private:
  ReplayFixture fixture_;
};

}  // namespace llmcg
