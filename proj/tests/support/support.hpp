#pragma once

#include "llmcg/analysis.hpp"
#include "llmcg/gateway.hpp"
#include "llmcg/graph.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <unistd.h>

namespace llmcg::testing {

inline std::filesystem::path fixture_dir() { return LLMCG_FIXTURE_DIR; }
inline std::filesystem::path test_data_dir() { return LLMCG_TEST_DATA_DIR; }

// Unique scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("llmcg-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string node_id(std::size_t i) {
  return "n" + std::string(i < 10 ? "0" : "") + std::to_string(i);
}

// Graph over nodes n00..n{count-1} labelled "node i".
inline CausalGraph make_graph(std::size_t count,
                              const std::vector<std::pair<std::size_t, std::size_t>>& arcs,
                              GraphKind kind = GraphKind::Extracted) {
  CausalGraph graph(kind);
  for (std::size_t i = 0; i < count; ++i) {
    graph.add_entity(Entity::make(EntityId(node_id(i)), "node " + std::to_string(i), i));
  }
  for (const auto& [cause, effect] : arcs) {
    graph.add_arc({EntityId(node_id(cause)), EntityId(node_id(effect)),
                   kind == GraphKind::GroundTruth ? Provenance::GroundTruthAnnotation
                                                  : Provenance::Imported,
                   std::nullopt, {}});
  }
  return graph;
}

// Random simple digraph: no self loops, at most one direction per pair.
inline std::vector<std::pair<std::size_t, std::size_t>> random_arcs(std::mt19937& rng,
                                                                    std::size_t nodes,
                                                                    double density) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<std::pair<std::size_t, std::size_t>> arcs;
  for (std::size_t i = 0; i < nodes; ++i) {
    for (std::size_t j = i + 1; j < nodes; ++j) {
      if (coin(rng) >= density) continue;
      if (coin(rng) < 0.5) {
        arcs.emplace_back(i, j);
      } else {
        arcs.emplace_back(j, i);
      }
    }
  }
  return arcs;
}

// Random graph over a random subset of a shared label pool; ids differ
// between graphs so matching has to go through labels.
inline std::pair<CausalGraph, std::vector<std::pair<std::string, std::string>>>
random_labelled_graph(std::mt19937& rng, GraphKind kind, const std::string& prefix) {
  std::uniform_int_distribution<int> size(0, 12);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<int> pool(14);
  for (int i = 0; i < 14; ++i) pool[i] = i;
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(size(rng));
  CausalGraph graph(kind);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    graph.add_entity(Entity::make(EntityId(prefix + std::to_string(i)),
                                  "label " + std::to_string(pool[i])));
  }
  std::vector<std::pair<std::string, std::string>> arcs;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    for (std::size_t j = 0; j < pool.size(); ++j) {
      if (i == j || coin(rng) > 0.2) continue;
      if (graph.has_arc(EntityId(prefix + std::to_string(j)), EntityId(prefix + std::to_string(i)))) {
        continue;
      }
      const Provenance provenance =
          kind == GraphKind::GroundTruth ? Provenance::GroundTruthAnnotation : Provenance::Imported;
      if (graph.add_arc({EntityId(prefix + std::to_string(i)), EntityId(prefix + std::to_string(j)),
                         provenance, std::nullopt, {}})) {
        arcs.emplace_back("label " + std::to_string(pool[i]), "label " + std::to_string(pool[j]));
      }
    }
  }
  return {graph, arcs};
}

// Answers prompts with a function of the prompt; counts calls.
class ScriptedProvider : public ChatProvider {
 public:
  using Script = std::function<std::string(const RenderedPrompt&)>;

  explicit ScriptedProvider(Script script, double latency = 0.0)
      : script_(std::move(script)), latency_(latency) {}

  ProviderReply send(const RenderedPrompt& prompt, const ProviderConfig&) override {
    {
      std::lock_guard lock(mutex_);
      ++calls_;
      seen_.push_back(prompt);
    }
    return {script_(prompt), latency_, ExchangeSource::Live, 0};
  }

  std::size_t calls() const {
    std::lock_guard lock(mutex_);
    return calls_;
  }
  std::vector<RenderedPrompt> seen() const {
    std::lock_guard lock(mutex_);
    return seen_;
  }

 private:
  Script script_;
  double latency_;
  mutable std::mutex mutex_;
  std::size_t calls_ = 0;
  std::vector<RenderedPrompt> seen_;
};

}  // namespace llmcg::testing
