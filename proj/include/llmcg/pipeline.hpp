#pragma once

#include "llmcg/analysis.hpp"
#include "llmcg/error.hpp"
#include "llmcg/gateway.hpp"
#include "llmcg/graph.hpp"
#include "llmcg/prompt.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace llmcg {

struct PipelineConfig {
  std::size_t entity_cap = 20;
  bool enforce_acyclic = false;
  int parallelism = 1;
  CycleOptions cycles;
  double time_budget_seconds = 30.0 * 60.0;
};

struct EntityExtraction {
  std::vector<Entity> entities;  // document order, ids e01, e02, ...
  std::vector<std::string> warnings;
  ChatExchange exchange;
};

/// Asks the model for entities, merges synonym groups (the member mentioned
/// earliest in the text becomes canonical), orders by first mention and
/// truncates to `entity_cap`. Entities never mentioned in the text are dropped.
EntityExtraction extract_entities(std::string_view source_text, std::string_view domain_hint,
                                  Gateway& gateway, std::size_t entity_cap = 20);

/// Every unordered pair once, entity_a before entity_b in document order,
/// sorted by (offset_a, offset_b). Throws TooFewEntities.
std::vector<OrientationQuestion> enumerate_pairs(std::string_view source_text,
                                                 std::vector<Entity> entities);

struct OrientationOutcome {
  ParsedVerdict verdict;
  std::vector<ChatExchange> exchanges;  // the first ask, plus the re-ask if any

  bool reasked() const noexcept { return exchanges.size() > 1; }
  const std::string& source_exchange() const { return exchanges.back().prompt.fingerprint; }
};

/// One orientation query; an unparsable reply gets exactly one re-ask.
OrientationOutcome query_orientation(const OrientationQuestion& question, Gateway& gateway);

// (entity_a, entity_b) in document order.
using PairKey = std::pair<EntityId, EntityId>;

struct PairVerdict {
  ParsedVerdict parsed;
  std::string source_exchange;
  bool reasked = false;
};

/// One LLMVerdict arc per Forward/Backward verdict.
CausalGraph build_graph(const std::vector<Entity>& entities,
                        const std::map<PairKey, PairVerdict>& verdicts);

struct RunStats {
  std::size_t query_count = 0;       // orientation questions
  std::size_t orientation_calls = 0; // questions plus re-asks
  std::size_t reask_count = 0;
  std::size_t forward_count = 0;
  std::size_t backward_count = 0;
  std::size_t abstention_count = 0;  // NoRelation
  std::size_t unparsable_count = 0;
  double mean_latency = 0.0;
  double stdev_latency = 0.0;  // sample standard deviation
  double entity_latency = 0.0;
  int parallelism = 1;
  double projected_wall_seconds = 0.0;
  double time_budget_seconds = 0.0;
  bool within_time_budget = true;
};

/// Wall time for `calls` queries of `mean_latency` seconds run `parallelism` at a time.
double projected_wall_seconds(std::size_t calls, double mean_latency, int parallelism);

enum class PipelineStage {
  None,
  EntityExtraction,
  PairEnumeration,
  OrientationQueries,
  GraphAssembly,
  CycleAnalysis,
  TransitiveAnalysis,
  AcyclicityEnforcement,
};

std::string_view to_string(PipelineStage stage);

struct PipelineRun {
  std::string source_text;
  std::vector<Entity> entities;
  std::map<PairKey, PairVerdict> verdicts;
  CausalGraph graph{GraphKind::Extracted};
  CycleReport cycles;
  std::vector<Arc> transitive_candidates;
  std::vector<Arc> removed_arcs;
  RunStats stats;
  std::vector<std::string> warnings;
  PipelineStage completed_stage = PipelineStage::None;
};

/// Raised when a stage fails; carries the run up to the last completed stage.
class PipelineError : public Error {
 public:
  PipelineError(PipelineRun partial, ErrorCode cause, const std::string& message);

  const PipelineRun& partial() const noexcept { return partial_; }
  ErrorCode cause() const noexcept { return cause_; }

 private:
  PipelineRun partial_;
  ErrorCode cause_;
};

/// entities -> all pairs -> orientation queries (up to `parallelism` at once,
/// merged in pair order) -> graph -> cycles -> transitive flags, then
/// acyclicity enforcement when configured.
PipelineRun run_pipeline(std::string_view source_text, std::string_view domain_hint,
                         const PipelineConfig& config, Gateway& gateway);

struct PartiallyDirectedGraph {
  std::vector<Entity> entities;
  std::vector<ArcKey> directed_arcs;
  std::vector<std::pair<EntityId, EntityId>> undirected_edges;

  /// Throws InvalidGraph when endpoints are unknown or a pair is both
  /// directed and undirected.
  void validate() const;
};

/// StructuredGraphFile with an extra `undirected` list of [id, id] pairs.
PartiallyDirectedGraph parse_pdag(std::string_view text);

struct CpdagOrientation {
  CausalGraph graph{GraphKind::Extracted};
  std::size_t query_count = 0;
  std::vector<std::string> warnings;
};

/// Orients the undirected edges of a partially directed graph from text.
/// Directed arcs pass through as Imported; edges answered C (or unparsable)
/// are dropped with a warning.
CpdagOrientation orient_cpdag(const PartiallyDirectedGraph& pdag, std::string_view source_text,
                              Gateway& gateway, int parallelism = 1);

nlohmann::json cycle_report_to_json(const CycleReport& report);
nlohmann::json run_to_json(const PipelineRun& run);
nlohmann::json analysis_to_json(const PipelineRun& run);

}  // namespace llmcg
