#pragma once

#include "llmcg/compare.hpp"
#include "llmcg/gateway.hpp"
#include "llmcg/metrics.hpp"
#include "llmcg/pipeline.hpp"
#include "llmcg/semeval.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace llmcg {

inline constexpr std::size_t kForward = 0;   // A -> B, i.e. e1 causes e2
inline constexpr std::size_t kBackward = 1;  // A <- B

/// Orientation confusion grid indexed [predicted][truth].
struct ConfusionMatrix {
  std::array<std::array<std::size_t, 2>, 2> counts{};
  std::size_t abstained = 0;   // NoRelation on a causal sentence
  std::size_t unparsable = 0;

  std::size_t grid_total() const noexcept;
  std::size_t evaluated() const noexcept { return grid_total() + abstained + unparsable; }
  bool operator==(const ConfusionMatrix&) const = default;
};

struct ClassScores {
  Rate precision;
  Rate recall;
  Rate f1;
};

struct PairwiseReport {
  ConfusionMatrix confusion;
  ClassScores forward;
  ClassScores backward;
  double macro_f1 = 0.0;  // unweighted mean of the two class F1 values
  Rate micro_accuracy;    // grid trace / grid total
  std::vector<long> misoriented_ids;
  std::vector<long> abstained_ids;
  std::vector<long> unparsable_ids;
};

/// Throws EmptyEvaluationSet when the grid is empty.
PairwiseReport compute_report(const ConfusionMatrix& confusion);

/// The orientation question for a record: e1 is entity A, e2 is entity B.
OrientationQuestion orientation_question(const SemEvalRecord& record);

/// Queries the orientation of every causal record (e1 as entity A) and
/// tallies the answers; non-causal records are skipped.
/// Throws EmptyEvaluationSet when no causal record is present.
PairwiseReport run_pairwise_eval(const std::vector<SemEvalRecord>& records, Gateway& gateway,
                                 int parallelism = 1);

nlohmann::json report_to_json(const PairwiseReport& report);
/// Reads the grid back and recomputes every metric from it.
PairwiseReport report_from_json(const nlohmann::json& document);

/// Confusion grid laid out with predictions as rows and ground truth as columns.
std::string format_confusion_table(const PairwiseReport& report);

struct GraphRunEvaluation {
  GraphComparison comparison;
  std::size_t transitive_false_positives = 0;
  Rate transitive_fp_share;  // undefined when there are no false positives
};

/// Compares an extracted graph with a GroundTruth graph and measures how many
/// false positives carry the SuspectedTransitive flag. Throws InvalidGraph
/// when `truth` is not a ground-truth graph.
GraphRunEvaluation evaluate_graph_run(const CausalGraph& extracted, const CausalGraph& truth);
GraphRunEvaluation evaluate_graph_run(const PipelineRun& run, const CausalGraph& truth);

struct GraphBatchEvaluation {
  std::vector<GraphRunEvaluation> documents;
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  PrecisionRecall pooled;  // counts summed over documents
  Rate transitive_fp_share;
};

GraphBatchEvaluation evaluate_graph_batch(
    const std::vector<std::pair<CausalGraph, CausalGraph>>& extracted_and_truth);

nlohmann::json graph_evaluation_to_json(const GraphRunEvaluation& evaluation);

}  // namespace llmcg
