#include "llmcg/compare.hpp"

#include <algorithm>
#include <iterator>

namespace llmcg {

std::set<LabelArc> label_arcs(const CausalGraph& graph) {
  std::set<LabelArc> out;
  for (const auto& [key, arc] : graph.arcs()) {
    out.emplace(graph.entity(key.first).canonical_label,
                graph.entity(key.second).canonical_label);
  }
  return out;
}

GraphComparison compare_graphs(const CausalGraph& extracted, const CausalGraph& truth) {
  const auto predicted = label_arcs(extracted);
  const auto expected = label_arcs(truth);

  GraphComparison result;
  std::set_intersection(predicted.begin(), predicted.end(), expected.begin(), expected.end(),
                        std::inserter(result.true_positive_arcs, result.true_positive_arcs.end()));
  std::set_difference(predicted.begin(), predicted.end(), expected.begin(), expected.end(),
                      std::inserter(result.false_positive_arcs, result.false_positive_arcs.end()));
  std::set_difference(expected.begin(), expected.end(), predicted.begin(), predicted.end(),
                      std::inserter(result.false_negative_arcs, result.false_negative_arcs.end()));

  const auto scores =
      PrecisionRecall::from_counts(result.true_positive_arcs.size(),
                                   result.false_positive_arcs.size(),
                                   result.false_negative_arcs.size());
  result.precision = scores.precision;
  result.recall = scores.recall;
  result.f1 = scores.f1;
  return result;
}

}  // namespace llmcg
