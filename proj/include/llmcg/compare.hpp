#pragma once

#include "llmcg/graph.hpp"
#include "llmcg/metrics.hpp"

#include <set>
#include <string>
#include <utility>

namespace llmcg {

// Arc expressed by canonical labels: (cause label, effect label).
using LabelArc = std::pair<std::string, std::string>;

struct GraphComparison {
  std::set<LabelArc> true_positive_arcs;
  std::set<LabelArc> false_positive_arcs;   // in extracted, not in truth
  std::set<LabelArc> false_negative_arcs;   // in truth, not in extracted
  Rate precision;
  Rate recall;
  Rate f1;
};

std::set<LabelArc> label_arcs(const CausalGraph& graph);

/// Compares arcs of two graphs matched by canonical label.
GraphComparison compare_graphs(const CausalGraph& extracted, const CausalGraph& truth);

}  // namespace llmcg
