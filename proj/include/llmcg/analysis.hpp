#pragma once

#include "llmcg/graph.hpp"

#include <cstddef>
#include <set>
#include <vector>

namespace llmcg {

using Cycle = std::vector<EntityId>;

struct CycleReport {
  // Simple directed cycles, each rotated to start at its smallest id,
  // sorted lexicographically.
  std::vector<Cycle> cycles;
  bool is_acyclic = true;
  std::set<ArcKey> arcs_on_cycles;
};

struct CycleOptions {
  std::size_t max_cycles = 10'000;
};

/// Enumerates all simple directed cycles (Johnson's algorithm).
/// Throws CycleBudgetExceeded once more than `max_cycles` cycles are found.
CycleReport detect_cycles(const CausalGraph& graph, const CycleOptions& options = {});

/// detect_cycles, then sets OnDirectedCycle on exactly the arcs lying on a cycle.
CycleReport annotate_cycles(CausalGraph& graph, const CycleOptions& options = {});

/// Arcs u->v for which another directed path u ~> v exists that does not use
/// the arc itself. Returned copies carry the SuspectedTransitive flag.
std::vector<Arc> find_transitive_candidates(const CausalGraph& graph);

/// find_transitive_candidates, then updates the SuspectedTransitive flag on
/// every arc. The arc set itself is never modified.
std::vector<Arc> flag_transitive_candidates(CausalGraph& graph);

struct AcyclicityResult {
  CausalGraph graph;
  std::vector<Arc> removed;  // in removal order
};

/// Greedily removes the arc lying on the most simple cycles until none remain.
/// Ties prefer SuspectedTransitive arcs, then the smallest (cause, effect).
AcyclicityResult enforce_acyclicity(const CausalGraph& graph, const CycleOptions& options = {});

}  // namespace llmcg
