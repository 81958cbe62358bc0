#include "llmcg/analysis.hpp"

#include "llmcg/error.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <string>

namespace llmcg {
namespace {

class JohnsonEnumerator {
 public:
  JohnsonEnumerator(const CausalGraph& graph, std::size_t max_cycles) : max_cycles_(max_cycles) {
    for (const auto& [id, entity] : graph.entities()) {
      index_.emplace(id, ids_.size());
      ids_.push_back(id);
    }
    adjacency_.resize(ids_.size());
    for (const auto& [key, arc] : graph.arcs()) {
      adjacency_[index_.at(key.first)].push_back(index_.at(key.second));
    }
    for (auto& successors : adjacency_) std::sort(successors.begin(), successors.end());
  }

  std::vector<Cycle> run() {
    const std::size_t n = ids_.size();
    for (start_ = 0; start_ < n; ++start_) {
      blocked_.assign(n, false);
      blocked_by_.assign(n, {});
      circuit(start_);
    }
    return std::move(cycles_);
  }

 private:
  bool circuit(std::size_t v) {
    bool found = false;
    stack_.push_back(v);
    blocked_[v] = true;
    for (std::size_t w : adjacency_[v]) {
      if (w < start_) continue;
      if (w == start_) {
        emit();
        found = true;
      } else if (!blocked_[w] && circuit(w)) {
        found = true;
      }
    }
    if (found) {
      unblock(v);
    } else {
      for (std::size_t w : adjacency_[v]) {
        if (w >= start_) blocked_by_[w].insert(v);
      }
    }
    stack_.pop_back();
    return found;
  }

  void unblock(std::size_t u) {
    blocked_[u] = false;
    auto waiting = std::move(blocked_by_[u]);
    blocked_by_[u].clear();
    for (std::size_t w : waiting) {
      if (blocked_[w]) unblock(w);
    }
  }

  void emit() {
    if (cycles_.size() >= max_cycles_) {
      throw Error(ErrorCode::CycleBudgetExceeded,
                  "more than " + std::to_string(max_cycles_) + " simple cycles");
    }
    Cycle cycle;
    cycle.reserve(stack_.size());
    for (std::size_t v : stack_) cycle.push_back(ids_[v]);
    cycles_.push_back(std::move(cycle));
  }

  std::size_t max_cycles_;
  std::vector<EntityId> ids_;
  std::map<EntityId, std::size_t> index_;
  std::vector<std::vector<std::size_t>> adjacency_;
  std::size_t start_ = 0;
  std::vector<bool> blocked_;
  std::vector<std::set<std::size_t>> blocked_by_;
  std::vector<std::size_t> stack_;
  std::vector<Cycle> cycles_;
};

std::vector<ArcKey> cycle_arcs(const Cycle& cycle) {
  std::vector<ArcKey> keys;
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    keys.emplace_back(cycle[i], cycle[(i + 1) % cycle.size()]);
  }
  return keys;
}

bool reachable_without(const CausalGraph& graph, const ArcKey& skipped) {
  std::set<EntityId> seen{skipped.first};
  std::deque<EntityId> frontier{skipped.first};
  while (!frontier.empty()) {
    EntityId node = std::move(frontier.front());
    frontier.pop_front();
    for (const EntityId& next : graph.successors(node)) {
      if (node == skipped.first && next == skipped.second) continue;
      if (next == skipped.second) return true;
      if (seen.insert(next).second) frontier.push_back(next);
    }
  }
  return false;
}

}  // namespace

CycleReport detect_cycles(const CausalGraph& graph, const CycleOptions& options) {
  CycleReport report;
  report.cycles = JohnsonEnumerator(graph, options.max_cycles).run();
  std::sort(report.cycles.begin(), report.cycles.end());
  report.is_acyclic = report.cycles.empty();
  for (const Cycle& cycle : report.cycles) {
    for (auto& key : cycle_arcs(cycle)) report.arcs_on_cycles.insert(std::move(key));
  }
  return report;
}

CycleReport annotate_cycles(CausalGraph& graph, const CycleOptions& options) {
  CycleReport report = detect_cycles(graph, options);
  std::vector<std::pair<ArcKey, ArcFlags>> updates;
  for (const auto& [key, arc] : graph.arcs()) {
    ArcFlags flags = arc.flags;
    flags.on_directed_cycle = report.arcs_on_cycles.contains(key);
    updates.emplace_back(key, flags);
  }
  for (const auto& [key, flags] : updates) graph.set_flags(key, flags);
  return report;
}

std::vector<Arc> find_transitive_candidates(const CausalGraph& graph) {
  std::vector<Arc> candidates;
  for (const auto& [key, arc] : graph.arcs()) {
    if (reachable_without(graph, key)) {
      Arc flagged = arc;
      flagged.flags.suspected_transitive = true;
      candidates.push_back(std::move(flagged));
    }
  }
  return candidates;
}

std::vector<Arc> flag_transitive_candidates(CausalGraph& graph) {
  std::vector<Arc> candidates = find_transitive_candidates(graph);
  std::set<ArcKey> flagged;
  for (const Arc& arc : candidates) flagged.insert(arc.key());
  std::vector<std::pair<ArcKey, ArcFlags>> updates;
  for (const auto& [key, arc] : graph.arcs()) {
    ArcFlags flags = arc.flags;
    flags.suspected_transitive = flagged.contains(key);
    updates.emplace_back(key, flags);
  }
  for (const auto& [key, flags] : updates) graph.set_flags(key, flags);
  return candidates;
}

AcyclicityResult enforce_acyclicity(const CausalGraph& graph, const CycleOptions& options) {
  AcyclicityResult result{graph, {}};
  for (;;) {
    const CycleReport report = detect_cycles(result.graph, options);
    if (report.is_acyclic) break;

    std::map<ArcKey, std::size_t> coverage;
    for (const Cycle& cycle : report.cycles) {
      for (auto& key : cycle_arcs(cycle)) ++coverage[key];
    }
    // Map order is lexicographic, so strict comparisons keep the smallest key on ties.
    const Arc* chosen = nullptr;
    std::size_t best = 0;
    for (const auto& [key, count] : coverage) {
      const Arc* arc = result.graph.find_arc(key);
      if (chosen == nullptr || count > best ||
          (count == best && arc->flags.suspected_transitive &&
           !chosen->flags.suspected_transitive)) {
        chosen = arc;
        best = count;
      }
    }
    Arc removed = *chosen;
    result.graph.remove_arc(removed.key());
    result.removed.push_back(std::move(removed));
  }
  if (!result.removed.empty()) annotate_cycles(result.graph, options);
  return result;
}

}  // namespace llmcg
