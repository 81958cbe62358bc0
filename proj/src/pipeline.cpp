#include "llmcg/pipeline.hpp"

#include "llmcg/graph_io.hpp"
#include "llmcg/log.hpp"
#include "llmcg/parallel.hpp"
#include "llmcg/text.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <tuple>

namespace llmcg {
namespace {

using nlohmann::json;

std::optional<std::size_t> earliest_offset(std::string_view text,
                                           const std::set<std::string>& forms) {
  std::optional<std::size_t> best;
  for (const auto& form : forms) {
    if (auto span = find_mention(text, form); span && (!best || span->offset < *best)) {
      best = span->offset;
    }
  }
  return best;
}

bool document_order(const Entity& a, const Entity& b) {
  return std::tie(a.first_offset, a.canonical_label, a.id) <
         std::tie(b.first_offset, b.canonical_label, b.id);
}

std::string entity_id_for(std::size_t index, std::size_t total) {
  const std::size_t width = std::max<std::size_t>(2, std::to_string(total).size());
  std::string digits = std::to_string(index + 1);
  return "e" + std::string(width - digits.size(), '0') + digits;
}

void record_warning(std::vector<std::string>& sink, std::string message) {
  warn(message);
  sink.push_back(std::move(message));
}

json entity_to_json(const Entity& entity) {
  return {{"id", entity.id.str()},
          {"canonical_label", entity.canonical_label},
          {"surface_forms", entity.surface_forms},
          {"first_offset", entity.first_offset}};
}

json arcs_to_json(const std::vector<Arc>& arcs) {
  json out = json::array();
  for (const Arc& arc : arcs) out.push_back({arc.cause.str(), arc.effect.str()});
  return out;
}

}  // namespace

EntityExtraction extract_entities(std::string_view source_text, std::string_view domain_hint,
                                  Gateway& gateway, std::size_t entity_cap) {
  const RenderedPrompt prompt = render_entity_prompt(source_text, domain_hint);
  EntityExtraction result;
  result.exchange = gateway.cached_complete(prompt);
  const EntityList list = parse_entity_list(result.exchange.reply_text);

  // Each cluster becomes one entity: synonym groups first, then the rest.
  std::vector<std::set<std::string>> clusters = list.merge_groups;
  std::set<std::string> grouped;
  for (const auto& group : clusters) grouped.insert(group.begin(), group.end());
  for (const auto& span : list.entities) {
    if (!grouped.contains(span)) clusters.push_back({span});
  }

  std::vector<Entity> entities;
  for (const auto& cluster : clusters) {
    std::optional<std::pair<std::size_t, std::string>> canonical;
    for (const auto& form : cluster) {
      auto span = find_mention(source_text, form);
      if (span && (!canonical || span->offset < canonical->first)) {
        canonical.emplace(span->offset, form);
      }
    }
    if (!canonical) {
      record_warning(result.warnings,
                     "dropping entity '" + *cluster.begin() + "': not mentioned in the text");
      continue;
    }
    Entity entity;
    entity.canonical_label = canonical->second;
    entity.surface_forms = cluster;
    entity.first_offset = canonical->first;
    entities.push_back(std::move(entity));
  }
  std::sort(entities.begin(), entities.end(), document_order);

  if (entities.size() > entity_cap) {
    record_warning(result.warnings, "truncating " + std::to_string(entities.size()) +
                                        " entities to the cap of " + std::to_string(entity_cap));
    entities.resize(entity_cap);
  }
  for (std::size_t i = 0; i < entities.size(); ++i) {
    entities[i].id = EntityId(entity_id_for(i, entities.size()));
    validate_entity(entities[i]);
  }
  if (entities.empty()) {
    throw Error(ErrorCode::NoEntitiesFound, "no extracted entity is mentioned in the text");
  }
  result.entities = std::move(entities);
  return result;
}

std::vector<OrientationQuestion> enumerate_pairs(std::string_view source_text,
                                                 std::vector<Entity> entities) {
  if (entities.size() < 2) {
    throw Error(ErrorCode::TooFewEntities,
                "need at least 2 entities, got " + std::to_string(entities.size()));
  }
  std::sort(entities.begin(), entities.end(), document_order);
  std::vector<OrientationQuestion> questions;
  questions.reserve(entities.size() * (entities.size() - 1) / 2);
  for (std::size_t i = 0; i < entities.size(); ++i) {
    for (std::size_t j = i + 1; j < entities.size(); ++j) {
      questions.push_back({std::string(source_text), entities[i], entities[j]});
    }
  }
  return questions;
}

OrientationOutcome query_orientation(const OrientationQuestion& question, Gateway& gateway) {
  OrientationOutcome outcome;
  outcome.exchanges.push_back(gateway.cached_complete(render_orientation_prompt(question)));
  outcome.verdict = parse_verdict(outcome.exchanges.back().reply_text);
  if (outcome.verdict.verdict == Verdict::Unparsable) {
    outcome.exchanges.push_back(gateway.cached_complete(render_reask_prompt(question)));
    outcome.verdict = parse_verdict(outcome.exchanges.back().reply_text);
  }
  return outcome;
}

CausalGraph build_graph(const std::vector<Entity>& entities,
                        const std::map<PairKey, PairVerdict>& verdicts) {
  CausalGraph graph(GraphKind::Extracted);
  for (const Entity& entity : entities) graph.add_entity(entity);
  for (const auto& [pair, verdict] : verdicts) {
    Arc arc;
    arc.provenance = Provenance::LLMVerdict;
    arc.source_exchange = verdict.source_exchange;
    if (verdict.parsed.verdict == Verdict::Forward) {
      arc.cause = pair.first;
      arc.effect = pair.second;
    } else if (verdict.parsed.verdict == Verdict::Backward) {
      arc.cause = pair.second;
      arc.effect = pair.first;
    } else {
      continue;
    }
    graph.add_arc(std::move(arc));
  }
  return graph;
}

double projected_wall_seconds(std::size_t calls, double mean_latency, int parallelism) {
  const auto lanes = static_cast<std::size_t>(std::max(1, parallelism));
  const std::size_t rounds = (calls + lanes - 1) / lanes;
  return static_cast<double>(rounds) * mean_latency;
}

std::string_view to_string(PipelineStage stage) {
  switch (stage) {
    case PipelineStage::None: return "none";
    case PipelineStage::EntityExtraction: return "entity_extraction";
    case PipelineStage::PairEnumeration: return "pair_enumeration";
    case PipelineStage::OrientationQueries: return "orientation_queries";
    case PipelineStage::GraphAssembly: return "graph_assembly";
    case PipelineStage::CycleAnalysis: return "cycle_analysis";
    case PipelineStage::TransitiveAnalysis: return "transitive_analysis";
    case PipelineStage::AcyclicityEnforcement: return "acyclicity_enforcement";
  }
  return "none";
}

PipelineError::PipelineError(PipelineRun partial, ErrorCode cause, const std::string& message)
    : Error(ErrorCode::PipelineFailed,
            message + " (last completed stage: " + std::string(to_string(partial.completed_stage)) +
                ")"),
      partial_(std::move(partial)),
      cause_(cause) {}

PipelineRun run_pipeline(std::string_view source_text, std::string_view domain_hint,
                         const PipelineConfig& config, Gateway& gateway) {
  PipelineRun run;
  run.source_text = std::string(source_text);
  run.stats.parallelism = config.parallelism;
  run.stats.time_budget_seconds = config.time_budget_seconds;

  auto stage = [&](PipelineStage next, auto&& body) {
    try {
      body();
    } catch (const PipelineError&) {
      throw;
    } catch (const Error& e) {
      throw PipelineError(std::move(run), e.code(),
                          std::string(to_string(next)) + " failed: " + e.what());
    }
    run.completed_stage = next;
  };

  stage(PipelineStage::EntityExtraction, [&] {
    EntityExtraction extraction =
        extract_entities(source_text, domain_hint, gateway, config.entity_cap);
    run.entities = std::move(extraction.entities);
    run.warnings = std::move(extraction.warnings);
    run.stats.entity_latency = extraction.exchange.latency_seconds;
  });

  std::vector<OrientationQuestion> questions;
  stage(PipelineStage::PairEnumeration,
        [&] { questions = enumerate_pairs(source_text, run.entities); });

  std::vector<std::optional<OrientationOutcome>> outcomes(questions.size());
  stage(PipelineStage::OrientationQueries, [&] {
    try {
      parallel_for(questions.size(), config.parallelism,
                   [&](std::size_t i) { outcomes[i] = query_orientation(questions[i], gateway); });
    } catch (const Error&) {
      // Keep whatever finished so the partial report lists it.
      for (std::size_t i = 0; i < questions.size(); ++i) {
        if (!outcomes[i]) continue;
        run.verdicts[{questions[i].entity_a.id, questions[i].entity_b.id}] = {
            outcomes[i]->verdict, outcomes[i]->source_exchange(), outcomes[i]->reasked()};
      }
      throw;
    }

    std::vector<double> latencies;
    for (std::size_t i = 0; i < questions.size(); ++i) {
      const OrientationOutcome& outcome = *outcomes[i];
      run.verdicts[{questions[i].entity_a.id, questions[i].entity_b.id}] = {
          outcome.verdict, outcome.source_exchange(), outcome.reasked()};
      for (const ChatExchange& exchange : outcome.exchanges) {
        latencies.push_back(exchange.latency_seconds);
      }
      if (outcome.reasked()) ++run.stats.reask_count;
      switch (outcome.verdict.verdict) {
        case Verdict::Forward: ++run.stats.forward_count; break;
        case Verdict::Backward: ++run.stats.backward_count; break;
        case Verdict::NoRelation: ++run.stats.abstention_count; break;
        case Verdict::Unparsable:
          ++run.stats.unparsable_count;
          record_warning(run.warnings, "unparsable verdict for (" + questions[i].entity_a.id.str() +
                                           ", " + questions[i].entity_b.id.str() + ")");
          break;
      }
    }
    run.stats.query_count = questions.size();
    run.stats.orientation_calls = latencies.size();
    if (!latencies.empty()) {
      double sum = 0.0;
      for (double latency : latencies) sum += latency;
      run.stats.mean_latency = sum / static_cast<double>(latencies.size());
      if (latencies.size() > 1) {
        double squares = 0.0;
        for (double latency : latencies) {
          squares += (latency - run.stats.mean_latency) * (latency - run.stats.mean_latency);
        }
        run.stats.stdev_latency = std::sqrt(squares / static_cast<double>(latencies.size() - 1));
      }
    }
    run.stats.projected_wall_seconds = run.stats.entity_latency +
        projected_wall_seconds(run.stats.orientation_calls, run.stats.mean_latency,
                               config.parallelism);
    run.stats.within_time_budget =
        run.stats.projected_wall_seconds <= config.time_budget_seconds;
  });

  stage(PipelineStage::GraphAssembly, [&] { run.graph = build_graph(run.entities, run.verdicts); });
  stage(PipelineStage::CycleAnalysis,
        [&] { run.cycles = annotate_cycles(run.graph, config.cycles); });
  stage(PipelineStage::TransitiveAnalysis,
        [&] { run.transitive_candidates = flag_transitive_candidates(run.graph); });

  if (config.enforce_acyclic) {
    stage(PipelineStage::AcyclicityEnforcement, [&] {
      AcyclicityResult result = enforce_acyclicity(run.graph, config.cycles);
      run.graph = std::move(result.graph);
      run.removed_arcs = std::move(result.removed);
      if (!run.removed_arcs.empty()) {
        record_warning(run.warnings, "removed " + std::to_string(run.removed_arcs.size()) +
                                         " arcs to break directed cycles");
      }
    });
  }
  return run;
}

void PartiallyDirectedGraph::validate() const {
  std::set<EntityId> ids;
  for (const Entity& entity : entities) {
    validate_entity(entity);
    if (!ids.insert(entity.id).second) {
      throw Error(ErrorCode::InvalidGraph, "duplicate entity id " + entity.id.str());
    }
  }
  std::set<std::pair<EntityId, EntityId>> pairs;
  auto unordered = [](const EntityId& a, const EntityId& b) {
    return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
  };
  auto check = [&](const EntityId& a, const EntityId& b) {
    if (!ids.contains(a)) throw Error(ErrorCode::UnknownEntity, a.str());
    if (!ids.contains(b)) throw Error(ErrorCode::UnknownEntity, b.str());
    if (a == b) throw Error(ErrorCode::SelfLoop, a.str());
    if (!pairs.insert(unordered(a, b)).second) {
      throw Error(ErrorCode::InvalidGraph,
                  "pair (" + a.str() + ", " + b.str() + ") listed more than once");
    }
  };
  for (const auto& [cause, effect] : directed_arcs) check(cause, effect);
  for (const auto& [a, b] : undirected_edges) check(a, b);
}

PartiallyDirectedGraph parse_pdag(std::string_view text) {
  json document;
  try {
    document = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string("pdag file: ") + e.what());
  }
  json directed_part = document;
  directed_part.erase("undirected");
  const CausalGraph directed = graph_from_json(directed_part);

  PartiallyDirectedGraph pdag;
  for (const auto& [id, entity] : directed.entities()) pdag.entities.push_back(entity);
  for (const auto& [key, arc] : directed.arcs()) pdag.directed_arcs.push_back(key);
  if (document.contains("undirected")) {
    try {
      for (const json& edge : document.at("undirected")) {
        const auto ends = edge.get<std::vector<std::string>>();
        if (ends.size() != 2) throw Error(ErrorCode::ParseError, "undirected edge needs 2 ids");
        pdag.undirected_edges.emplace_back(EntityId(ends[0]), EntityId(ends[1]));
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ParseError, std::string("undirected edges: ") + e.what());
    }
  }
  pdag.validate();
  return pdag;
}

CpdagOrientation orient_cpdag(const PartiallyDirectedGraph& pdag, std::string_view source_text,
                              Gateway& gateway, int parallelism) {
  pdag.validate();
  CpdagOrientation result;
  std::map<EntityId, const Entity*> by_id;
  for (const Entity& entity : pdag.entities) {
    result.graph.add_entity(entity);
    by_id.emplace(entity.id, &entity);
  }
  for (const auto& [cause, effect] : pdag.directed_arcs) {
    result.graph.add_arc({cause, effect, Provenance::Imported, std::nullopt, {}});
  }

  auto located = [&](const EntityId& id) {
    Entity entity = *by_id.at(id);
    auto offset = earliest_offset(source_text, entity.surface_forms);
    if (!offset) {
      throw Error(ErrorCode::EntityNotInText,
                  "'" + entity.canonical_label + "' does not occur in the source text");
    }
    entity.first_offset = *offset;
    return entity;
  };
  std::vector<OrientationQuestion> questions;
  for (const auto& [a, b] : pdag.undirected_edges) {
    questions.push_back(
        OrientationQuestion::in_document_order(std::string(source_text), located(a), located(b)));
  }

  std::vector<OrientationOutcome> outcomes(questions.size());
  parallel_for(questions.size(), parallelism,
               [&](std::size_t i) { outcomes[i] = query_orientation(questions[i], gateway); });
  result.query_count = questions.size();

  for (std::size_t i = 0; i < questions.size(); ++i) {
    const EntityId& a = questions[i].entity_a.id;
    const EntityId& b = questions[i].entity_b.id;
    const Verdict verdict = outcomes[i].verdict.verdict;
    if (verdict == Verdict::Forward || verdict == Verdict::Backward) {
      const bool forward = verdict == Verdict::Forward;
      result.graph.add_arc({forward ? a : b, forward ? b : a, Provenance::LLMVerdict,
                            outcomes[i].source_exchange(), {}});
    } else {
      record_warning(result.warnings,
                     "dropping undirected edge (" + a.str() + ", " + b.str() + "): verdict " +
                         std::string(to_string(verdict)));
    }
  }
  return result;
}

nlohmann::json cycle_report_to_json(const CycleReport& report) {
  json cycles = json::array();
  for (const Cycle& cycle : report.cycles) {
    json ids = json::array();
    for (const EntityId& id : cycle) ids.push_back(id.str());
    cycles.push_back(std::move(ids));
  }
  return {{"is_acyclic", report.is_acyclic}, {"cycles", std::move(cycles)}};
}

nlohmann::json run_to_json(const PipelineRun& run) {
  json entities = json::array();
  for (const Entity& entity : run.entities) entities.push_back(entity_to_json(entity));
  json verdicts = json::array();
  for (const auto& [pair, verdict] : run.verdicts) {
    verdicts.push_back({{"entity_a", pair.first.str()},
                        {"entity_b", pair.second.str()},
                        {"verdict", to_string(verdict.parsed.verdict)},
                        {"source_exchange", verdict.source_exchange},
                        {"reasked", verdict.reasked}});
  }
  const RunStats& s = run.stats;
  json stats = {{"query_count", s.query_count},
                {"orientation_calls", s.orientation_calls},
                {"reask_count", s.reask_count},
                {"forward_count", s.forward_count},
                {"backward_count", s.backward_count},
                {"abstention_count", s.abstention_count},
                {"unparsable_count", s.unparsable_count},
                {"mean_latency", s.mean_latency},
                {"stdev_latency", s.stdev_latency},
                {"entity_latency", s.entity_latency},
                {"parallelism", s.parallelism},
                {"projected_wall_seconds", s.projected_wall_seconds},
                {"time_budget_seconds", s.time_budget_seconds},
                {"within_time_budget", s.within_time_budget}};
  return {{"format", "llmcg.run"},
          {"version", 1},
          {"completed_stage", to_string(run.completed_stage)},
          {"entities", std::move(entities)},
          {"verdicts", std::move(verdicts)},
          {"stats", std::move(stats)},
          {"warnings", run.warnings},
          {"graph", graph_to_json(run.graph)}};
}

nlohmann::json analysis_to_json(const PipelineRun& run) {
  return {{"format", "llmcg.analysis"},
          {"version", 1},
          {"cycles", cycle_report_to_json(run.cycles)},
          {"transitive_candidates", arcs_to_json(run.transitive_candidates)},
          {"removed_arcs", arcs_to_json(run.removed_arcs)}};
}

}  // namespace llmcg
