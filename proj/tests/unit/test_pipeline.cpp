#include "llmcg/compare.hpp"
#include "llmcg/fixture.hpp"
#include "llmcg/graph_io.hpp"
#include "llmcg/pipeline.hpp"
#include "llmcg/text.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <optional>

using namespace llmcg;
using llmcg::testing::fixture_dir;
using llmcg::testing::ScriptedProvider;

namespace {

const std::string kText =
    "Smoking damages the airways. Damaged airways lead to chronic cough, and chronic cough "
    "disturbs sleep. Tobacco use is common among night workers.";

ProviderConfig quiet_config() {
  ProviderConfig config;
  config.requests_per_minute = 0.0;
  return config;
}

// Entity labels quoted in option A of an orientation prompt.
std::pair<std::string, std::string> option_a(const std::string& user_text) {
  const std::size_t start = user_text.find("A: \"") + 4;
  const std::size_t middle = user_text.find("\" causes \"", start);
  const std::size_t end = user_text.find("\";", middle);
  return {normalize_label(user_text.substr(start, middle - start)),
          normalize_label(user_text.substr(middle + 10, end - middle - 10))};
}

bool is_reask(const RenderedPrompt& prompt) {
  return prompt.user_text.find("did not contain a final answer") != std::string::npos;
}

using Oracle = std::function<std::string(const std::string& a, const std::string& b)>;

// Entity prompts get `entity_reply`; orientation prompts get oracle(a, b).
ScriptedProvider::Script document_script(std::string entity_reply, Oracle oracle) {
  return [entity_reply = std::move(entity_reply), oracle = std::move(oracle)](
             const RenderedPrompt& prompt) -> std::string {
    if (prompt.user_text.find("A: \"") == std::string::npos) return entity_reply;
    const auto [a, b] = option_a(prompt.user_text);
    return oracle(a, b);
  };
}

std::string answer(char letter) {
  return std::string("Reasoning.\n<Answer>") + letter + "</Answer>";
}

// Answers A when `a` comes before `b` in `order`, otherwise C.
Oracle chain_oracle(std::vector<std::string> order) {
  return [order = std::move(order)](const std::string& a, const std::string& b) {
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      if (order[i] == a && order[i + 1] == b) return answer('A');
      if (order[i] == b && order[i + 1] == a) return answer('B');
    }
    return answer('C');
  };
}

const std::string kEntityReply =
    "<Entity>chronic cough</Entity><Entity>Smoking</Entity><Entity>sleep</Entity>"
    "<Entity>airways</Entity><Entity>lung cancer</Entity>"
    "<Group><Entity>tobacco use</Entity><Entity>smoking</Entity></Group>";

std::set<LabelArc> run_label_arcs(const PipelineRun& run) { return label_arcs(run.graph); }

}  // namespace

TEST(ExtractEntities, OrderMergeAndDrop) {
  auto provider = std::make_shared<ScriptedProvider>(document_script(kEntityReply, nullptr));
  Gateway gateway(quiet_config(), provider);
  const EntityExtraction extraction = extract_entities(kText, "", gateway);

  ASSERT_EQ(extraction.entities.size(), 4u);
  const std::vector<std::string> labels = {"smoking", "airways", "chronic cough", "sleep"};
  for (std::size_t i = 0; i < labels.size(); ++i) {
    EXPECT_EQ(extraction.entities[i].canonical_label, labels[i]);
    EXPECT_EQ(extraction.entities[i].id.str(), "e0" + std::to_string(i + 1));
  }
  EXPECT_EQ(extraction.entities[0].surface_forms,
            (std::set<std::string>{"smoking", "tobacco use"}));
  EXPECT_EQ(extraction.entities[0].first_offset, 0u);
  EXPECT_EQ(extraction.entities[1].first_offset, kText.find("airways"));
  ASSERT_EQ(extraction.warnings.size(), 1u);
  EXPECT_NE(extraction.warnings[0].find("lung cancer"), std::string::npos);
}

TEST(ExtractEntities, CapKeepsEarliest) {
  auto provider = std::make_shared<ScriptedProvider>(document_script(kEntityReply, nullptr));
  Gateway gateway(quiet_config(), provider);
  const EntityExtraction extraction = extract_entities(kText, "", gateway, 2);
  ASSERT_EQ(extraction.entities.size(), 2u);
  EXPECT_EQ(extraction.entities[1].canonical_label, "airways");
  EXPECT_EQ(extraction.warnings.size(), 2u);
}

TEST(ExtractEntities, NothingUsable) {
  auto provider = std::make_shared<ScriptedProvider>(
      document_script("<Entity>volcano</Entity>", nullptr));
  Gateway gateway(quiet_config(), provider);
  try {
    extract_entities(kText, "", gateway);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoEntitiesFound);
  }
}

TEST(EnumeratePairs, EveryPairOnceInDocumentOrder) {
  std::vector<Entity> entities;
  for (std::size_t i = 0; i < 7; ++i) {
    // Reverse insertion order; offsets define document order.
    entities.push_back(Entity::make(EntityId("e" + std::to_string(i)),
                                    "term " + std::to_string(i), 100 - 10 * i));
  }
  const auto questions = enumerate_pairs("irrelevant", entities);
  ASSERT_EQ(questions.size(), 21u);
  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t i = 0; i < questions.size(); ++i) {
    EXPECT_LT(questions[i].entity_a.first_offset, questions[i].entity_b.first_offset);
    seen.emplace(questions[i].entity_a.id.str(), questions[i].entity_b.id.str());
    if (i > 0) {
      const auto& p = questions[i - 1];
      const auto& q = questions[i];
      EXPECT_LT(std::make_pair(p.entity_a.first_offset, p.entity_b.first_offset),
                std::make_pair(q.entity_a.first_offset, q.entity_b.first_offset));
    }
  }
  EXPECT_EQ(seen.size(), 21u);
  EXPECT_THROW(enumerate_pairs("x", {entities[0]}), Error);
}

TEST(RunPipeline, ChainFromScript) {
  auto provider = std::make_shared<ScriptedProvider>(document_script(
      kEntityReply, chain_oracle({"smoking", "airways", "chronic cough", "sleep"})), 2.0);
  Gateway gateway(quiet_config(), provider);
  const PipelineRun run = run_pipeline(kText, "", PipelineConfig{}, gateway);

  EXPECT_EQ(run_label_arcs(run), (std::set<LabelArc>{{"smoking", "airways"},
                                                      {"airways", "chronic cough"},
                                                      {"chronic cough", "sleep"}}));
  EXPECT_EQ(run.stats.query_count, 6u);
  EXPECT_EQ(run.stats.orientation_calls, 6u);
  EXPECT_EQ(run.stats.forward_count, 3u);
  EXPECT_EQ(run.stats.abstention_count, 3u);
  EXPECT_EQ(provider->calls(), 7u);
  EXPECT_TRUE(run.cycles.is_acyclic);
  EXPECT_TRUE(run.transitive_candidates.empty());
  EXPECT_EQ(run.completed_stage, PipelineStage::TransitiveAnalysis);
  EXPECT_DOUBLE_EQ(run.stats.mean_latency, 2.0);
  EXPECT_DOUBLE_EQ(run.stats.stdev_latency, 0.0);
  // Entity call plus six sequential calls.
  EXPECT_DOUBLE_EQ(run.stats.projected_wall_seconds, 14.0);
  for (const auto& [key, arc] : run.graph.arcs()) {
    EXPECT_EQ(arc.provenance, Provenance::LLMVerdict);
    ASSERT_TRUE(arc.source_exchange);
    EXPECT_EQ(arc.source_exchange->size(), 64u);
  }
}

TEST(RunPipeline, UnparsableReplyIsReaskedOnce) {
  auto provider = std::make_shared<ScriptedProvider>([](const RenderedPrompt& prompt) {
    if (prompt.user_text.find("A: \"") == std::string::npos) return kEntityReply;
    const auto [a, b] = option_a(prompt.user_text);
    if (a == "smoking" && b == "airways") {
      return is_reask(prompt) ? answer('A') : std::string("It probably does.");
    }
    if (a == "airways" && b == "sleep") return std::string("still no tag");
    return answer('C');
  });
  Gateway gateway(quiet_config(), provider);
  const PipelineRun run = run_pipeline(kText, "", PipelineConfig{}, gateway);
  EXPECT_EQ(run.stats.query_count, 6u);
  EXPECT_EQ(run.stats.reask_count, 2u);
  EXPECT_EQ(run.stats.orientation_calls, 8u);
  EXPECT_EQ(run.stats.forward_count, 1u);
  EXPECT_EQ(run.stats.unparsable_count, 1u);
  EXPECT_EQ(provider->calls(), 9u);
  EXPECT_EQ(run.graph.arc_count(), 1u);
  const PairVerdict& verdict = run.verdicts.at({EntityId("e01"), EntityId("e02")});
  EXPECT_TRUE(verdict.reasked);
}

TEST(RunPipeline, TriangleIsBrokenWhenRequested) {
  // smoking -> airways -> chronic cough -> smoking, everything else C.
  auto provider = std::make_shared<ScriptedProvider>(document_script(
      kEntityReply, [](const std::string& a, const std::string& b) {
        if (a == "smoking" && b == "airways") return answer('A');
        if (a == "airways" && b == "chronic cough") return answer('A');
        if (a == "smoking" && b == "chronic cough") return answer('B');
        return answer('C');
      }));
  Gateway gateway(quiet_config(), provider);
  PipelineConfig config;
  EXPECT_FALSE(run_pipeline(kText, "", config, gateway).cycles.is_acyclic);

  config.enforce_acyclic = true;
  const PipelineRun run = run_pipeline(kText, "", config, gateway);
  EXPECT_EQ(run.cycles.cycles.size(), 1u);
  ASSERT_EQ(run.removed_arcs.size(), 1u);
  EXPECT_EQ(run.graph.arc_count(), 2u);
  EXPECT_TRUE(detect_cycles(run.graph).is_acyclic);
  EXPECT_EQ(run.completed_stage, PipelineStage::AcyclicityEnforcement);
}

TEST(RunPipeline, FailureCarriesPartialRun) {
  auto provider = std::make_shared<ScriptedProvider>(document_script(
      kEntityReply, [](const std::string& a, const std::string& b) -> std::string {
        if (a == "airways" && b == "chronic cough") {
          throw Error(ErrorCode::ProviderUnavailable, "scripted outage");
        }
        return answer('A');
      }));
  Gateway gateway(quiet_config(), provider);
  try {
    run_pipeline(kText, "", PipelineConfig{}, gateway);
    FAIL();
  } catch (const PipelineError& e) {
    EXPECT_EQ(e.code(), ErrorCode::PipelineFailed);
    EXPECT_EQ(e.cause(), ErrorCode::ProviderUnavailable);
    EXPECT_EQ(e.partial().completed_stage, PipelineStage::PairEnumeration);
    EXPECT_EQ(e.partial().entities.size(), 4u);
    // Pairs are queried in order; the three before the failing one finished.
    EXPECT_EQ(e.partial().verdicts.size(), 3u);
    EXPECT_NE(std::string(e.what()).find("pair_enumeration"), std::string::npos);
  }
}

TEST(RunPipeline, EntityFailureHasNoStage) {
  auto provider = std::make_shared<ScriptedProvider>(document_script("nothing", nullptr));
  Gateway gateway(quiet_config(), provider);
  try {
    run_pipeline(kText, "", PipelineConfig{}, gateway);
    FAIL();
  } catch (const PipelineError& e) {
    EXPECT_EQ(e.cause(), ErrorCode::NoEntitiesFound);
    EXPECT_EQ(e.partial().completed_stage, PipelineStage::None);
  }
}

TEST(RunPipeline, SingleEntityIsTooFew) {
  auto provider =
      std::make_shared<ScriptedProvider>(document_script("<Entity>sleep</Entity>", nullptr));
  Gateway gateway(quiet_config(), provider);
  try {
    run_pipeline(kText, "", PipelineConfig{}, gateway);
    FAIL();
  } catch (const PipelineError& e) {
    EXPECT_EQ(e.cause(), ErrorCode::TooFewEntities);
    EXPECT_EQ(e.partial().completed_stage, PipelineStage::EntityExtraction);
  }
}

TEST(ProjectedWall, RoundsOfParallelCalls) {
  EXPECT_DOUBLE_EQ(projected_wall_seconds(10, 2.0, 3), 8.0);
  EXPECT_DOUBLE_EQ(projected_wall_seconds(9, 2.0, 3), 6.0);
  EXPECT_DOUBLE_EQ(projected_wall_seconds(0, 2.0, 3), 0.0);
  EXPECT_DOUBLE_EQ(projected_wall_seconds(190, 11.5, 1), 2185.0);
}

namespace {

PipelineRun replay_run(const std::string& stem, int parallelism,
                       std::shared_ptr<CountingProvider>* counter = nullptr) {
  auto replay = std::make_shared<ReplayProvider>(
      load_fixture(fixture_dir() / (stem + ".replay.json")));
  auto counting = std::make_shared<CountingProvider>(replay);
  if (counter) *counter = counting;
  ProviderConfig config = quiet_config();
  config.parallelism = parallelism;
  Gateway gateway(config, counting);
  PipelineConfig pipeline;
  pipeline.parallelism = parallelism;
  return run_pipeline(read_file(fixture_dir() / (stem + ".txt")), kMedicalDomainHint, pipeline,
                      gateway);
}

// Mean latency of every fixture entry except the entity prompt's, each of
// which the run is expected to use exactly once.
double fixture_orientation_mean(const std::string& stem) {
  const ReplayFixture fixture = load_fixture(fixture_dir() / (stem + ".replay.json"));
  const std::string entity_fingerprint =
      render_entity_prompt(read_file(fixture_dir() / (stem + ".txt")), kMedicalDomainHint)
          .fingerprint;
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& [fingerprint, entry] : fixture.entries) {
    if (fingerprint == entity_fingerprint) continue;
    sum += entry.latency_seconds;
    ++count;
  }
  return sum / static_cast<double>(count);
}

}  // namespace

TEST(ReplayedRun, TenEntitiesWithReasks) {
  std::shared_ptr<CountingProvider> counter;
  const PipelineRun run = replay_run("entities10", 1, &counter);
  EXPECT_EQ(run.entities.size(), 10u);
  EXPECT_EQ(run.stats.query_count, 45u);
  EXPECT_EQ(run.stats.reask_count, 2u);
  EXPECT_EQ(run.stats.orientation_calls, 47u);
  EXPECT_EQ(counter->calls(), 48u);
  EXPECT_NEAR(run.stats.mean_latency, fixture_orientation_mean("entities10"), 1e-9);
  EXPECT_FALSE(run.cycles.is_acyclic);
}

TEST(ReplayedRun, TwentyEntitiesCallBudget) {
  std::shared_ptr<CountingProvider> counter;
  const PipelineRun run = replay_run("entities20", 4, &counter);
  EXPECT_EQ(run.entities.size(), 20u);
  EXPECT_EQ(run.stats.query_count, 190u);
  EXPECT_EQ(counter->calls(), 191u);
  EXPECT_NEAR(run.stats.mean_latency, fixture_orientation_mean("entities20"), 1e-9);
}

TEST(ReplayedRun, DeterministicAcrossParallelism) {
  const PipelineRun reference = replay_run("entities10", 1);
  const std::string reference_graph = serialize_graph(reference.graph, GraphFormat::StructuredGraphFile);
  const auto reference_analysis = analysis_to_json(reference);
  for (int parallelism : {1, 2, 8}) {
    for (int repeat = 0; repeat < 3; ++repeat) {
      const PipelineRun run = replay_run("entities10", parallelism);
      EXPECT_EQ(serialize_graph(run.graph, GraphFormat::StructuredGraphFile), reference_graph);
      EXPECT_EQ(analysis_to_json(run), reference_analysis);
      EXPECT_EQ(run.entities, reference.entities);
      EXPECT_EQ(run.stats.mean_latency, reference.stats.mean_latency);
    }
  }
}

TEST(ReplayedRun, MedicalAbstractMatchesReferenceGraph) {
  const PipelineRun run = replay_run("diabetes_review", 2);
  const CausalGraph truth = parse_graph(read_file(fixture_dir() / "diabetes_review.truth.json"));
  EXPECT_EQ(run.entities.size(), 11u);
  EXPECT_EQ(run.entities.front().canonical_label, "fulminant type 1 diabetes");
  EXPECT_TRUE(run.entities.front().surface_forms.contains("ft1d"));
  EXPECT_EQ(label_arcs(run.graph), label_arcs(truth));
  for (std::size_t i = 1; i < run.entities.size(); ++i) {
    EXPECT_LT(run.entities[i - 1].first_offset, run.entities[i].first_offset);
  }
}

TEST(ReplayedRun, ShortcutIsFlagged) {
  const PipelineRun run = replay_run("multiply_connected", 1);
  ASSERT_EQ(run.transitive_candidates.size(), 1u);
  const Arc& shortcut = run.transitive_candidates[0];
  EXPECT_EQ(run.graph.entity(shortcut.cause).canonical_label, "lifetide biofeedback intervention");
  EXPECT_EQ(run.graph.entity(shortcut.effect).canonical_label, "blood glucose levels");
  EXPECT_TRUE(run.graph.find_arc(shortcut.key())->flags.suspected_transitive);
}

TEST(ReplayedRun, ReportJsonShape) {
  const PipelineRun run = replay_run("multiply_connected", 1);
  const auto report = run_to_json(run);
  EXPECT_EQ(report["stats"]["query_count"], 3);
  EXPECT_EQ(report["entities"].size(), 3u);
  const auto analysis = analysis_to_json(run);
  EXPECT_EQ(analysis["cycles"]["is_acyclic"], true);
}

TEST(Cpdag, OrientsUndirectedEdges) {
  const std::string text = "Heat dries the soil, dry soil stunts crops, and crops feed cattle.";
  CausalGraph base;
  base.add_entity(Entity::make(EntityId("h"), "heat"));
  base.add_entity(Entity::make(EntityId("s"), "dry soil"));
  base.add_entity(Entity::make(EntityId("c"), "crops"));
  base.add_entity(Entity::make(EntityId("k"), "cattle"));
  base.add_arc({EntityId("c"), EntityId("k"), Provenance::Imported, std::nullopt, {}});
  auto document = graph_to_json(base);
  document["undirected"] = nlohmann::json::array(
      {nlohmann::json::array({"s", "h"}), nlohmann::json::array({"s", "c"}),
       nlohmann::json::array({"h", "k"})});
  const PartiallyDirectedGraph pdag = parse_pdag(document.dump());
  ASSERT_EQ(pdag.undirected_edges.size(), 3u);

  auto provider = std::make_shared<ScriptedProvider>(
      document_script("", [](const std::string& a, const std::string& b) {
        if (a == "heat" && b == "dry soil") return answer('A');
        if (a == "dry soil" && b == "crops") return answer('A');
        return answer('C');
      }));
  Gateway gateway(quiet_config(), provider);
  const CpdagOrientation oriented = orient_cpdag(pdag, text, gateway, 2);
  EXPECT_EQ(oriented.query_count, 3u);
  EXPECT_EQ(provider->calls(), 3u);
  EXPECT_EQ(label_arcs(oriented.graph),
            (std::set<LabelArc>{{"heat", "dry soil"}, {"dry soil", "crops"}, {"crops", "cattle"}}));
  EXPECT_EQ(oriented.graph.find_arc({EntityId("c"), EntityId("k")})->provenance,
            Provenance::Imported);
  EXPECT_EQ(oriented.graph.find_arc({EntityId("h"), EntityId("s")})->provenance,
            Provenance::LLMVerdict);
  EXPECT_EQ(oriented.warnings.size(), 1u);
}

TEST(Cpdag, RejectsInconsistentInput) {
  CausalGraph base;
  base.add_entity(Entity::make(EntityId("a"), "alpha"));
  base.add_entity(Entity::make(EntityId("b"), "beta"));
  base.add_arc({EntityId("a"), EntityId("b"), Provenance::Imported, std::nullopt, {}});
  auto document = graph_to_json(base);
  document["undirected"] = nlohmann::json::array({nlohmann::json::array({"b", "a"})});
  EXPECT_THROW(parse_pdag(document.dump()), Error);
  document["undirected"] = nlohmann::json::array({nlohmann::json::array({"a", "zeta"})});
  EXPECT_THROW(parse_pdag(document.dump()), Error);
}
