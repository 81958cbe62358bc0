#include "llmcg/compare.hpp"
#include "llmcg/evaluation.hpp"
#include "llmcg/metrics.hpp"
#include "oracles.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace llmcg;
using llmcg::testing::LabelPair;
using llmcg::testing::naive_count;
using llmcg::testing::NaiveCounts;
using llmcg::testing::random_labelled_graph;

TEST(Rate, Conventions) {
  EXPECT_EQ(Rate::of(2, 3, 1).to_string(), "0.666667");
  EXPECT_DOUBLE_EQ(*Rate::of(0, 0, 0).value, 1.0);
  EXPECT_FALSE(Rate::of(0, 0, 2).defined());
  EXPECT_EQ(Rate::of(0, 0, 2).to_string(), "undefined");
}

TEST(PrecisionRecall, FromCounts) {
  const auto pr = PrecisionRecall::from_counts(2, 1, 0);
  EXPECT_DOUBLE_EQ(*pr.precision.value, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(*pr.recall.value, 1.0);
  EXPECT_DOUBLE_EQ(*pr.f1.value, 0.8);

  // Nothing predicted, something missed: no false positives, so precision is 1.
  const auto empty = PrecisionRecall::from_counts(0, 0, 3);
  EXPECT_DOUBLE_EQ(*empty.precision.value, 1.0);
  EXPECT_DOUBLE_EQ(*empty.recall.value, 0.0);
  EXPECT_DOUBLE_EQ(*empty.f1.value, 0.0);

  // Nothing predicted and nothing to find.
  const auto none = PrecisionRecall::from_counts(0, 0, 0);
  EXPECT_DOUBLE_EQ(*none.precision.value, 1.0);
  EXPECT_DOUBLE_EQ(*none.recall.value, 1.0);
  EXPECT_DOUBLE_EQ(*none.f1.value, 1.0);
}

TEST(PairwiseMetrics, BenchmarkGridMatchesHandComputation) {
  // Worked by hand from the grid [[335, 7], [6, 650]] (rows predicted,
  // columns truth):
  //   forward:  P = 335/342, R = 335/341, F1 = 670/683 = 0.980966...
  //   backward: P = 650/656, R = 650/657, F1 = 1300/1313 = 0.990099...
  //   macro F1 = 0.985533..., micro accuracy = 985/998 = 0.986974...
  ConfusionMatrix grid;
  grid.counts = {{{335, 7}, {6, 650}}};
  grid.abstained = 5;
  const PairwiseReport report = compute_report(grid);
  EXPECT_NEAR(*report.forward.f1.value, 0.980966, 1e-6);
  EXPECT_NEAR(*report.backward.f1.value, 0.990099, 1e-6);
  EXPECT_NEAR(report.macro_f1, 0.985533, 1e-6);
  EXPECT_EQ(report.micro_accuracy.numerator, 985u);
  EXPECT_EQ(report.micro_accuracy.denominator, 998u);
  EXPECT_NEAR(*report.micro_accuracy.value, 0.986974, 1e-6);
  EXPECT_NEAR(*report.forward.precision.value, 335.0 / 342.0, 1e-12);
  EXPECT_NEAR(*report.backward.recall.value, 650.0 / 657.0, 1e-12);
}

TEST(PairwiseMetrics, EmptyGridIsAnError) {
  ConfusionMatrix grid;
  grid.abstained = 3;
  EXPECT_THROW(compute_report(grid), Error);
}

TEST(PairwiseMetrics, ReportJsonRecomputes) {
  ConfusionMatrix grid;
  grid.counts = {{{10, 2}, {1, 7}}};
  grid.unparsable = 1;
  PairwiseReport report = compute_report(grid);
  report.misoriented_ids = {4, 9, 11};
  const PairwiseReport back = report_from_json(report_to_json(report));
  EXPECT_EQ(back.confusion, report.confusion);
  EXPECT_EQ(back.misoriented_ids, report.misoriented_ids);
  EXPECT_DOUBLE_EQ(back.macro_f1, report.macro_f1);
}

TEST(PairwiseMetrics, TableLayout) {
  ConfusionMatrix grid;
  grid.counts = {{{335, 7}, {6, 650}}};
  grid.abstained = 5;
  const std::string table = format_confusion_table(compute_report(grid));
  EXPECT_NE(table.find("LLM   A -> B        335        7"), std::string::npos);
  EXPECT_NE(table.find("      A <- B          6      650"), std::string::npos);
  EXPECT_NE(table.find("abstained: 5"), std::string::npos);
}

TEST(CompareGraphs, IdenticalGraphsArePerfect) {
  const CausalGraph graph = llmcg::testing::make_graph(3, {{0, 1}, {1, 2}});
  const GraphComparison c = compare_graphs(graph, graph);
  EXPECT_DOUBLE_EQ(*c.precision.value, 1.0);
  EXPECT_DOUBLE_EQ(*c.recall.value, 1.0);
}

TEST(CompareGraphs, MatchesNaiveCountingOnRandomPairs) {
  std::mt19937 rng(21);
  for (int trial = 0; trial < 600; ++trial) {
    const auto [extracted, extracted_arcs] = random_labelled_graph(rng, GraphKind::Extracted, "x");
    const auto [truth, truth_arcs] = random_labelled_graph(rng, GraphKind::GroundTruth, "t");
    const GraphComparison c = compare_graphs(extracted, truth);
    const NaiveCounts oracle = naive_count(extracted_arcs, truth_arcs);
    ASSERT_EQ(c.true_positive_arcs.size(), oracle.tp) << "trial " << trial;
    ASSERT_EQ(c.false_positive_arcs.size(), oracle.fp) << "trial " << trial;
    ASSERT_EQ(c.false_negative_arcs.size(), oracle.fn) << "trial " << trial;
    ASSERT_EQ(c.precision.numerator, oracle.tp);
    ASSERT_EQ(c.precision.denominator, oracle.tp + oracle.fp);
    ASSERT_EQ(c.recall.denominator, oracle.tp + oracle.fn);
  }
}

TEST(GraphEvaluation, MultiplyConnectedProbe) {
  CausalGraph extracted = llmcg::testing::make_graph(3, {{0, 1}, {1, 2}, {0, 2}});
  flag_transitive_candidates(extracted);
  const CausalGraph truth = llmcg::testing::make_graph(3, {{0, 1}, {1, 2}}, GraphKind::GroundTruth);
  const GraphRunEvaluation evaluation = evaluate_graph_run(extracted, truth);
  EXPECT_EQ(evaluation.comparison.precision.numerator, 2u);
  EXPECT_EQ(evaluation.comparison.precision.denominator, 3u);
  EXPECT_EQ(evaluation.transitive_false_positives, 1u);
  EXPECT_DOUBLE_EQ(*evaluation.transitive_fp_share.value, 1.0);
}

TEST(GraphEvaluation, ShareUndefinedWithoutFalsePositives) {
  const CausalGraph truth = llmcg::testing::make_graph(2, {{0, 1}}, GraphKind::GroundTruth);
  const CausalGraph extracted = llmcg::testing::make_graph(2, {{0, 1}});
  EXPECT_FALSE(evaluate_graph_run(extracted, truth).transitive_fp_share.defined());
}

TEST(GraphEvaluation, TruthMustBeGroundTruth) {
  const CausalGraph graph = llmcg::testing::make_graph(2, {{0, 1}});
  EXPECT_THROW(evaluate_graph_run(graph, graph), Error);
}

TEST(GraphEvaluation, BatchPoolsCounts) {
  std::mt19937 rng(22);
  std::vector<std::pair<CausalGraph, CausalGraph>> pairs;
  std::size_t tp = 0, fp = 0, fn = 0;
  for (int doc = 0; doc < 20; ++doc) {
    auto [extracted, extracted_arcs] = random_labelled_graph(rng, GraphKind::Extracted, "x");
    auto [truth, truth_arcs] = random_labelled_graph(rng, GraphKind::GroundTruth, "t");
    const NaiveCounts counts = naive_count(extracted_arcs, truth_arcs);
    tp += counts.tp;
    fp += counts.fp;
    fn += counts.fn;
    pairs.emplace_back(std::move(extracted), std::move(truth));
  }
  const GraphBatchEvaluation batch = evaluate_graph_batch(pairs);
  EXPECT_EQ(batch.documents.size(), 20u);
  EXPECT_EQ(batch.pooled.precision.numerator, tp);
  EXPECT_EQ(batch.pooled.precision.denominator, tp + fp);
  EXPECT_EQ(batch.pooled.recall.denominator, tp + fn);
  EXPECT_DOUBLE_EQ(*batch.pooled.precision.value, double(tp) / double(tp + fp));
  EXPECT_DOUBLE_EQ(*batch.pooled.recall.value, double(tp) / double(tp + fn));
}
