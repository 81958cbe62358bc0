#include "llmcg/evaluation.hpp"

#include "llmcg/error.hpp"
#include "llmcg/parallel.hpp"

#include <cstdio>
#include <sstream>

namespace llmcg {
namespace {

using nlohmann::json;

Rate undefined_when_empty(std::size_t numerator, std::size_t denominator) {
  Rate rate{numerator, denominator, std::nullopt};
  if (denominator > 0) {
    rate.value = static_cast<double>(numerator) / static_cast<double>(denominator);
  }
  return rate;
}

ClassScores class_scores(const ConfusionMatrix& m, std::size_t cls) {
  const std::size_t other = 1 - cls;
  const std::size_t tp = m.counts[cls][cls];
  const std::size_t fp = m.counts[cls][other];
  const std::size_t fn = m.counts[other][cls];
  const auto scores = PrecisionRecall::from_counts(tp, fp, fn);
  return {scores.precision, scores.recall, scores.f1};
}

json rate_to_json(const Rate& rate) {
  return {{"numerator", rate.numerator},
          {"denominator", rate.denominator},
          {"value", rate.value ? json(*rate.value) : json("undefined")}};
}

json class_to_json(const ClassScores& scores) {
  return {{"precision", rate_to_json(scores.precision)},
          {"recall", rate_to_json(scores.recall)},
          {"f1", rate_to_json(scores.f1)}};
}

json label_arcs_to_json(const std::set<LabelArc>& arcs) {
  json out = json::array();
  for (const auto& [cause, effect] : arcs) out.push_back({cause, effect});
  return out;
}

}  // namespace

std::size_t ConfusionMatrix::grid_total() const noexcept {
  return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1];
}

PairwiseReport compute_report(const ConfusionMatrix& confusion) {
  const std::size_t total = confusion.grid_total();
  if (total == 0) throw Error(ErrorCode::EmptyEvaluationSet, "confusion grid is empty");
  PairwiseReport report;
  report.confusion = confusion;
  report.forward = class_scores(confusion, kForward);
  report.backward = class_scores(confusion, kBackward);
  report.macro_f1 = (*report.forward.f1.value + *report.backward.f1.value) / 2.0;
  const std::size_t trace = confusion.counts[0][0] + confusion.counts[1][1];
  report.micro_accuracy = Rate::of(trace, total, total - trace);
  return report;
}

OrientationQuestion orientation_question(const SemEvalRecord& record) {
  return {record.sentence, Entity::make(EntityId("e1"), record.e1_span, record.e1_offset),
          Entity::make(EntityId("e2"), record.e2_span, record.e2_offset)};
}

PairwiseReport run_pairwise_eval(const std::vector<SemEvalRecord>& records, Gateway& gateway,
                                 int parallelism) {
  std::vector<const SemEvalRecord*> causal;
  for (const SemEvalRecord& record : records) {
    if (record.causal_orientation) causal.push_back(&record);
  }
  if (causal.empty()) throw Error(ErrorCode::EmptyEvaluationSet, "no cause-effect records");

  std::vector<Verdict> verdicts(causal.size(), Verdict::Unparsable);
  parallel_for(causal.size(), parallelism, [&](std::size_t i) {
    verdicts[i] = query_orientation(orientation_question(*causal[i]), gateway).verdict.verdict;
  });

  ConfusionMatrix confusion;
  std::vector<long> misoriented, abstained, unparsable;
  for (std::size_t i = 0; i < causal.size(); ++i) {
    const long id = causal[i]->record_id;
    const std::size_t truth =
        *causal[i]->causal_orientation == CausalOrientation::E1CausesE2 ? kForward : kBackward;
    switch (verdicts[i]) {
      case Verdict::Forward:
      case Verdict::Backward: {
        const std::size_t predicted = verdicts[i] == Verdict::Forward ? kForward : kBackward;
        ++confusion.counts[predicted][truth];
        if (predicted != truth) misoriented.push_back(id);
        break;
      }
      case Verdict::NoRelation:
        ++confusion.abstained;
        abstained.push_back(id);
        break;
      case Verdict::Unparsable:
        ++confusion.unparsable;
        unparsable.push_back(id);
        break;
    }
  }
  PairwiseReport report = compute_report(confusion);
  report.misoriented_ids = std::move(misoriented);
  report.abstained_ids = std::move(abstained);
  report.unparsable_ids = std::move(unparsable);
  return report;
}

nlohmann::json report_to_json(const PairwiseReport& report) {
  const auto& c = report.confusion.counts;
  return {{"format", "llmcg.pairwise_report"},
          {"version", 1},
          {"confusion",
           {{"grid", {{c[0][0], c[0][1]}, {c[1][0], c[1][1]}}},
            {"rows", "predicted (forward, backward)"},
            {"columns", "truth (forward, backward)"},
            {"abstained", report.confusion.abstained},
            {"unparsable", report.confusion.unparsable}}},
          {"forward", class_to_json(report.forward)},
          {"backward", class_to_json(report.backward)},
          {"macro_f1", report.macro_f1},
          {"micro_accuracy", rate_to_json(report.micro_accuracy)},
          {"misoriented_ids", report.misoriented_ids},
          {"abstained_ids", report.abstained_ids},
          {"unparsable_ids", report.unparsable_ids}};
}

PairwiseReport report_from_json(const nlohmann::json& document) {
  ConfusionMatrix confusion;
  try {
    const json& section = document.at("confusion");
    const json& grid = section.at("grid");
    for (std::size_t row = 0; row < 2; ++row) {
      for (std::size_t col = 0; col < 2; ++col) {
        confusion.counts[row][col] = grid.at(row).at(col).get<std::size_t>();
      }
    }
    confusion.abstained = section.at("abstained").get<std::size_t>();
    confusion.unparsable = section.at("unparsable").get<std::size_t>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("pairwise report: ") + e.what());
  }
  PairwiseReport report = compute_report(confusion);
  report.misoriented_ids = document.value("misoriented_ids", std::vector<long>{});
  report.abstained_ids = document.value("abstained_ids", std::vector<long>{});
  report.unparsable_ids = document.value("unparsable_ids", std::vector<long>{});
  return report;
}

std::string format_confusion_table(const PairwiseReport& report) {
  const auto& c = report.confusion.counts;
  char buffer[512];
  std::ostringstream out;
  std::snprintf(buffer, sizeof buffer,
                "                    Ground Truth\n"
                "                  A -> B   A <- B\n"
                "LLM   A -> B   %8zu %8zu\n"
                "      A <- B   %8zu %8zu\n",
                c[0][0], c[0][1], c[1][0], c[1][1]);
  out << buffer;
  out << "abstained: " << report.confusion.abstained
      << "  unparsable: " << report.confusion.unparsable << '\n';
  std::snprintf(buffer, sizeof buffer,
                "forward  P=%s R=%s F1=%s\nbackward P=%s R=%s F1=%s\nmacro F1=%.6f  micro "
                "accuracy=%s (%zu/%zu)\n",
                report.forward.precision.to_string().c_str(),
                report.forward.recall.to_string().c_str(), report.forward.f1.to_string().c_str(),
                report.backward.precision.to_string().c_str(),
                report.backward.recall.to_string().c_str(),
                report.backward.f1.to_string().c_str(), report.macro_f1,
                report.micro_accuracy.to_string().c_str(), report.micro_accuracy.numerator,
                report.micro_accuracy.denominator);
  out << buffer;
  return out.str();
}

GraphRunEvaluation evaluate_graph_run(const CausalGraph& extracted, const CausalGraph& truth) {
  if (truth.kind() != GraphKind::GroundTruth) {
    throw Error(ErrorCode::InvalidGraph, "reference graph is not a ground-truth graph");
  }
  GraphRunEvaluation evaluation;
  evaluation.comparison = compare_graphs(extracted, truth);
  for (const auto& [key, arc] : extracted.arcs()) {
    if (!arc.flags.suspected_transitive) continue;
    const LabelArc labels{extracted.entity(key.first).canonical_label,
                          extracted.entity(key.second).canonical_label};
    if (evaluation.comparison.false_positive_arcs.contains(labels)) {
      ++evaluation.transitive_false_positives;
    }
  }
  evaluation.transitive_fp_share =
      undefined_when_empty(evaluation.transitive_false_positives,
                           evaluation.comparison.false_positive_arcs.size());
  return evaluation;
}

GraphRunEvaluation evaluate_graph_run(const PipelineRun& run, const CausalGraph& truth) {
  return evaluate_graph_run(run.graph, truth);
}

GraphBatchEvaluation evaluate_graph_batch(
    const std::vector<std::pair<CausalGraph, CausalGraph>>& extracted_and_truth) {
  GraphBatchEvaluation batch;
  std::size_t transitive = 0;
  for (const auto& [extracted, truth] : extracted_and_truth) {
    GraphRunEvaluation evaluation = evaluate_graph_run(extracted, truth);
    batch.true_positives += evaluation.comparison.true_positive_arcs.size();
    batch.false_positives += evaluation.comparison.false_positive_arcs.size();
    batch.false_negatives += evaluation.comparison.false_negative_arcs.size();
    transitive += evaluation.transitive_false_positives;
    batch.documents.push_back(std::move(evaluation));
  }
  batch.pooled = PrecisionRecall::from_counts(batch.true_positives, batch.false_positives,
                                              batch.false_negatives);
  batch.transitive_fp_share = undefined_when_empty(transitive, batch.false_positives);
  return batch;
}

nlohmann::json graph_evaluation_to_json(const GraphRunEvaluation& evaluation) {
  const GraphComparison& c = evaluation.comparison;
  return {{"format", "llmcg.graph_comparison"},
          {"version", 1},
          {"true_positive_arcs", label_arcs_to_json(c.true_positive_arcs)},
          {"false_positive_arcs", label_arcs_to_json(c.false_positive_arcs)},
          {"false_negative_arcs", label_arcs_to_json(c.false_negative_arcs)},
          {"precision", rate_to_json(c.precision)},
          {"recall", rate_to_json(c.recall)},
          {"f1", rate_to_json(c.f1)},
          {"transitive_false_positives", evaluation.transitive_false_positives},
          {"transitive_fp_share", rate_to_json(evaluation.transitive_fp_share)}};
}

}  // namespace llmcg
