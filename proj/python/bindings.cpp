#include "llmcg/analysis.hpp"
#include "llmcg/cli.hpp"
#include "llmcg/compare.hpp"
#include "llmcg/error.hpp"
#include "llmcg/evaluation.hpp"
#include "llmcg/fixture.hpp"
#include "llmcg/graph_io.hpp"
#include "llmcg/pipeline.hpp"
#include "llmcg/prompt.hpp"
#include "llmcg/semeval.hpp"
#include "llmcg/text.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using nlohmann::json;

// JSON crosses the boundary as text; the Python package decodes it.
namespace {

std::string domain_text(const std::string& hint) {
  return hint == "medical" ? std::string(llmcg::kMedicalDomainHint) : hint;
}

std::string extract_replay(const std::string& text, const std::string& fixture_path,
                           const std::string& domain_hint, int parallelism, bool enforce_acyclic,
                           bool strict) {
  llmcg::ReplayFixture fixture = llmcg::load_fixture(fixture_path);
  fixture.strict = strict;
  llmcg::ProviderConfig provider;
  provider.parallelism = parallelism;
  provider.requests_per_minute = 0.0;
  llmcg::Gateway gateway(provider, std::make_shared<llmcg::ReplayProvider>(std::move(fixture)));
  llmcg::PipelineConfig config;
  config.parallelism = parallelism;
  config.enforce_acyclic = enforce_acyclic;
  llmcg::PipelineRun run;
  {
    py::gil_scoped_release release;
    try {
      run = llmcg::run_pipeline(text, domain_text(domain_hint), config, gateway);
    } catch (const llmcg::PipelineError& e) {
      // Surface the underlying cause rather than the generic pipeline code.
      throw llmcg::Error(e.cause(), e.what());
    }
  }
  return json{{"run", llmcg::run_to_json(run)},
              {"analysis", llmcg::analysis_to_json(run)},
              {"graph", llmcg::graph_to_json(run.graph)},
              {"dot", llmcg::serialize_graph(run.graph, llmcg::GraphFormat::Dot)}}
      .dump();
}

std::string detect_cycles(const std::string& graph_json) {
  return llmcg::cycle_report_to_json(llmcg::detect_cycles(llmcg::parse_graph(graph_json))).dump();
}

std::string enforce_acyclicity(const std::string& graph_json) {
  const llmcg::AcyclicityResult result = llmcg::enforce_acyclicity(llmcg::parse_graph(graph_json));
  json removed = json::array();
  for (const llmcg::Arc& arc : result.removed) {
    removed.push_back({arc.cause.str(), arc.effect.str()});
  }
  return json{{"graph", llmcg::graph_to_json(result.graph)}, {"removed", removed}}.dump();
}

std::string transitive_candidates(const std::string& graph_json) {
  json arcs = json::array();
  for (const llmcg::Arc& arc : llmcg::find_transitive_candidates(llmcg::parse_graph(graph_json))) {
    arcs.push_back({arc.cause.str(), arc.effect.str()});
  }
  return arcs.dump();
}

std::string evaluate_graph(const std::string& extracted_json, const std::string& truth_json) {
  return llmcg::graph_evaluation_to_json(llmcg::evaluate_graph_run(
                                             llmcg::parse_graph(extracted_json),
                                             llmcg::parse_graph(truth_json)))
      .dump();
}

std::string pairwise_report(const std::vector<std::vector<std::size_t>>& grid,
                            std::size_t abstained, std::size_t unparsable) {
  if (grid.size() != 2 || grid[0].size() != 2 || grid[1].size() != 2) {
    throw py::value_error("grid must be 2x2");
  }
  llmcg::ConfusionMatrix confusion;
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) confusion.counts[i][j] = grid[i][j];
  }
  confusion.abstained = abstained;
  confusion.unparsable = unparsable;
  return llmcg::report_to_json(llmcg::compute_report(confusion)).dump();
}

py::dict record_to_dict(const llmcg::SemEvalRecord& r) {
  py::dict d;
  d["record_id"] = r.record_id;
  d["sentence"] = r.sentence;
  d["e1_span"] = r.e1_span;
  d["e1_offset"] = r.e1_offset;
  d["e2_span"] = r.e2_span;
  d["e2_offset"] = r.e2_offset;
  d["relation_label"] = r.relation_label;
  if (r.causal_orientation) {
    d["causal_orientation"] =
        *r.causal_orientation == llmcg::CausalOrientation::E1CausesE2 ? "e1->e2" : "e2->e1";
  } else {
    d["causal_orientation"] = py::none();
  }
  d["comment"] = r.comment ? py::object(py::str(*r.comment)) : py::object(py::none());
  return d;
}

py::list parse_semeval(const std::string& text) {
  py::list out;
  for (const auto& record : llmcg::parse_semeval(text)) out.append(record_to_dict(record));
  return out;
}

py::tuple run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code;
  {
    py::gil_scoped_release release;
    code = llmcg::cli::run_cli(args, out, err);
  }
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bindings for the llmcg causal graph library.";

  py::register_exception<llmcg::Error>(m, "LlmcgError");

  m.def("normalize_label", &llmcg::normalize_label);
  m.def("parse_verdict", [](const std::string& reply) {
    return std::string(llmcg::to_string(llmcg::parse_verdict(reply).verdict));
  });
  m.def("extract_replay", &extract_replay, py::arg("text"), py::arg("fixture_path"),
        py::arg("domain_hint") = "medical", py::arg("parallelism") = 1,
        py::arg("enforce_acyclic") = false, py::arg("strict") = true);
  m.def("detect_cycles", &detect_cycles);
  m.def("enforce_acyclicity", &enforce_acyclicity);
  m.def("transitive_candidates", &transitive_candidates);
  m.def("evaluate_graph", &evaluate_graph);
  m.def("pairwise_report", &pairwise_report, py::arg("grid"), py::arg("abstained") = 0,
        py::arg("unparsable") = 0);
  m.def("parse_semeval", &parse_semeval);
  m.def("run_cli", &run_cli);
}
