"""Causal graph extraction from text with a chat model, plus evaluation."""

import json

from . import _core
from ._core import LlmcgError, normalize_label, parse_semeval, parse_verdict, run_cli

__all__ = [
    "LlmcgError",
    "detect_cycles",
    "enforce_acyclicity",
    "error_code",
    "evaluate_graph",
    "extract_replay",
    "normalize_label",
    "pairwise_report",
    "parse_semeval",
    "parse_verdict",
    "run_cli",
    "transitive_candidates",
]


def _graph_text(graph):
    return graph if isinstance(graph, str) else json.dumps(graph)


def error_code(error):
    """The library error code carried by an LlmcgError, e.g. "FixtureMiss"."""
    return str(error).split(":", 1)[0]


def extract_replay(text, fixture_path, domain_hint="medical", parallelism=1,
                   enforce_acyclic=False, strict=True):
    """Runs the extraction pipeline against a replay fixture.

    Returns a dict with the run report, the analysis report, the graph in
    its JSON form and the DOT rendering.
    """
    return json.loads(_core.extract_replay(text, str(fixture_path), domain_hint,
                                           parallelism, enforce_acyclic, strict))


def detect_cycles(graph):
    return json.loads(_core.detect_cycles(_graph_text(graph)))


def enforce_acyclicity(graph):
    return json.loads(_core.enforce_acyclicity(_graph_text(graph)))


def transitive_candidates(graph):
    return [tuple(arc) for arc in json.loads(_core.transitive_candidates(_graph_text(graph)))]


def evaluate_graph(extracted, truth):
    return json.loads(_core.evaluate_graph(_graph_text(extracted), _graph_text(truth)))


def pairwise_report(grid, abstained=0, unparsable=0):
    """Metrics for a 2x2 orientation grid indexed [predicted][truth]."""
    return json.loads(_core.pairwise_report(grid, abstained, unparsable))
