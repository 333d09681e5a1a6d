"""End-to-end narrative generation: propagate, analyze, plan, render.

This is the one call the service and the batch entry point share, so
both surfaces produce identical documents for identical inputs and
seed.  Alongside the narrative it returns the per-node net changes and
the color/thickness encoding classes a graph view needs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .analytics import pagerank
from .model import CausalGraph, InterventionSpec, validate_selection
from .modules import impact_summary_plans, projected_trend_plans, correlation_sentences
from .pipeline import (
    DEFAULT_DOI_WEIGHTS,
    DoiSceneGraph,
    aggregate,
    build_scene_graph,
    extract_clauses,
    score_clauses,
)
from .plans import SentencePlan
from .propagation import DEFAULT_HORIZON, PropagationTrace, net_change, propagate
from .render import CUMULATIVE, DEFAULT_BUDGET, NarrativeDoc, render
from .wiki import WikiSummaryProvider

SHADE_LEVELS = 3
THICKNESS_LEVELS = 3


@dataclass(frozen=True)
class NarrativeResult:
    doc: NarrativeDoc
    trace: PropagationTrace
    scene: DoiSceneGraph
    plans: tuple[SentencePlan, ...]
    encodings: dict


def _bucket(fraction: float, levels: int) -> int:
    """Map a magnitude fraction in [0, 1] onto 1..levels (0 stays 0)."""
    if fraction <= 0:
        return 0
    return min(levels, 1 + int(fraction * levels - 1e-12))


def view_encodings(graph: CausalGraph, trace: PropagationTrace) -> dict:
    """Node fill classes (polarity + impact shade) and edge thickness
    classes for the graph view."""
    nets = {nid: net_change(trace, nid) for nid in graph.node_ids}
    max_abs = max((abs(v) for v in nets.values()), default=0.0)
    nodes = {}
    for nid, net in nets.items():
        polarity = "neutral" if net == 0 else ("positive" if net > 0 else "negative")
        frac = abs(net) / max_abs if max_abs > 0 else 0.0
        nodes[nid] = {
            "net": round(net, 6),
            "polarity": polarity,
            "shade": _bucket(frac, SHADE_LEVELS),
        }
    edges = [
        {
            "source": e.source,
            "target": e.target,
            "weight": e.weight,
            "polarity": "positive" if e.weight >= 0 else "negative",
            "thickness": _bucket(abs(e.weight), THICKNESS_LEVELS),
        }
        for e in graph.edges
    ]
    return {"nodes": nodes, "edges": edges}


def narrate(
    graph: CausalGraph,
    interventions: list[InterventionSpec],
    objectives: list[str],
    *,
    horizon: int = DEFAULT_HORIZON,
    scope: str = CUMULATIVE,
    budget: int | float | None = DEFAULT_BUDGET,
    seed: int = 0,
    kb: WikiSummaryProvider | None = None,
    doi_weights: tuple[float, float, float] = DEFAULT_DOI_WEIGHTS,
    templates: dict[str, str] | None = None,
    doi_floor: float | None = None,
) -> NarrativeResult:
    """Run the full pipeline over one selection and render the narrative."""
    problems = validate_selection(graph, interventions, objectives, horizon)
    if problems:
        raise ValueError("; ".join(problems))

    trace = propagate(graph, interventions, horizon)
    centrality = pagerank(graph)

    clauses = extract_clauses(graph, trace, interventions, objectives)
    score_clauses(clauses, trace, centrality, interventions, objectives, doi_weights)
    scene = aggregate(build_scene_graph(clauses))

    io_nodes = frozenset(s.node for s in interventions) | frozenset(objectives)
    plans = (
        impact_summary_plans(graph, trace, interventions, objectives)
        + projected_trend_plans(
            trace, graph, centrality, seed=seed, kb=kb, io_nodes=io_nodes
        )
        + correlation_sentences(scene, graph, io_nodes)
    )

    group_doi = {g.node: g.max_doi for g in scene.groups}
    plans = [
        p
        if p.doi
        else replace(p, doi=max((group_doi.get(n, 0.0) for n in p.nodes), default=0.0))
        for p in plans
    ]

    doc = render(plans, scene, scope=scope, budget=budget, templates=templates, doi_floor=doi_floor)
    return NarrativeResult(
        doc=doc,
        trace=trace,
        scene=scene,
        plans=tuple(plans),
        encodings=view_encodings(graph, trace),
    )


def parse_budget(raw: str | int | float | None) -> int | None:
    """Accept "inf"/negative/None as unlimited, otherwise a char count."""
    if raw is None:
        return None
    if isinstance(raw, str):
        if raw.lower() in ("inf", "infinity", "unlimited"):
            return None
        raw = float(raw)
    if isinstance(raw, float) and math.isinf(raw):
        return None
    value = int(raw)
    return None if value < 0 else value
