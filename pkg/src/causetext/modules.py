"""The narrative text modules.

The impact-summary side covers how interventions moved the objectives
(effect), which intermediate nodes carried the change (major effect),
which selections did nothing (no effect), and the extreme movers over
the whole network (max effect).  The projected-trends side clusters the
nonzero trajectories, verbalizes the big clusters, flags spikes on the
important nodes, and attaches encyclopedia context where available.

Each function emits :class:`SentencePlan` values; realization happens
in the renderer.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from itertools import combinations

import numpy as np

from .analytics import (
    DEFAULT_SPIKE_THETA,
    CentralityScores,
    cluster_trajectories,
    detect_spikes,
    pagerank,
)
from .model import CausalGraph, InterventionSpec, path_node_union
from .pipeline import DoiSceneGraph, extreme_changes
from .plans import (
    ChangeFrag,
    GroupFrag,
    ListFrag,
    NodeFrag,
    SentencePlan,
    TemplateFrag,
    TextFrag,
    ValueFrag,
)
from .propagation import PropagationTrace, hop_changes, net_change
from .wiki import ProviderUnavailable, WikiSummaryProvider

log = logging.getLogger(__name__)

MAJOR_EFFECT_TOP = 3
PAGERANK_PERCENTILE = 50.0
ZERO_NET = 1e-12
NGRAM_LIMIT = 12  # literal subset enumeration cap; grouping is equivalent beyond


def _dedupe_interventions(
    interventions: list[InterventionSpec],
) -> tuple[list[str], dict[str, float]]:
    order: list[str] = []
    deltas: dict[str, float] = {}
    for spec in interventions:
        if spec.node not in deltas:
            order.append(spec.node)
        deltas[spec.node] = deltas.get(spec.node, 0.0) + spec.delta
    return order, deltas


@dataclass(frozen=True)
class EffectGroup:
    sources: tuple[str, ...]  # in intervention order
    targets: tuple[str, ...]  # in objective order
    path_nodes: frozenset[str]


def effect_groups(
    graph: CausalGraph,
    interventions: list[InterventionSpec],
    objectives: list[str],
) -> list[EffectGroup]:
    """Group connected (intervention, objective) pairs for verbalization.

    For each target, sources whose causal paths share at least one node
    merge (repeated passes until stable); targets whose merged source
    sets ended up equal then merge into one group.  The result is a
    partition of all connected pairs.
    """
    sources, _ = _dedupe_interventions(interventions)
    pathsets: dict[tuple[str, str], frozenset[str]] = {}
    per_target: dict[str, list[list[str]]] = {}
    for o in objectives:
        buckets: list[list[str]] = []
        for i in sources:
            nodes = path_node_union(graph, i, o)
            if nodes:
                pathsets[(i, o)] = frozenset(nodes)
                buckets.append([i])
        # merge buckets while any two share a causal-path node
        merged = True
        while merged:
            merged = False
            for a in range(len(buckets)):
                for b in range(a + 1, len(buckets)):
                    nodes_a = frozenset().union(*(pathsets[(i, o)] for i in buckets[a]))
                    nodes_b = frozenset().union(*(pathsets[(i, o)] for i in buckets[b]))
                    if nodes_a & nodes_b:
                        buckets[a] = buckets[a] + buckets[b]
                        del buckets[b]
                        merged = True
                        break
                if merged:
                    break
        if buckets:
            per_target[o] = buckets

    groups: dict[frozenset[str], list[str]] = {}
    for o, buckets in per_target.items():
        for bucket in buckets:
            groups.setdefault(frozenset(bucket), []).append(o)

    out = []
    for source_set, targets in groups.items():
        ordered_sources = tuple(i for i in sources if i in source_set)
        ordered_targets = tuple(o for o in objectives if o in targets)
        nodes = frozenset().union(
            *(pathsets[(i, o)] for i in ordered_sources for o in ordered_targets
              if (i, o) in pathsets)
        )
        out.append(EffectGroup(ordered_sources, ordered_targets, nodes))
    out.sort(key=lambda g: min(objectives.index(o) for o in g.targets))
    return out


def _node(graph: CausalGraph, nid: str, io_nodes: frozenset[str]) -> NodeFrag:
    return NodeFrag(nid, graph.labels[nid], emphasis=nid in io_nodes)


def _node_with_value(graph, nid, value_frag, io_nodes) -> GroupFrag:
    return GroupFrag(
        (
            _node(graph, nid, io_nodes),
            TextFrag(" ("),
            value_frag,
            TextFrag(")"),
        )
    )


def _change_frag(trace: PropagationTrace, nid: str) -> ChangeFrag:
    return ChangeFrag(net=net_change(trace, nid), hops=tuple(hop_changes(trace, nid)))


def _io_nodes(interventions, objectives) -> frozenset[str]:
    return frozenset(s.node for s in interventions) | frozenset(objectives)


def effect_sentences(
    graph: CausalGraph,
    trace: PropagationTrace,
    interventions: list[InterventionSpec],
    objectives: list[str],
) -> list[SentencePlan]:
    """One sentence per effect group: every intervention with its delta,
    every reached objective with its change."""
    io = _io_nodes(interventions, objectives)
    _, deltas = _dedupe_interventions(interventions)
    plans = []
    for gi, group in enumerate(effect_groups(graph, interventions, objectives)):
        plans.append(
            SentencePlan(
                module="effect",
                template_id="effect",
                slots={
                    "interventions": ListFrag(
                        tuple(
                            _node_with_value(graph, i, ValueFrag(deltas[i]), io)
                            for i in group.sources
                        )
                    ),
                    "objectives": ListFrag(
                        tuple(
                            _node_with_value(graph, o, _change_frag(trace, o), io)
                            for o in group.targets
                        )
                    ),
                },
                order_hint=2 * gi,
            )
        )
    return plans


def major_effect_sentences(
    graph: CausalGraph,
    trace: PropagationTrace,
    interventions: list[InterventionSpec],
    objectives: list[str],
    top: int = MAJOR_EFFECT_TOP,
) -> list[SentencePlan]:
    """Per effect group, the strongest intermediate carriers of the change
    (interventions and objectives themselves excluded)."""
    io = _io_nodes(interventions, objectives)
    plans = []
    for gi, group in enumerate(effect_groups(graph, interventions, objectives)):
        intermediates = sorted(
            (nid for nid in group.path_nodes if nid not in io),
            key=lambda nid: (-abs(net_change(trace, nid)), nid),
        )[:top]
        if not intermediates:
            continue
        plans.append(
            SentencePlan(
                module="major-effect",
                template_id="major_effect",
                slots={
                    "carriers": ListFrag(
                        tuple(
                            _node_with_value(graph, nid, _change_frag(trace, nid), io)
                            for nid in intermediates
                        )
                    )
                },
                order_hint=2 * gi + 1,
            )
        )
    return plans


def no_effect_sentences(
    graph: CausalGraph,
    trace: PropagationTrace,
    interventions: list[InterventionSpec],
    objectives: list[str],
) -> list[SentencePlan]:
    """Unmoved objectives, plus disconnected (intervention, objective)
    pairs compressed into source tuples.

    Compression enumerates subsets of the sorted source list and counts
    how many targets each subset covers exactly (the subset equals the
    target's full set of unreachable sources); largest coverage first.
    """
    io = _io_nodes(interventions, objectives)
    sources, _ = _dedupe_interventions(interventions)
    plans = []

    unmoved = [o for o in objectives if abs(net_change(trace, o)) <= ZERO_NET]
    if unmoved:
        plans.append(
            SentencePlan(
                module="no-effect",
                template_id="no_effect_unmoved",
                slots={
                    "objectives": ListFrag(tuple(_node(graph, o, io) for o in unmoved))
                },
                order_hint=1000,
            )
        )

    disconnected: dict[str, frozenset[str]] = {}
    for o in objectives:
        gaps = frozenset(
            i for i in sources if not path_node_union(graph, i, o)
        )
        if gaps:
            disconnected[o] = gaps

    tuples: list[tuple[int, tuple[str, ...], list[str]]] = []
    if disconnected:
        if len(sources) <= NGRAM_LIMIT:
            for n in range(1, len(sources) + 1):
                for combo in combinations(sorted(sources), n):
                    matched = [o for o in objectives if disconnected.get(o) == frozenset(combo)]
                    if matched:
                        tuples.append((len(matched), combo, matched))
        else:
            grouped: dict[frozenset[str], list[str]] = {}
            for o, gaps in disconnected.items():
                grouped.setdefault(gaps, []).append(o)
            for gaps, matched in grouped.items():
                tuples.append((len(matched), tuple(sorted(gaps)), matched))
        tuples.sort(key=lambda t: (-t[0], t[1]))

    for ti, (_, combo, matched) in enumerate(tuples):
        plans.append(
            SentencePlan(
                module="no-effect",
                template_id="no_effect_pairs",
                slots={
                    "sources": ListFrag(tuple(_node(graph, i, io) for i in combo)),
                    "targets": ListFrag(
                        tuple(_node(graph, o, io) for o in matched)
                    ),
                },
                order_hint=1001 + ti,
            )
        )
    return plans


def max_effect_sentences(
    trace: PropagationTrace,
    interventions: list[InterventionSpec],
    objectives: list[str],
    graph: CausalGraph,
) -> list[SentencePlan]:
    """The single most positive and most negative movers over all nodes,
    never an intervened node; nothing when the trace is flat."""
    io = _io_nodes(interventions, objectives)
    intervened = [s.node for s in interventions]
    plans = []
    for kind, nid, _net in extreme_changes(trace, intervened):
        plans.append(
            SentencePlan(
                module="max-effect",
                template_id=(
                    "max_effect_positive" if kind == "max-positive" else "max_effect_negative"
                ),
                slots={
                    "node": _node(graph, nid, io),
                    "change": _change_frag(trace, nid),
                },
                order_hint=2000 if kind == "max-positive" else 2001,
            )
        )
    return plans


def classify_shape(centroid: tuple[float, ...]) -> str:
    """Four-label trend vocabulary for a cluster centroid."""
    lo, hi = min(centroid), max(centroid)
    spread = hi - lo
    net = centroid[-1] - centroid[0]
    if spread > 0:
        peak = max(range(len(centroid)), key=lambda i: centroid[i])
        if (
            0 < peak < len(centroid) - 1
            and centroid[peak] - centroid[-1] > 0.25 * spread
            and centroid[peak] - centroid[0] > 0.25 * spread
        ):
            return "peak-then-decline"
        prefix = centroid[: max(2, len(centroid) // 3)]
        if max(prefix) - min(prefix) < 0.1 * spread and net > 0.25 * spread:
            return "flat-then-rise"
    return "falling" if net < 0 else "rising"


_SHAPE_KEYS = {
    "rising": "shape_rising",
    "falling": "shape_falling",
    "peak-then-decline": "shape_peak_then_decline",
    "flat-then-rise": "shape_flat_then_rise",
}


def time_series_sentences(
    trace: PropagationTrace,
    graph: CausalGraph,
    centrality: CentralityScores | None = None,
    seed: int = 0,
    percentile: float = PAGERANK_PERCENTILE,
    io_nodes: frozenset[str] = frozenset(),
) -> list[SentencePlan]:
    """Cluster the nonzero trajectories and verbalize clusters in size
    order, naming only nodes above the centrality percentile.

    The percentile cut is taken over the whole graph's scores, so a
    node's importance is judged against the full system rather than the
    subset that happened to move.
    """
    moved = [nid for nid in graph.node_ids if any(trace.series[nid])]
    if len(moved) < 2:
        return []
    clustering = cluster_trajectories({nid: trace.series[nid] for nid in moved}, seed=seed)
    if centrality is None:
        centrality = pagerank(graph)
    cut = float(np.percentile(list(centrality.scores.values()), percentile))

    clusters = [
        (c, clustering.members(c)) for c in range(clustering.k)
    ]
    clusters.sort(key=lambda t: (-len(t[1]), t[1][0]))

    plans = []
    for c, members in clusters:
        named = [nid for nid in members if centrality.scores[nid] >= cut]
        if not named:
            continue
        shape = classify_shape(clustering.centroids[c])
        plans.append(
            SentencePlan(
                module="time-series",
                template_id="time_series",
                slots={
                    "nodes": ListFrag(tuple(_node(graph, nid, io_nodes) for nid in named)),
                    "shape": TemplateFrag(_SHAPE_KEYS[shape]),
                },
                order_hint=len(plans),
            )
        )
    return plans


def spike_sentences(
    trace: PropagationTrace,
    important_nodes: list[str],
    graph: CausalGraph,
    theta: float = DEFAULT_SPIKE_THETA,
    io_nodes: frozenset[str] = frozenset(),
) -> list[SentencePlan]:
    """One sentence per detected spike on the already-important nodes."""
    plans = []
    for nid in important_nodes:
        for ev in detect_spikes(trace.series[nid], theta):
            signed = ev.magnitude if ev.direction == "rise" else -ev.magnitude
            plans.append(
                SentencePlan(
                    module="spike",
                    template_id="spike_rise" if ev.direction == "rise" else "spike_fall",
                    slots={
                        "node": _node(graph, nid, io_nodes),
                        "time": TextFrag(str(ev.time)),
                        "magnitude": ValueFrag(signed),
                    },
                    order_hint=len(plans),
                )
            )
    return plans


def wiki_sentences(
    nodes: list[str],
    kb: WikiSummaryProvider,
    graph: CausalGraph,
) -> list[SentencePlan]:
    """Context sentences for nodes the provider knows; lookup failures
    skip the whole module rather than break the narrative."""
    plans = []
    for nid in nodes:
        label = graph.labels[nid]
        try:
            summary = kb.get(label)
        except ProviderUnavailable as exc:
            log.warning("context summaries skipped: %s", exc)
            return []
        if summary is None:
            continue
        plans.append(
            SentencePlan(
                module="wiki",
                template_id="wiki",
                slots={
                    "node": NodeFrag(nid, label),
                    "summary": TextFrag(summary),
                },
                order_hint=len(plans),
            )
        )
    return plans


def correlation_sentences(
    scene: DoiSceneGraph, graph: CausalGraph, io_nodes: frozenset[str] = frozenset()
) -> list[SentencePlan]:
    """Sentences for correlation clauses; rendered after everything else
    since the figure-style narrative never leads with them."""
    plans = []
    seen: set[tuple[str, ...]] = set()
    for clause in scene.all_clauses():
        if clause.category != "correlation" or clause.subjects in seen:
            continue
        seen.add(clause.subjects)
        plans.append(
            SentencePlan(
                module="correlation",
                template_id="correlation",
                slots={
                    "nodes": ListFrag(
                        tuple(_node(graph, nid, io_nodes) for nid in clause.subjects)
                    )
                },
                order_hint=9000 + len(plans),
                doi=clause.doi,
            )
        )
    return plans


def impact_summary_plans(
    graph: CausalGraph,
    trace: PropagationTrace,
    interventions: list[InterventionSpec],
    objectives: list[str],
) -> list[SentencePlan]:
    """Effect and major-effect sentences interleaved per group, then the
    no-effect and max-effect statements."""
    plans = effect_sentences(graph, trace, interventions, objectives) + major_effect_sentences(
        graph, trace, interventions, objectives
    )
    plans.sort(key=lambda p: p.order_hint)
    plans += no_effect_sentences(graph, trace, interventions, objectives)
    plans += max_effect_sentences(trace, interventions, objectives, graph)
    return plans


def projected_trend_plans(
    trace: PropagationTrace,
    graph: CausalGraph,
    centrality: CentralityScores | None = None,
    seed: int = 0,
    kb: WikiSummaryProvider | None = None,
    io_nodes: frozenset[str] = frozenset(),
    theta: float = DEFAULT_SPIKE_THETA,
    percentile: float = PAGERANK_PERCENTILE,
) -> list[SentencePlan]:
    """Time-series sentences with their spike and context sentences
    interleaved right after each cluster's sentence."""
    out = []
    hint = 3000
    for ts_plan in time_series_sentences(
        trace, graph, centrality, seed, percentile, io_nodes
    ):
        out.append(replace(ts_plan, order_hint=hint))
        hint += 1
        cluster_nodes = list(ts_plan.nodes)
        for plan in spike_sentences(trace, cluster_nodes, graph, theta, io_nodes):
            out.append(replace(plan, order_hint=hint))
            hint += 1
        if kb is not None:
            for plan in wiki_sentences(cluster_nodes, kb, graph):
                out.append(replace(plan, order_hint=hint))
                hint += 1
    return out
