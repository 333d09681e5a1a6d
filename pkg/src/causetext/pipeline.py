"""Clause extraction, degree-of-interest scoring, scene-graph ordering,
and aggregation.

A clause is one atomic piece of causality information: a cause-effect
statement between an intervened node and an objective, a life-cycle
trend of one node, a connectivity gap, or a correlation between nodes
changing in sync without a connecting path.  Clauses are scored with a
degree-of-interest function, grouped per process into a scene graph,
and merged when they share endpoints so the rendered text stays terse.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .analytics import CentralityScores, detect_spikes
from .model import CausalGraph, InterventionSpec, enumerate_paths, path_node_union
from .propagation import PropagationTrace, hop_changes, net_change

DEFAULT_DOI_WEIGHTS = (0.5, 0.2, 0.3)
TREND_EPSILON = 1.0  # percentage points; |net| below this counts as flat

CAUSE_EFFECT = "cause-effect"
CORRELATION = "correlation"
LIFE_CYCLE = "life-cycle"
CONNECTIVITY = "connectivity"


@dataclass
class Clause:
    category: str
    subjects: tuple[str, ...]
    objects: tuple[str, ...] = ()
    payload: dict = field(default_factory=dict)
    doi: float = 0.0

    @property
    def primary(self) -> str:
        """The process this clause is filed under in the scene graph."""
        return self.objects[0] if self.objects else self.subjects[0]

    @property
    def mentions(self) -> tuple[str, ...]:
        return self.subjects + self.objects

    def atoms(self) -> list[tuple[str, str, str | None]]:
        """Atomic (category, subject, object) relations this clause states.

        Correlation is a symmetric pairwise relation, so a clause over a
        synced group states one atom per unordered pair; merges are only
        ever applied to groups sharing one sync signature, where every
        pair was individually observed.
        """
        if self.category == CORRELATION:
            members = sorted(set(self.subjects))
            return [
                (self.category, u, v)
                for i, u in enumerate(members)
                for v in members[i + 1 :]
            ]
        if self.objects:
            return [(self.category, s, o) for s in self.subjects for o in self.objects]
        return [(self.category, s, None) for s in self.subjects]


def trend_label(series: tuple[float, ...]) -> str:
    """rising / falling / flat by net change, or spiking when the spike
    detector fires on the series."""
    if detect_spikes(series):
        return "spiking"
    net = series[-1] - series[0]
    if net > TREND_EPSILON:
        return "rising"
    if net < -TREND_EPSILON:
        return "falling"
    return "flat"


def _sign(x: float) -> int:
    return (x > 0) - (x < 0)


def extract_clauses(
    graph: CausalGraph,
    trace: PropagationTrace,
    interventions: list[InterventionSpec],
    objectives: list[str],
) -> list[Clause]:
    """Pull every candidate clause out of a finished propagation run.

    Emits cause-effect clauses for connected (intervention, objective)
    pairs, connectivity clauses for disconnected pairs, one life-cycle
    clause per node, extreme-change clauses over the whole network, and
    correlation clauses for path-less node pairs that moved in sync.
    """
    if set(trace.series) != set(graph.node_ids):
        raise ValueError("trace does not match graph: node sets differ")

    intervened = []
    deltas: dict[str, float] = {}
    for spec in interventions:
        if spec.node not in deltas:
            intervened.append(spec.node)
        deltas[spec.node] = deltas.get(spec.node, 0.0) + spec.delta

    clauses: list[Clause] = []

    for i in intervened:
        for o in objectives:
            nodes_between = path_node_union(graph, i, o)
            if nodes_between:
                enum = enumerate_paths(graph, i, o)
                clauses.append(
                    Clause(
                        category=CAUSE_EFFECT,
                        subjects=(i,),
                        objects=(o,),
                        payload={
                            "paths": enum.paths,
                            "paths_truncated": enum.truncated,
                            "path_nodes": tuple(sorted(nodes_between)),
                            "first_arrival": min(len(p) - 1 for p in enum.paths),
                            "deltas": {i: deltas[i]},
                            "net_changes": {o: net_change(trace, o)},
                        },
                    )
                )
            else:
                clauses.append(
                    Clause(
                        category=CONNECTIVITY,
                        subjects=(i,),
                        objects=(o,),
                        payload={
                            "deltas": {i: deltas[i]},
                            "net_changes": {o: net_change(trace, o)},
                        },
                    )
                )

    for nid in graph.node_ids:
        series = trace.series[nid]
        label = trend_label(series)
        clauses.append(
            Clause(
                category=LIFE_CYCLE,
                subjects=(nid,),
                payload={
                    "trend": label,
                    "net_changes": {nid: net_change(trace, nid)},
                    "spikes": tuple(detect_spikes(series)),
                },
            )
        )

    clauses.extend(_extreme_clauses(trace, intervened))
    clauses.extend(_correlation_clauses(graph, trace, intervened))

    counts: dict[str, int] = {}
    for c in clauses:
        for nid in set(c.mentions):
            counts[nid] = counts.get(nid, 0) + 1
    for c in clauses:
        c.payload["occurrences"] = counts[c.primary]
    return clauses


def extreme_changes(
    trace: PropagationTrace, exclude: tuple[str, ...] | list[str] = ()
) -> list[tuple[str, str, float]]:
    """The most positive and most negative movers over the whole network.

    Returns up to two ("max-positive" | "max-negative", node, net) rows;
    excluded nodes (typically the intervened ones) never qualify, and a
    side with no mover in its direction is simply absent.
    """
    candidates = [
        (nid, net_change(trace, nid)) for nid in trace.series if nid not in exclude
    ]
    out = []
    positives = sorted(
        ((nid, net) for nid, net in candidates if net > 0),
        key=lambda t: (-t[1], t[0]),
    )
    negatives = sorted(
        ((nid, net) for nid, net in candidates if net < 0),
        key=lambda t: (t[1], t[0]),
    )
    if positives:
        out.append(("max-positive", positives[0][0], positives[0][1]))
    if negatives:
        out.append(("max-negative", negatives[0][0], negatives[0][1]))
    return out


def _extreme_clauses(trace: PropagationTrace, intervened: list[str]) -> list[Clause]:
    return [
        Clause(
            category=LIFE_CYCLE,
            subjects=(nid,),
            payload={"extreme": kind, "net_changes": {nid: net}},
        )
        for kind, nid, net in extreme_changes(trace, intervened)
    ]


def _correlation_clauses(
    graph: CausalGraph, trace: PropagationTrace, intervened: list[str]
) -> list[Clause]:
    """Node pairs with no directed path either way whose nonzero hop
    deltas land on the same steps with the same signs.

    Pairs where both nodes are intervened are skipped: exogenous inputs
    moving together is the user's doing, not a hidden linkage.
    """
    moved = [nid for nid in graph.node_ids if any(trace.series[nid])]
    reach = {nid: graph.reachable_from([nid]) for nid in moved}
    sig: dict[str, tuple[tuple[int, int], ...]] = {}
    for nid in moved:
        hops = hop_changes(trace, nid)
        sig[nid] = tuple((t, _sign(d)) for t, d in enumerate(hops) if d != 0.0)

    out = []
    for a_i, u in enumerate(sorted(moved)):
        for v in sorted(moved)[a_i + 1 :]:
            if u in intervened and v in intervened:
                continue
            if v in reach[u] or u in reach[v]:
                continue
            if sig[u] and sig[u] == sig[v]:
                out.append(
                    Clause(
                        category=CORRELATION,
                        subjects=(u, v),
                        payload={
                            "steps": tuple(t for t, _ in sig[u]),
                            "net_changes": {
                                u: net_change(trace, u),
                                v: net_change(trace, v),
                            },
                        },
                    )
                )
    return out


def doi_score(
    clause: Clause,
    weights: tuple[float, float, float] = DEFAULT_DOI_WEIGHTS,
    *,
    magnitude_norm: float = 1.0,
    occurrence_norm: float = 1.0,
    centrality: CentralityScores | None = None,
    io_nodes: frozenset[str] = frozenset(),
) -> float:
    """Interest of one clause under (magnitude, occurrence, centrality)
    weights; clauses touching an intervention or objective get a +1 bias
    that forces them above all unbiased clauses."""
    alpha, beta, gamma = weights
    if alpha < 0 or beta < 0 or gamma < 0:
        raise ValueError("DOI weights must be non-negative")
    if abs(alpha + beta + gamma - 1.0) > 1e-9:
        raise ValueError("DOI weights must sum to 1")

    magnitude = max((abs(v) for v in clause.payload.get("net_changes", {}).values()), default=0.0)
    occurrences = clause.payload.get("occurrences", 0)
    pr = centrality.scores.get(clause.primary, 0.0) if centrality else 0.0

    score = (
        alpha * (magnitude / magnitude_norm if magnitude_norm > 0 else 0.0)
        + beta * (occurrences / occurrence_norm if occurrence_norm > 0 else 0.0)
        + gamma * pr
    )
    if any(nid in io_nodes for nid in clause.mentions):
        score += 1.0
    return score


def score_clauses(
    clauses: list[Clause],
    trace: PropagationTrace,
    centrality: CentralityScores,
    interventions: list[InterventionSpec],
    objectives: list[str],
    weights: tuple[float, float, float] = DEFAULT_DOI_WEIGHTS,
) -> list[Clause]:
    """Assign a DOI to every clause in place and return the list."""
    magnitude_norm = max(
        (abs(net_change(trace, nid)) for nid in trace.series), default=0.0
    )
    occurrence_norm = max((c.payload.get("occurrences", 0) for c in clauses), default=0)
    io_nodes = frozenset(spec.node for spec in interventions) | frozenset(objectives)
    for c in clauses:
        c.doi = doi_score(
            c,
            weights,
            magnitude_norm=magnitude_norm,
            occurrence_norm=float(occurrence_norm),
            centrality=centrality,
            io_nodes=io_nodes,
        )
    return clauses


@dataclass(frozen=True)
class SceneGroup:
    node: str
    clauses: tuple[Clause, ...]

    @property
    def max_doi(self) -> float:
        return max(c.doi for c in self.clauses)


@dataclass(frozen=True)
class DoiSceneGraph:
    groups: tuple[SceneGroup, ...]

    def all_clauses(self) -> list[Clause]:
        return [c for g in self.groups for c in g.clauses]


def _clause_sort_key(c: Clause):
    return (-c.doi, c.category, c.subjects, c.objects)


def build_scene_graph(clauses: list[Clause]) -> DoiSceneGraph:
    """Group clauses under their primary process and order everything by
    descending DOI, breaking ties lexicographically by node id."""
    by_node: dict[str, list[Clause]] = {}
    for c in clauses:
        by_node.setdefault(c.primary, []).append(c)

    groups = []
    for node, members in by_node.items():
        members.sort(key=_clause_sort_key)
        groups.append(SceneGroup(node, tuple(members)))
    groups.sort(key=lambda g: (-g.max_doi, g.node))
    return DoiSceneGraph(tuple(groups))


def _discriminator(c: Clause) -> tuple:
    if c.category == LIFE_CYCLE:
        if "extreme" in c.payload:
            return ("extreme", c.payload["extreme"])
        return ("trend", c.payload.get("trend"))
    if c.category == CORRELATION:
        return ("steps", c.payload.get("steps"))
    return ()


def _merge_payload(members: list[Clause]) -> dict:
    merged: dict = {}
    for c in members:
        p = c.payload
        for key in ("deltas", "net_changes"):
            if key in p:
                merged.setdefault(key, {}).update(p[key])
        if "paths" in p:
            merged["paths"] = tuple(
                sorted(set(merged.get("paths", ())) | set(p["paths"]))
            )
            merged["paths_truncated"] = merged.get("paths_truncated", False) or p[
                "paths_truncated"
            ]
        if "path_nodes" in p:
            merged["path_nodes"] = tuple(
                sorted(set(merged.get("path_nodes", ())) | set(p["path_nodes"]))
            )
        if "first_arrival" in p:
            merged["first_arrival"] = min(
                merged.get("first_arrival", p["first_arrival"]), p["first_arrival"]
            )
        if "spikes" in p:
            merged["spikes"] = merged.get("spikes", ()) + p["spikes"]
        for key in ("trend", "extreme", "steps"):
            if key in p:
                merged[key] = p[key]
        merged["occurrences"] = max(merged.get("occurrences", 0), p.get("occurrences", 0))
    return merged


def _merge_by(clauses: list[Clause], side: str) -> list[Clause]:
    buckets: dict[tuple, list[Clause]] = {}
    for c in clauses:
        shared = c.objects if side == "objects" else c.subjects
        key = (c.category, tuple(sorted(shared)), _discriminator(c))
        buckets.setdefault(key, []).append(c)

    out = []
    for members in buckets.values():
        if len(members) == 1:
            out.append(members[0])
            continue
        subjects = tuple(sorted({s for m in members for s in m.subjects}))
        objects = tuple(sorted({o for m in members for o in m.objects}))
        out.append(
            replace(
                members[0],
                subjects=subjects,
                objects=objects,
                payload=_merge_payload(members),
                doi=max(m.doi for m in members),
            )
        )
    return out


def aggregate(scene: DoiSceneGraph) -> DoiSceneGraph:
    """Merge clauses of one category that share their object set or their
    subject set, iterating to a fixed point so re-aggregation is a no-op.

    A merged clause keeps the union of endpoints and the max DOI of its
    members; the atomic relations stated by the scene never change.
    """
    clauses = scene.all_clauses()
    while True:
        before = len(clauses)
        clauses = _merge_by(clauses, "objects")
        clauses = _merge_by(clauses, "subjects")
        if len(clauses) == before:
            break
    return build_scene_graph(clauses)
