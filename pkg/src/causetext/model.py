"""Causal network model: nodes, weighted directed edges, interventions.

A graph is a directed acyclic network of processes.  Edge weights are
signed reals in [-1, 1]: the sign is the polarity of the influence and
the magnitude is the fraction of a source node's change passed to the
target per time step.  Graphs are immutable once constructed; edits
produce new graph values.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping

MAX_PATHS = 10_000


class GraphFormatError(ValueError):
    """Raised when a graph document does not match the expected schema."""


class GraphValidationError(ValueError):
    """Raised when a structurally parseable graph violates an invariant."""

    def __init__(self, report: "ValidationReport"):
        super().__init__("; ".join(v.message for v in report.violations))
        self.report = report


class UnknownNodeError(KeyError):
    """Raised when an operation references a node id not in the graph."""


@dataclass(frozen=True)
class ProcessNode:
    id: str
    label: str
    baseline: float = 0.0


@dataclass(frozen=True)
class CausalEdge:
    source: str
    target: str
    weight: float


@dataclass(frozen=True)
class InterventionSpec:
    """A user-imposed perturbation on one node.

    ``delta`` is a signed percentage change in [-100, 100].  A ``point``
    intervention injects the delta at time step ``start`` only; a
    ``sustained`` one injects it at every step from ``start`` onward.
    """

    node: str
    delta: float
    start: int = 0
    kind: str = "sustained"  # "point" | "sustained"


@dataclass(frozen=True)
class Violation:
    rule: str
    ids: tuple[str, ...]
    message: str


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, rule: str, ids: Iterable[str], message: str) -> None:
        self.violations.append(Violation(rule, tuple(ids), message))

    def messages(self) -> list[str]:
        return [v.message for v in self.violations]


@dataclass(frozen=True)
class CausalGraph:
    nodes: tuple[ProcessNode, ...]
    edges: tuple[CausalEdge, ...]

    @cached_property
    def node_ids(self) -> tuple[str, ...]:
        return tuple(n.id for n in self.nodes)

    @cached_property
    def labels(self) -> dict[str, str]:
        return {n.id: n.label for n in self.nodes}

    @cached_property
    def successors(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, list[str]] = {n.id: [] for n in self.nodes}
        for e in self.edges:
            if e.source in out:
                out[e.source].append(e.target)
        return {u: tuple(sorted(vs)) for u, vs in out.items()}

    @cached_property
    def predecessors(self) -> dict[str, tuple[str, ...]]:
        inc: dict[str, list[str]] = {n.id: [] for n in self.nodes}
        for e in self.edges:
            if e.target in inc:
                inc[e.target].append(e.source)
        return {v: tuple(sorted(us)) for v, us in inc.items()}

    @cached_property
    def weights(self) -> dict[tuple[str, str], float]:
        return {(e.source, e.target): e.weight for e in self.edges}

    def __contains__(self, node_id: str) -> bool:
        return node_id in self.labels

    def require(self, node_id: str) -> None:
        if node_id not in self.labels:
            raise UnknownNodeError(node_id)

    def reachable_from(self, sources: Iterable[str]) -> set[str]:
        """All nodes with a directed path from any of ``sources`` (inclusive)."""
        seen: set[str] = set()
        stack = [s for s in sources if s in self.labels]
        while stack:
            u = stack.pop()
            if u in seen:
                continue
            seen.add(u)
            stack.extend(self.successors[u])
        return seen

    def to_doc(self) -> dict:
        return {
            "nodes": [
                {"id": n.id, "label": n.label, "baseline": n.baseline}
                for n in self.nodes
            ],
            "edges": [
                {"source": e.source, "target": e.target, "weight": e.weight}
                for e in self.edges
            ],
        }


def validate_graph(graph: CausalGraph) -> ValidationReport:
    """Check all structural invariants; never raises, reports every violation."""
    report = ValidationReport()

    seen_ids: set[str] = set()
    for n in graph.nodes:
        if n.id in seen_ids:
            report.add("duplicate-node-id", [n.id], f"duplicate node id {n.id}")
        seen_ids.add(n.id)
        if not n.label:
            report.add("empty-label", [n.id], f"node {n.id} has an empty label")

    seen_edges: set[tuple[str, str]] = set()
    for e in graph.edges:
        if e.source == e.target:
            report.add("irreflexive", [e.source], f"irreflexive violation at {e.source}")
        key = (e.source, e.target)
        if key in seen_edges:
            report.add(
                "duplicate-edge", key, f"duplicate edge {e.source} -> {e.target}"
            )
        seen_edges.add(key)
        for endpoint in key:
            if endpoint not in seen_ids:
                report.add(
                    "unknown-endpoint",
                    [endpoint],
                    f"edge endpoint {endpoint} is not a declared node",
                )
        if not abs(e.weight) <= 1.0:
            report.add(
                "weight-range",
                key,
                f"edge {e.source} -> {e.target} has weight {e.weight} outside [-1, 1]",
            )

    cycle = _find_cycle(graph)
    if cycle:
        report.add("cycle", cycle, "cycle " + "[" + ",".join(cycle) + "]")
    return report


def _find_cycle(graph: CausalGraph) -> tuple[str, ...] | None:
    """Return one directed cycle as a node sequence, or None if acyclic."""
    WHITE, GREY, BLACK = 0, 1, 2
    color = {n.id: WHITE for n in graph.nodes}
    # Ignore self-loops and edges into undeclared nodes here; those are
    # reported by their own rules.
    succ: dict[str, list[str]] = {n.id: [] for n in graph.nodes}
    for e in graph.edges:
        if e.source != e.target and e.source in color and e.target in color:
            succ[e.source].append(e.target)
    for vs in succ.values():
        vs.sort()

    parent: dict[str, str] = {}
    for root in sorted(color):
        if color[root] != WHITE:
            continue
        stack: list[tuple[str, int]] = [(root, 0)]
        color[root] = GREY
        while stack:
            u, i = stack[-1]
            if i < len(succ[u]):
                stack[-1] = (u, i + 1)
                v = succ[u][i]
                if color[v] == GREY:
                    cyc = [v]
                    w = u
                    while w != v:
                        cyc.append(w)
                        w = parent[w]
                    cyc.reverse()
                    # rotate so the lexicographically smallest id leads
                    k = cyc.index(min(cyc))
                    return tuple(cyc[k:] + cyc[:k])
                if color[v] == WHITE:
                    color[v] = GREY
                    parent[v] = u
                    stack.append((v, 0))
            else:
                color[u] = BLACK
                stack.pop()
    return None


@dataclass(frozen=True)
class PathEnumeration:
    paths: tuple[tuple[str, ...], ...]
    truncated: bool


def enumerate_paths(
    graph: CausalGraph, source: str, target: str, max_paths: int = MAX_PATHS
) -> PathEnumeration:
    """All simple directed paths source -> target, lexicographic, capped.

    Enumeration is bounded by ``max_paths`` to keep worst-case diamond
    stacks tractable; ``truncated`` reports whether the cap was hit.
    """
    graph.require(source)
    graph.require(target)
    paths: list[tuple[str, ...]] = []
    truncated = False

    path = [source]
    on_path = {source}

    def dfs(u: str) -> bool:
        nonlocal truncated
        if u == target:
            paths.append(tuple(path))
            if len(paths) >= max_paths:
                truncated = True
                return False
            return True
        for v in graph.successors[u]:
            if v in on_path:
                continue
            path.append(v)
            on_path.add(v)
            keep_going = dfs(v)
            path.pop()
            on_path.remove(v)
            if not keep_going:
                return False
        return True

    dfs(source)
    return PathEnumeration(tuple(paths), truncated)


def causal_paths(graph: CausalGraph, source: str, target: str) -> list[list[str]]:
    """All simple directed paths from source to target, in deterministic
    lexicographic order; empty list when the target is unreachable."""
    return [list(p) for p in enumerate_paths(graph, source, target).paths]


def path_node_union(graph: CausalGraph, source: str, target: str) -> set[str]:
    """Union of node ids over all simple paths source -> target.

    Equals {v : source reaches v and v reaches target}, which avoids
    enumerating the (possibly exponential) path set.
    """
    graph.require(source)
    graph.require(target)
    fwd = graph.reachable_from([source])
    if target not in fwd:
        return set()
    back: set[str] = set()
    stack = [target]
    while stack:
        v = stack.pop()
        if v in back:
            continue
        back.add(v)
        stack.extend(graph.predecessors[v])
    return fwd & back


def _require_keys(obj: Mapping, allowed: set[str], required: set[str], where: str):
    unknown = set(obj) - allowed
    if unknown:
        raise GraphFormatError(f"unknown field(s) {sorted(unknown)} in {where}")
    missing = required - set(obj)
    if missing:
        raise GraphFormatError(f"missing field(s) {sorted(missing)} in {where}")


def graph_from_doc(doc: Mapping, validate: bool = True) -> CausalGraph:
    """Build a graph from a parsed document with ``nodes`` and ``edges`` arrays.

    Unknown fields anywhere in the document are rejected.  When
    ``validate`` is set (the default) a graph violating any structural
    invariant raises :class:`GraphValidationError`.
    """
    if not isinstance(doc, Mapping):
        raise GraphFormatError("graph document must be an object")
    _require_keys(doc, {"nodes", "edges"}, {"nodes", "edges"}, "graph document")
    if not isinstance(doc["nodes"], list) or not isinstance(doc["edges"], list):
        raise GraphFormatError("'nodes' and 'edges' must be arrays")

    nodes = []
    for i, nd in enumerate(doc["nodes"]):
        if not isinstance(nd, Mapping):
            raise GraphFormatError(f"nodes[{i}] must be an object")
        _require_keys(nd, {"id", "label", "baseline"}, {"id", "label"}, f"nodes[{i}]")
        if not isinstance(nd["id"], str):
            raise GraphFormatError(f"nodes[{i}].id must be a string")
        if not isinstance(nd["label"], str):
            raise GraphFormatError(f"nodes[{i}].label must be a string")
        baseline = nd.get("baseline", 0.0)
        if not isinstance(baseline, (int, float)) or isinstance(baseline, bool):
            raise GraphFormatError(f"nodes[{i}].baseline must be a number")
        nodes.append(ProcessNode(nd["id"], nd["label"], float(baseline)))

    edges = []
    for i, ed in enumerate(doc["edges"]):
        if not isinstance(ed, Mapping):
            raise GraphFormatError(f"edges[{i}] must be an object")
        _require_keys(
            ed, {"source", "target", "weight"}, {"source", "target", "weight"}, f"edges[{i}]"
        )
        if not isinstance(ed["source"], str) or not isinstance(ed["target"], str):
            raise GraphFormatError(f"edges[{i}] endpoints must be strings")
        w = ed["weight"]
        if not isinstance(w, (int, float)) or isinstance(w, bool):
            raise GraphFormatError(f"edges[{i}].weight must be a number")
        edges.append(CausalEdge(ed["source"], ed["target"], float(w)))

    graph = CausalGraph(tuple(nodes), tuple(edges))
    if validate:
        report = validate_graph(graph)
        if not report.ok:
            raise GraphValidationError(report)
    return graph


def load_graph(path: str | Path) -> CausalGraph:
    """Load and validate a graph from a UTF-8 JSON file."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"invalid JSON in {path}: {exc}") from exc
    return graph_from_doc(doc)


def interventions_from_doc(doc) -> list[InterventionSpec]:
    """Parse an array of intervention objects; strict about fields."""
    if not isinstance(doc, list):
        raise GraphFormatError("interventions must be an array")
    specs = []
    for i, item in enumerate(doc):
        if not isinstance(item, Mapping):
            raise GraphFormatError(f"interventions[{i}] must be an object")
        _require_keys(
            item,
            {"node", "delta", "start", "kind"},
            {"node", "delta"},
            f"interventions[{i}]",
        )
        kind = item.get("kind", "sustained")
        if kind not in ("point", "sustained"):
            raise GraphFormatError(f"interventions[{i}].kind must be point or sustained")
        specs.append(
            InterventionSpec(
                node=item["node"],
                delta=float(item["delta"]),
                start=int(item.get("start", 0)),
                kind=kind,
            )
        )
    return specs


def validate_selection(
    graph: CausalGraph,
    interventions: list[InterventionSpec],
    objectives: list[str],
    horizon: int,
) -> list[str]:
    """Problems with an (interventions, objectives) selection; empty if valid."""
    problems = []
    for spec in interventions:
        if spec.node not in graph:
            problems.append(f"intervention on unknown node {spec.node}")
        if not -100.0 <= spec.delta <= 100.0:
            problems.append(f"intervention delta {spec.delta} outside [-100, 100]")
        if not 0 <= spec.start < horizon:
            problems.append(
                f"intervention start {spec.start} outside [0, horizon={horizon})"
            )
        if spec.kind not in ("point", "sustained"):
            problems.append(f"intervention kind {spec.kind!r} unknown")
    seen = set()
    for o in objectives:
        if o not in graph:
            problems.append(f"objective {o} is not a graph node")
        if o in seen:
            problems.append(f"duplicate objective {o}")
        seen.add(o)
    return problems
