"""Numerical subroutines behind the narrative: centrality, trajectory
clustering, and spike detection.

All functions are deterministic.  Clustering uses farthest-point seeding
from a fixed RNG seed because downstream narrative output is checked
against golden files.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import CausalGraph

DEFAULT_DAMPING = 0.85
DEFAULT_TOLERANCE = 1e-8
DEFAULT_SPIKE_THETA = 0.4
KMEANS_MAX_ITER = 100


@dataclass(frozen=True)
class CentralityScores:
    scores: dict[str, float]
    damping: float = DEFAULT_DAMPING
    tolerance: float = DEFAULT_TOLERANCE

    def __getitem__(self, node: str) -> float:
        return self.scores[node]


def pagerank(
    graph: CausalGraph,
    damping: float = DEFAULT_DAMPING,
    tolerance: float = DEFAULT_TOLERANCE,
) -> CentralityScores:
    """Structural centrality by power iteration.

    Edge direction is followed as drawn and edge weights are ignored.
    Dangling nodes redistribute their mass uniformly.  Iteration stops
    when the L1 change between successive score vectors drops below
    ``tolerance``; scores always sum to 1.
    """
    ids = list(graph.node_ids)
    n = len(ids)
    if n == 0:
        raise ValueError("pagerank requires a non-empty graph")
    index = {nid: i for i, nid in enumerate(ids)}

    out_degree = np.zeros(n)
    for e in graph.edges:
        out_degree[index[e.source]] += 1.0

    # column-stochastic link matrix: m[j, i] = 1/outdeg(i) for edge i -> j
    m = np.zeros((n, n))
    for e in graph.edges:
        i, j = index[e.source], index[e.target]
        m[j, i] = 1.0 / out_degree[i]

    dangling = out_degree == 0.0
    r = np.full(n, 1.0 / n)
    for _ in range(1000):
        spread = m @ r + r[dangling].sum() / n
        r_next = damping * spread + (1.0 - damping) / n
        if np.abs(r_next - r).sum() < tolerance:
            r = r_next
            break
        r = r_next
    return CentralityScores({nid: float(r[index[nid]]) for nid in ids}, damping, tolerance)


@dataclass(frozen=True)
class ClusteringResult:
    k: int
    assignments: dict[str, int]
    centroids: tuple[tuple[float, ...], ...]
    silhouette: float | None

    def members(self, cluster: int) -> list[str]:
        return sorted(nid for nid, c in self.assignments.items() if c == cluster)


def _farthest_point_init(x: np.ndarray, k: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    chosen = [int(rng.integers(len(x)))]
    d2 = ((x - x[chosen[0]]) ** 2).sum(axis=1)
    while len(chosen) < k:
        nxt = int(np.argmax(d2))  # ties resolve to the lowest index
        chosen.append(nxt)
        d2 = np.minimum(d2, ((x - x[nxt]) ** 2).sum(axis=1))
    return x[chosen].copy()


def _kmeans(x: np.ndarray, k: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Lloyd iterations with deterministic seeding and tie-breaking."""
    centers = _farthest_point_init(x, k, seed)
    assign = np.full(len(x), -1)
    for _ in range(KMEANS_MAX_ITER):
        d2 = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new_assign = np.argmin(d2, axis=1)

        # re-seed any emptied cluster with the point farthest from its
        # assigned center, never stealing another cluster's only member
        # (with k <= n a donor cluster of size >= 2 always exists)
        for c in range(k):
            if not (new_assign == c).any():
                counts = np.bincount(new_assign, minlength=k)
                residual = d2[np.arange(len(x)), new_assign].copy()
                residual[counts[new_assign] <= 1] = -np.inf
                grab = int(np.argmax(residual))
                new_assign[grab] = c

        if (new_assign == assign).all():
            break
        assign = new_assign
        for c in range(k):
            centers[c] = x[assign == c].mean(axis=0)
    return assign, centers


def silhouette_score(x: np.ndarray, assign: np.ndarray) -> float:
    """Mean silhouette over all points; singleton-cluster points score 0."""
    n = len(x)
    dist = np.sqrt(((x[:, None, :] - x[None, :, :]) ** 2).sum(axis=2))
    labels = np.unique(assign)
    if len(labels) < 2:
        raise ValueError("silhouette needs at least 2 clusters")
    scores = np.zeros(n)
    for i in range(n):
        own = assign == assign[i]
        if own.sum() == 1:
            scores[i] = 0.0
            continue
        a = dist[i, own].sum() / (own.sum() - 1)
        b = min(dist[i, assign == c].mean() for c in labels if c != assign[i])
        m = max(a, b)
        scores[i] = 0.0 if m == 0.0 else (b - a) / m
    return float(scores.mean())


def cluster_trajectories(
    series: dict[str, tuple[float, ...] | list[float]],
    k_range: tuple[int, int] | None = None,
    seed: int = 0,
) -> ClusteringResult:
    """Group trajectories by shape, choosing k by mean silhouette.

    ``k_range`` defaults to [2, min(6, n-1)].  When every trajectory is
    identical (or the range is empty, as with only two series) the
    result degenerates to a single cluster with undefined silhouette.
    """
    ids = sorted(series)
    if len(ids) < 2:
        raise ValueError("need at least 2 series to cluster")
    x = np.asarray([series[nid] for nid in ids], dtype=float)
    if x.ndim != 2:
        raise ValueError("series must share one length")

    def single_cluster() -> ClusteringResult:
        centroid = tuple(float(v) for v in x.mean(axis=0))
        return ClusteringResult(1, {nid: 0 for nid in ids}, (centroid,), None)

    if (x == x[0]).all():
        return single_cluster()

    lo, hi = k_range if k_range is not None else (2, min(6, len(ids) - 1))
    lo = max(lo, 2)
    hi = min(hi, len(ids) - 1)
    if lo > hi:
        return single_cluster()

    best: tuple[float, int, np.ndarray, np.ndarray] | None = None
    for k in range(lo, hi + 1):
        assign, centers = _kmeans(x, k, seed)
        score = silhouette_score(x, assign)
        if best is None or score > best[0]:
            best = (score, k, assign, centers)

    score, k, assign, centers = best
    return ClusteringResult(
        k=k,
        assignments={nid: int(assign[i]) for i, nid in enumerate(ids)},
        centroids=tuple(tuple(float(v) for v in c) for c in centers),
        silhouette=score,
    )


@dataclass(frozen=True)
class SpikeEvent:
    time: int
    direction: str  # "rise" | "fall"
    magnitude: float


@dataclass(frozen=True)
class SpikeReport:
    spikes: tuple[tuple[str, SpikeEvent], ...]

    def for_node(self, node: str) -> list[SpikeEvent]:
        return [ev for nid, ev in self.spikes if nid == node]


def detect_spikes(
    series: tuple[float, ...] | list[float], theta: float = DEFAULT_SPIKE_THETA
) -> list[SpikeEvent]:
    """Flag sudden single-step moves.

    Step t is a spike when |series[t] - series[t-1]| exceeds ``theta``
    times the series range.  Flat series (zero range) never spike, and
    the rule is invariant to positive rescaling of the series.
    """
    if len(series) < 2:
        raise ValueError("series must have at least 2 samples")
    rng = max(series) - min(series)
    if rng <= 0.0:
        return []
    events = []
    for t in range(1, len(series)):
        step = series[t] - series[t - 1]
        if abs(step) > theta * rng:
            events.append(
                SpikeEvent(time=t, direction="rise" if step > 0 else "fall", magnitude=abs(step))
            )
    return events


def spike_report(
    series: dict[str, tuple[float, ...]],
    nodes: list[str],
    theta: float = DEFAULT_SPIKE_THETA,
) -> SpikeReport:
    entries = []
    for nid in nodes:
        for ev in detect_spikes(series[nid], theta):
            entries.append((nid, ev))
    return SpikeReport(tuple(entries))
