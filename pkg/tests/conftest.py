from __future__ import annotations

import random

import pytest

from causetext import fixtures
from causetext.model import CausalEdge, CausalGraph, InterventionSpec, ProcessNode


def make_graph(node_ids, edges, labels=None):
    labels = labels or {}
    nodes = tuple(ProcessNode(nid, labels.get(nid, nid.upper())) for nid in node_ids)
    return CausalGraph(nodes, tuple(CausalEdge(s, t, w) for s, t, w in edges))


@pytest.fixture
def chain_graph():
    """A -> B -> C with weight 0.5 on both edges."""
    return make_graph(
        ["A", "B", "C"],
        [("A", "B", 0.5), ("B", "C", 0.5)],
        labels={"A": "Alpha", "B": "Beta", "C": "Gamma"},
    )


@pytest.fixture
def diamond_graph():
    """A branches to B and D, both feeding E; B gains, D loses."""
    return make_graph(
        ["A", "B", "D", "E"],
        [("A", "B", 0.5), ("A", "D", -0.6), ("B", "E", 0.4), ("D", "E", 0.3)],
    )


@pytest.fixture(scope="session")
def climate():
    graph = fixtures.climate_graph()
    interventions, objectives = fixtures.climate_selection()
    return graph, interventions, objectives


def random_dag(rng: random.Random, max_nodes: int = 10, edge_prob: float = 0.35,
               max_weight: float = 0.6):
    """A random DAG over shuffled ids; edges only run index-forward."""
    n = rng.randint(2, max_nodes)
    ids = [f"n{i:02d}" for i in range(n)]
    rng.shuffle(ids)
    edges = []
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < edge_prob:
                weight = rng.uniform(-max_weight, max_weight)
                edges.append((ids[a], ids[b], weight))
    return make_graph(ids, edges)


def random_selection(rng: random.Random, graph: CausalGraph, max_delta: float = 3.0,
                     sustained_only: bool = False):
    """Random interventions and objectives over a graph's nodes."""
    ids = list(graph.node_ids)
    n_i = rng.randint(1, max(1, min(3, len(ids) - 1)))
    intervened = rng.sample(ids, n_i)
    interventions = []
    for nid in intervened:
        delta = rng.uniform(0.5, max_delta) * rng.choice([-1.0, 1.0])
        kind = "sustained" if sustained_only else rng.choice(["sustained", "point"])
        interventions.append(
            InterventionSpec(nid, delta, start=rng.randint(0, 2), kind=kind)
        )
    remaining = [nid for nid in ids if nid not in intervened]
    objectives = rng.sample(remaining, min(len(remaining), rng.randint(1, 3)))
    return interventions, objectives
