import random
from collections import Counter
from itertools import combinations

import pytest

from causetext.analytics import pagerank
from causetext.model import InterventionSpec
from causetext.pipeline import (
    CAUSE_EFFECT,
    CONNECTIVITY,
    CORRELATION,
    LIFE_CYCLE,
    Clause,
    aggregate,
    build_scene_graph,
    doi_score,
    extract_clauses,
    extreme_changes,
    score_clauses,
    trend_label,
)
from causetext.propagation import propagate

from conftest import make_graph, random_dag, random_selection


def _clauses_by(clauses, category):
    return [c for c in clauses if c.category == category]


# ---- extraction ------------------------------------------------------------

def test_chain_cause_effect_clause(chain_graph):
    interventions = [InterventionSpec("A", 20.0)]
    trace = propagate(chain_graph, interventions, 3)
    clauses = extract_clauses(chain_graph, trace, interventions, ["C"])
    ce = _clauses_by(clauses, CAUSE_EFFECT)
    assert len(ce) == 1
    clause = ce[0]
    assert clause.subjects == ("A",) and clause.objects == ("C",)
    assert clause.payload["paths"] == (("A", "B", "C"),)
    assert clause.payload["net_changes"]["C"] == 5.0
    assert clause.payload["deltas"]["A"] == 20.0


def test_disconnected_pair_gives_connectivity_clause(chain_graph):
    interventions = [InterventionSpec("C", 10.0)]
    trace = propagate(chain_graph, interventions, 3)
    clauses = extract_clauses(chain_graph, trace, interventions, ["A"])
    conn = _clauses_by(clauses, CONNECTIVITY)
    assert len(conn) == 1
    assert conn[0].subjects == ("C",) and conn[0].objects == ("A",)


def test_all_zero_trace_flat_no_spikes(chain_graph):
    trace = propagate(chain_graph, [], 4)
    clauses = extract_clauses(chain_graph, trace, [], [])
    lc = [c for c in _clauses_by(clauses, LIFE_CYCLE) if "trend" in c.payload]
    assert len(lc) == 3
    assert all(c.payload["trend"] == "flat" for c in lc)
    assert all(not c.payload["spikes"] for c in lc)
    assert not _clauses_by(clauses, CORRELATION)
    assert not [c for c in clauses if c.payload.get("extreme")]


def test_trend_labels():
    assert trend_label((0.0, 2.0, 4.0, 6.0)) == "rising"
    assert trend_label((0.0, -2.0, -4.0, -6.0)) == "falling"
    assert trend_label((0.0, 0.2, 0.3, 0.5)) == "flat"
    assert trend_label((0.0, 0.0, 50.0, 50.0)) == "spiking"


def test_mismatched_trace_rejected(chain_graph, diamond_graph):
    trace = propagate(diamond_graph, [], 3)
    with pytest.raises(ValueError, match="does not match"):
        extract_clauses(chain_graph, trace, [], [])


def test_correlation_requires_sync_and_no_path():
    # A feeds B and C on parallel branches: B and C move in sync with no
    # path between them; both-intervened pairs are excluded.
    g = make_graph(["A", "B", "C"], [("A", "B", 0.5), ("A", "C", 0.25)])
    interventions = [InterventionSpec("A", 20.0)]
    trace = propagate(g, interventions, 4)
    clauses = extract_clauses(g, trace, interventions, [])
    corr = _clauses_by(clauses, CORRELATION)
    assert [c.subjects for c in corr] == [("B", "C")]

    both = [InterventionSpec("B", 10.0), InterventionSpec("C", 10.0)]
    g2 = make_graph(["B", "C"], [])
    trace2 = propagate(g2, both, 4)
    assert not _clauses_by(extract_clauses(g2, trace2, both, []), CORRELATION)


def test_extreme_changes_exclude_interventions(diamond_graph):
    interventions = [InterventionSpec("A", 20.0)]
    trace = propagate(diamond_graph, interventions, 6)
    extremes = extreme_changes(trace, ["A"])
    kinds = {kind: nid for kind, nid, _ in extremes}
    assert kinds["max-positive"] == "B"
    assert kinds["max-negative"] == "D"
    assert "A" not in kinds.values()


# ---- doi scoring -----------------------------------------------------------

def test_doi_zero_change_non_io_is_centrality_only():
    clause = Clause(LIFE_CYCLE, ("X",), payload={"net_changes": {"X": 0.0}, "occurrences": 0})
    score = doi_score(
        clause,
        (0.5, 0.2, 0.3),
        magnitude_norm=10.0,
        occurrence_norm=4.0,
        centrality=None,
        io_nodes=frozenset(),
    )
    assert score == 0.0
    fake_pr = type("C", (), {"scores": {"X": 0.25}})()
    score = doi_score(clause, (0.5, 0.2, 0.3), magnitude_norm=10.0,
                      occurrence_norm=4.0, centrality=fake_pr, io_nodes=frozenset())
    assert score == pytest.approx(0.3 * 0.25)


def test_doi_io_bias_forces_top_tier():
    clause = Clause(CAUSE_EFFECT, ("A",), ("O",), payload={"net_changes": {"O": 1.0}})
    score = doi_score(clause, magnitude_norm=100.0, occurrence_norm=1.0,
                      io_nodes=frozenset({"O"}))
    assert score >= 1.0


def test_doi_monotone_in_magnitude():
    low = Clause(LIFE_CYCLE, ("X",), payload={"net_changes": {"X": 10.0}, "occurrences": 1})
    high = Clause(LIFE_CYCLE, ("X",), payload={"net_changes": {"X": 20.0}, "occurrences": 1})
    kw = dict(magnitude_norm=20.0, occurrence_norm=1.0, centrality=None, io_nodes=frozenset())
    assert doi_score(high, **kw) > doi_score(low, **kw)


def test_doi_weight_validation():
    clause = Clause(LIFE_CYCLE, ("X",))
    with pytest.raises(ValueError):
        doi_score(clause, (0.5, 0.5, 0.5))
    with pytest.raises(ValueError):
        doi_score(clause, (-0.1, 0.6, 0.5))


def test_ranking_invariant_to_magnitude_scaling(chain_graph):
    interventions = [InterventionSpec("A", 10.0)]
    objectives = ["C"]
    centrality = pagerank(chain_graph)

    def ranked(scale):
        trace = propagate(
            chain_graph, [InterventionSpec("A", 10.0 * scale)], 4
        )
        clauses = extract_clauses(chain_graph, trace, interventions, objectives)
        score_clauses(clauses, trace, centrality, interventions, objectives)
        return [
            (c.category, c.subjects, c.objects)
            for c in sorted(clauses, key=lambda c: (-c.doi, c.category, c.subjects, c.objects))
        ]

    assert ranked(1.0) == ranked(3.0)


# ---- scene graph -----------------------------------------------------------

def test_empty_scene():
    scene = build_scene_graph([])
    assert scene.groups == ()
    assert aggregate(scene).groups == ()


def test_group_ordering_by_max_doi():
    hi = Clause(LIFE_CYCLE, ("B",), payload={"trend": "flat"}, doi=1.5)
    lo = Clause(LIFE_CYCLE, ("A",), payload={"trend": "rising"}, doi=0.3)
    scene = build_scene_graph([hi, lo])
    assert [g.node for g in scene.groups] == ["B", "A"]


def test_equal_doi_tie_breaks_lexicographically():
    b = Clause(LIFE_CYCLE, ("B",), payload={"trend": "flat"}, doi=1.0)
    a = Clause(LIFE_CYCLE, ("A",), payload={"trend": "flat"}, doi=1.0)
    scene = build_scene_graph([b, a])
    assert [g.node for g in scene.groups] == ["A", "B"]


def test_clause_reachable_from_exactly_one_group():
    clauses = [
        Clause(CAUSE_EFFECT, ("A",), ("C",), payload={}, doi=2.0),
        Clause(LIFE_CYCLE, ("A",), payload={"trend": "rising"}, doi=0.5),
        Clause(LIFE_CYCLE, ("C",), payload={"trend": "flat"}, doi=0.1),
    ]
    scene = build_scene_graph(clauses)
    seen = [id(c) for g in scene.groups for c in g.clauses]
    assert len(seen) == len(set(seen)) == 3


# ---- aggregation -----------------------------------------------------------

def test_merge_shared_object():
    a = Clause(CAUSE_EFFECT, ("A",), ("C",), payload={"net_changes": {"C": 5.0}}, doi=1.0)
    b = Clause(CAUSE_EFFECT, ("B",), ("C",), payload={"net_changes": {"C": 5.0}}, doi=2.0)
    merged = aggregate(build_scene_graph([a, b])).all_clauses()
    assert len(merged) == 1
    assert merged[0].subjects == ("A", "B")
    assert merged[0].objects == ("C",)
    assert merged[0].doi == 2.0


def test_disjoint_endpoints_unchanged():
    a = Clause(CAUSE_EFFECT, ("A",), ("C",), payload={}, doi=1.0)
    b = Clause(CAUSE_EFFECT, ("B",), ("D",), payload={}, doi=1.0)
    merged = aggregate(build_scene_graph([a, b])).all_clauses()
    assert len(merged) == 2


def test_three_flat_trends_merge_to_one():
    clauses = [
        Clause(LIFE_CYCLE, (n,), payload={"trend": "flat", "net_changes": {n: 0.0}})
        for n in ("A", "B", "C")
    ]
    merged = aggregate(build_scene_graph(clauses)).all_clauses()
    assert len(merged) == 1
    assert merged[0].subjects == ("A", "B", "C")


def test_different_trends_do_not_merge():
    clauses = [
        Clause(LIFE_CYCLE, ("A",), payload={"trend": "flat"}),
        Clause(LIFE_CYCLE, ("B",), payload={"trend": "rising"}),
    ]
    assert len(aggregate(build_scene_graph(clauses)).all_clauses()) == 2


def random_clause_set(rng: random.Random):
    """Extraction-shaped clause set: singleton subjects, unique keyed
    atoms, correlation groups emitted as full cliques."""
    ids = [f"n{i}" for i in range(rng.randint(3, 8))]
    clauses = []
    pairs = set()
    for _ in range(rng.randint(2, 10)):
        category = rng.choice([CAUSE_EFFECT, CONNECTIVITY])
        s, o = rng.sample(ids, 2)
        if (category, s, o) in pairs:
            continue
        pairs.add((category, s, o))
        clauses.append(
            Clause(category, (s,), (o,),
                   payload={"net_changes": {o: rng.uniform(-50, 50)}},
                   doi=rng.random())
        )
    for nid in rng.sample(ids, rng.randint(0, len(ids))):
        clauses.append(
            Clause(LIFE_CYCLE, (nid,),
                   payload={"trend": rng.choice(["rising", "falling", "flat", "spiking"]),
                            "net_changes": {nid: rng.uniform(-50, 50)}},
                   doi=rng.random())
        )
    if rng.random() < 0.6 and len(ids) >= 3:
        group = rng.sample(ids, rng.randint(2, 3))
        steps = tuple(sorted(rng.sample(range(1, 8), rng.randint(1, 3))))
        for u, v in combinations(sorted(group), 2):
            clauses.append(
                Clause(CORRELATION, (u, v), payload={"steps": steps}, doi=rng.random())
            )
    rng.shuffle(clauses)
    return clauses


def test_aggregate_idempotent_and_preserves_atoms():
    rng = random.Random(99)
    for _ in range(100):
        clauses = random_clause_set(rng)
        scene = build_scene_graph(clauses)
        once = aggregate(scene)
        twice = aggregate(once)

        def signature(s):
            return sorted(
                (c.category, c.subjects, c.objects, c.doi) for c in s.all_clauses()
            )

        assert signature(once) == signature(twice)
        before = Counter(a for c in clauses for a in c.atoms())
        after = Counter(a for c in once.all_clauses() for a in c.atoms())
        assert before == after
        assert len(once.all_clauses()) <= len(clauses)


def test_full_pipeline_on_random_instances():
    rng = random.Random(55)
    for _ in range(15):
        g = random_dag(rng)
        interventions, objectives = random_selection(rng, g)
        trace = propagate(g, interventions, 12)
        clauses = extract_clauses(g, trace, interventions, objectives)
        score_clauses(clauses, trace, pagerank(g), interventions, objectives)
        assert all(c.doi == c.doi and abs(c.doi) < 10 for c in clauses)  # finite
        scene = aggregate(build_scene_graph(clauses))
        dois = [c.doi for grp in scene.groups for c in grp.clauses]
        for grp in scene.groups:
            group_dois = [c.doi for c in grp.clauses]
            assert group_dois == sorted(group_dois, reverse=True)
        maxes = [grp.max_doi for grp in scene.groups]
        assert maxes == sorted(maxes, reverse=True)
