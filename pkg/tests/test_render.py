import math

import pytest

from causetext.model import InterventionSpec
from causetext.narrate import narrate
from causetext.plans import ChangeFrag, ListFrag, NodeFrag, SentencePlan, TextFrag, ValueFrag
from causetext.propagation import propagate
from causetext.render import (
    NarrativeDoc,
    Span,
    interaction_index,
    load_templates,
    realize_plan,
    render,
    render_scope,
    search_spans,
)

from conftest import make_graph

TEMPLATES = load_templates()


def _plan(text_len, module="effect", index=0):
    """A plan realizing to exactly ``text_len`` characters."""
    return SentencePlan(
        module=module,
        template_id="wiki",
        slots={
            "node": NodeFrag(f"n{index}", "X"),
            "summary": TextFrag("y" * (text_len - 3)),
        },
        order_hint=index,
    )


def _doc_plans(graph, trace, interventions, objectives):
    from causetext.modules import impact_summary_plans

    return impact_summary_plans(graph, trace, interventions, objectives)


# ---- realization -----------------------------------------------------------

def test_node_span_text_matches_label(chain_graph):
    plan = SentencePlan(
        module="effect",
        template_id="wiki",
        slots={"node": NodeFrag("A", "Alpha", emphasis=True), "summary": TextFrag("t")},
    )
    text, spans = realize_plan(plan, TEMPLATES)
    node_spans = [s for s in spans if s.kind == "node-ref"]
    assert len(node_spans) == 1
    s = node_spans[0]
    assert text[s.start : s.end] == "Alpha"
    assert any(sp.kind == "emphasis" and (sp.start, sp.end) == (s.start, s.end) for sp in spans)


def test_value_realization_and_spans():
    plan = SentencePlan(
        module="effect",
        template_id="wiki",
        slots={"node": NodeFrag("A", "A"), "summary": ValueFrag(-31.0)},
    )
    text, spans = realize_plan(plan, TEMPLATES)
    assert "-31%" in text and "↓" in text
    kinds = {s.kind for s in spans}
    assert {"value", "polarity-color", "glyph"} <= kinds
    polarity = next(s for s in spans if s.kind == "polarity-color")
    assert polarity.target == "negative"
    value = next(s for s in spans if s.kind == "value")
    assert text[value.start : value.end] == "-31%"


def test_list_items_joined_and_marked():
    plan = SentencePlan(
        module="effect",
        template_id="wiki",
        slots={
            "node": NodeFrag("A", "A"),
            "summary": ListFrag((TextFrag("one"), TextFrag("two"), TextFrag("three"))),
        },
    )
    text, spans = realize_plan(plan, TEMPLATES)
    assert "one, two and three" in text
    assert sum(1 for s in spans if s.kind == "list-item") == 3


def test_missing_slot_rejected():
    plan = SentencePlan(module="effect", template_id="effect", slots={})
    with pytest.raises(ValueError, match="slot"):
        realize_plan(plan, TEMPLATES)


def test_spans_never_partially_overlap_on_fixture(climate):
    graph, interventions, objectives = climate
    doc = narrate(graph, interventions, objectives, budget=None).doc
    spans = sorted(doc.spans, key=lambda s: (s.start, -s.end))
    text_len = len(doc.text)
    for s in spans:
        assert 0 <= s.start <= s.end <= text_len
    for a in spans:
        for b in spans:
            if a is b:
                continue
            disjoint = a.end <= b.start or b.end <= a.start
            nested = (a.start <= b.start and b.end <= a.end) or (
                b.start <= a.start and a.end <= b.end
            )
            assert disjoint or nested


# ---- scope -----------------------------------------------------------------

def test_scope_cumulative_net(chain_graph):
    trace = propagate(chain_graph, [InterventionSpec("A", 20.0)], 3)
    assert render_scope(trace, "A", "cumulative") == "up 20% ↑"


def test_scope_instantaneous_single_hop(chain_graph):
    trace = propagate(chain_graph, [InterventionSpec("A", 20.0)], 3)
    assert render_scope(trace, "A", "instantaneous") == "rose 20% ↑ at T1"


def test_scope_flat_series(chain_graph):
    trace = propagate(chain_graph, [], 3)
    assert render_scope(trace, "B", "cumulative") == TEMPLATES["change_none"]
    assert render_scope(trace, "B", "instantaneous") == TEMPLATES["hop_none"]


def test_scope_multi_hop_sequence(chain_graph):
    trace = propagate(chain_graph, [InterventionSpec("A", 20.0, kind="point")], 3)
    assert render_scope(trace, "B", "instantaneous") == "rose 10% ↑ at T2, then fell 10% ↓ at T3"


def test_scope_sum_of_hops_equals_net(climate):
    graph, interventions, objectives = climate
    trace = propagate(graph, interventions, 12)
    from causetext.propagation import hop_changes, net_change

    for nid in graph.node_ids:
        assert sum(hop_changes(trace, nid)) == pytest.approx(net_change(trace, nid), abs=1e-9)


def test_scope_validation(chain_graph):
    trace = propagate(chain_graph, [], 3)
    with pytest.raises(ValueError):
        render_scope(trace, "A", "sideways")
    with pytest.raises(KeyError):
        render_scope(trace, "zz", "cumulative")


# ---- budget ----------------------------------------------------------------

def test_unlimited_budget_renders_all():
    plans = [_plan(50, index=i) for i in range(5)]
    doc = render(plans, budget=None, templates=TEMPLATES)
    assert len([b for b in doc.blocks if b[0] != "heading"]) == 5
    assert not doc.truncated
    assert doc.budget is None
    inf_doc = render(plans, budget=math.inf, templates=TEMPLATES)
    assert inf_doc == doc


def test_zero_budget_empty_and_truncated():
    doc = render([_plan(50)], budget=0, templates=TEMPLATES)
    assert doc.text == ""
    assert doc.blocks == ()
    assert doc.truncated


def test_two_plans_budget_for_one():
    # heading (14 chars) + separator + 100-char plan fits in 150; the
    # second plan does not
    plans = [_plan(100, index=0), _plan(100, index=1)]
    doc = render(plans, budget=150, templates=TEMPLATES)
    body = [b for b in doc.blocks if b[0] != "heading"]
    assert len(body) == 1
    assert doc.truncated
    assert len(doc.text) <= 150


def test_notice_when_top_plan_cannot_fit():
    doc = render([_plan(500)], budget=80, templates=TEMPLATES)
    assert doc.truncated
    assert doc.blocks and doc.blocks[0][0] == "notice"
    assert len(doc.text) <= 80


def test_budget_monotonicity_prefix_property():
    plans = [_plan(60 + 7 * i, index=i) for i in range(6)]
    previous: list = []
    for budget in (0, 100, 200, 400, 700, None):
        doc = render(plans, budget=budget, templates=TEMPLATES)
        body = [b for b in doc.blocks if b[0] not in ("heading", "notice")]
        texts = [t for _, t in body]
        assert texts[: len(previous)] == previous
        previous = texts


def test_budget_respected_exactly():
    for budget in range(0, 400, 13):
        doc = render([_plan(64, index=i) for i in range(5)], budget=budget, templates=TEMPLATES)
        assert len(doc.text) <= budget


def test_negative_budget_rejected():
    with pytest.raises(ValueError):
        render([_plan(10)], budget=-5, templates=TEMPLATES)


def test_doi_floor_drops_low_interest_plans():
    from dataclasses import replace

    plans = [replace(_plan(40, index=i), doi=float(i)) for i in range(4)]
    doc = render(plans, budget=None, templates=TEMPLATES, doi_floor=2.0)
    body = [b for b in doc.blocks if b[0] != "heading"]
    assert len(body) == 2


def test_rerender_byte_identical(climate):
    graph, interventions, objectives = climate
    a = narrate(graph, interventions, objectives).doc
    b = narrate(graph, interventions, objectives).doc
    assert a.canonical_bytes() == b.canonical_bytes()


# ---- interaction -----------------------------------------------------------

def test_interaction_index_counts_mentions():
    doc = NarrativeDoc(
        blocks=(("effect", "Alpha met Alpha."),),
        spans=(Span(0, 5, "node-ref", "A"), Span(10, 15, "node-ref", "A")),
        scope="cumulative",
        budget=None,
        truncated=False,
    )
    index = interaction_index(doc)
    assert index == {"A": [(0, 5), (10, 15)]}


def test_empty_doc_empty_index():
    doc = NarrativeDoc((), (), "cumulative", None, False)
    assert interaction_index(doc) == {}
    assert search_spans(doc, "x") == []


def test_search_hits_inside_node_spans(climate):
    graph, interventions, objectives = climate
    doc = narrate(graph, interventions, objectives, budget=None).doc
    hits = search_spans(doc, "Marine")
    assert hits
    node_ranges = interaction_index(doc)["marine-quality"]
    for start, end in hits:
        assert any(s <= start and end <= e for s, e in node_ranges)
    assert search_spans(doc, "") == []
    assert search_spans(doc, "zzzzzz") == []
