"""Realize ordered sentence plans into a narrative document under a
character budget.

Inclusion is greedy in plan order (the order encodes descending degree
of interest): each plan's realized paragraph is added while it fits,
and rendering stops at the first paragraph that does not, marking the
document truncated.  This gives the prefix property: growing the budget
never drops a previously included paragraph.

Every realized document carries span annotations over the concatenated
text (paragraphs joined by blank lines): node references, emphasis for
interventions/objectives, polarity color classes and arrow glyphs for
signed values, and list-item boundaries.  Values are shown as whole
percentage points; span targets keep the exact figures.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .pipeline import DoiSceneGraph
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

DEFAULT_BUDGET = 1200
BLOCK_SEP = "\n\n"

CUMULATIVE = "cumulative"
INSTANTANEOUS = "instantaneous"
SCOPES = (CUMULATIVE, INSTANTANEOUS)

IMPACT_MODULES = ("effect", "major-effect", "no-effect", "max-effect")
TREND_MODULES = ("time-series", "spike", "wiki")

_PLACEHOLDER = re.compile(r"\{([a-z_]+)\}")


def load_templates(path: str | Path | None = None) -> dict[str, str]:
    """Sentence templates; the packaged file can be swapped for a custom one."""
    if path is None:
        raw = resources.files("causetext").joinpath("data/templates.json").read_text("utf-8")
    else:
        raw = Path(path).read_text(encoding="utf-8")
    return json.loads(raw)


@dataclass(frozen=True)
class Span:
    start: int
    end: int
    kind: str  # node-ref | emphasis | polarity-color | value | glyph | list-item
    target: str | float | None = None


@dataclass(frozen=True)
class NarrativeDoc:
    blocks: tuple[tuple[str, str], ...]  # (module tag, paragraph text)
    spans: tuple[Span, ...]
    scope: str
    budget: int | None  # None = unlimited
    truncated: bool

    @property
    def text(self) -> str:
        return BLOCK_SEP.join(text for _, text in self.blocks)

    def to_doc(self) -> dict:
        return {
            "blocks": [{"module": m, "text": t} for m, t in self.blocks],
            "spans": [
                {"start": s.start, "end": s.end, "kind": s.kind, "target": s.target}
                for s in self.spans
            ],
            "scope": self.scope,
            "budget": self.budget,
            "truncated": self.truncated,
        }

    def canonical_bytes(self) -> bytes:
        """Byte-stable serialization; the service and CLI both emit this."""
        return (
            json.dumps(self.to_doc(), ensure_ascii=False, sort_keys=True, separators=(",", ":"))
            + "\n"
        ).encode("utf-8")


def _round_away(v: float) -> int:
    return int(math.floor(abs(v) + 0.5)) * (1 if v >= 0 else -1)


class _Realizer:
    def __init__(self, templates: dict[str, str], scope: str):
        self.templates = templates
        self.scope = scope
        self.parts: list[str] = []
        self.length = 0
        self.spans: list[Span] = []

    def emit(self, text: str) -> None:
        self.parts.append(text)
        self.length += len(text)

    def mark(self, start: int, kind: str, target=None) -> None:
        self.spans.append(Span(start, self.length, kind, target))

    def text(self) -> str:
        return "".join(self.parts)

    # -- fragments ---------------------------------------------------------

    def fragment(self, frag) -> None:
        if isinstance(frag, TextFrag):
            self.emit(frag.text)
        elif isinstance(frag, NodeFrag):
            start = self.length
            self.emit(frag.label)
            self.mark(start, "node-ref", frag.node)
            if frag.emphasis:
                self.mark(start, "emphasis", frag.node)
        elif isinstance(frag, ValueFrag):
            self._signed_value(frag.value)
        elif isinstance(frag, TemplateFrag):
            self.emit(self.templates[frag.key])
        elif isinstance(frag, ChangeFrag):
            self._change(frag)
        elif isinstance(frag, GroupFrag):
            for child in frag.children:
                self.fragment(child)
        elif isinstance(frag, ListFrag):
            for i, item in enumerate(frag.items):
                if i > 0:
                    self.emit(" and " if i == len(frag.items) - 1 else ", ")
                start = self.length
                self.fragment(item)
                self.mark(start, "list-item")
        else:
            raise TypeError(f"unknown fragment {frag!r}")

    def _signed_value(self, value: float) -> None:
        rounded = _round_away(value)
        start = self.length
        self.emit(f"{rounded:+d}%" if rounded else "0%")
        target = round(value, 6)
        self.mark(start, "value", target)
        if value:
            self.mark(start, "polarity-color", "positive" if value > 0 else "negative")
            self._glyph(value)

    def _glyph(self, value: float) -> None:
        self.emit(" ")
        start = self.length
        self.emit("↑" if value > 0 else "↓")
        self.mark(start, "glyph", round(value, 6))

    def _magnitude(self, value: float) -> None:
        """Unsigned percent text for a signed move whose direction is
        already carried by the surrounding words."""
        rounded = abs(_round_away(value))
        start = self.length
        self.emit(f"{rounded}%" if rounded else "less than 1%")
        self.mark(start, "value", round(value, 6))
        self.mark(start, "polarity-color", "positive" if value > 0 else "negative")
        self._glyph(value)

    def _change(self, frag: ChangeFrag) -> None:
        t = self.templates
        if self.scope == CUMULATIVE:
            if frag.net == 0:
                self.emit(t["change_none"])
                return
            word = t["change_up"] if frag.net > 0 else t["change_down"]
            before, _, after = word.partition("{value}")
            self.emit(before)
            self._magnitude(frag.net)
            self.emit(after)
            return
        moves = [(i + 1, d) for i, d in enumerate(frag.hops) if d != 0.0]
        if not moves:
            self.emit(t["hop_none"])
            return
        for idx, (step, delta) in enumerate(moves):
            if idx > 0:
                self.emit(t["hop_joiner"])
            phrase = t["hop_rise"] if delta > 0 else t["hop_fall"]
            pre, _, rest = phrase.partition("{value}")
            mid, _, post = rest.partition("{time}")
            self.emit(pre)
            self._magnitude(delta)
            self.emit(mid + str(step) + post)

    # -- plans -------------------------------------------------------------

    def plan(self, plan: SentencePlan) -> None:
        template = self.templates.get(plan.template_id)
        if template is None:
            raise ValueError(f"no template {plan.template_id!r}")
        pos = 0
        for match in _PLACEHOLDER.finditer(template):
            self.emit(template[pos : match.start()])
            name = match.group(1)
            if name not in plan.slots:
                raise ValueError(
                    f"template {plan.template_id!r} slot {name!r} not filled"
                )
            self.fragment(plan.slots[name])
            pos = match.end()
        self.emit(template[pos:])


def realize_plan(
    plan: SentencePlan, templates: dict[str, str], scope: str = CUMULATIVE
) -> tuple[str, list[Span]]:
    """One plan's paragraph text and spans (offsets local to the paragraph)."""
    r = _Realizer(templates, scope)
    r.plan(plan)
    return r.text(), r.spans


def render_scope(
    trace: PropagationTrace,
    node: str,
    scope: str = CUMULATIVE,
    templates: dict[str, str] | None = None,
) -> str:
    """Phrase one node's change under the given narrative scope.

    Cumulative yields a single net-change clause; instantaneous walks
    the nonzero per-step moves ("rose 10% at T2, then fell 5% at T4").
    """
    if scope not in SCOPES:
        raise ValueError(f"scope must be one of {SCOPES}")
    trace.require(node)
    if templates is None:
        templates = load_templates()
    r = _Realizer(templates, scope)
    r.fragment(ChangeFrag(net=net_change(trace, node), hops=tuple(hop_changes(trace, node))))
    return r.text()


def interaction_index(doc: NarrativeDoc) -> dict[str, list[tuple[int, int]]]:
    """Inverse index over node references for brushing and hyperlinking."""
    index: dict[str, list[tuple[int, int]]] = {}
    for span in doc.spans:
        if span.kind == "node-ref":
            index.setdefault(span.target, []).append((span.start, span.end))
    return index


def search_spans(doc: NarrativeDoc, query: str) -> list[tuple[int, int]]:
    """Case-insensitive substring hits over the concatenated text."""
    if not query:
        return []
    text = doc.text.lower()
    q = query.lower()
    hits = []
    at = text.find(q)
    while at != -1:
        hits.append((at, at + len(q)))
        at = text.find(q, at + 1)
    return hits


def _section(module: str) -> str | None:
    if module in IMPACT_MODULES:
        return "heading_impact"
    if module in TREND_MODULES:
        return "heading_trends"
    return None


def render(
    plans: list[SentencePlan],
    scene: DoiSceneGraph | None = None,
    scope: str = CUMULATIVE,
    budget: int | float | None = DEFAULT_BUDGET,
    templates: dict[str, str] | None = None,
    doi_floor: float | None = None,
) -> NarrativeDoc:
    """Greedy prefix rendering of ordered plans under a character budget.

    ``budget=None`` (or infinity) renders everything.  ``doi_floor``
    implements roll-up: plans scoring below the floor are left out
    before budgeting.  Section headings appear once before the first
    included plan of each section and count against the budget.
    """
    if scope not in SCOPES:
        raise ValueError(f"scope must be one of {SCOPES}")
    if templates is None:
        templates = load_templates()
    unlimited = budget is None or budget == math.inf
    if not unlimited:
        budget = int(budget)
        if budget < 0:
            raise ValueError("budget must be >= 0")

    if doi_floor is not None:
        plans = [p for p in plans if p.doi >= doi_floor]

    blocks: list[tuple[str, str]] = []
    spans: list[Span] = []
    emitted_headings: set[str] = set()
    used = 0
    truncated = False

    def block_cost(text: str) -> int:
        return len(text) + (len(BLOCK_SEP) if blocks else 0)

    def push(module: str, text: str, local_spans: list[Span] = ()) -> None:
        nonlocal used
        offset = used + (len(BLOCK_SEP) if blocks else 0)
        used = offset + len(text)
        blocks.append((module, text))
        for s in local_spans:
            spans.append(Span(s.start + offset, s.end + offset, s.kind, s.target))

    for plan in plans:
        text, local_spans = realize_plan(plan, templates, scope)
        unit_cost = block_cost(text)
        heading_key = _section(plan.module)
        heading_text = None
        if heading_key and heading_key not in emitted_headings:
            heading_text = templates[heading_key]
            # the separator between heading and plan text always applies
            unit_cost += len(heading_text) + len(BLOCK_SEP)
        if not unlimited and used + unit_cost > budget:
            truncated = True
            break
        if heading_text is not None:
            emitted_headings.add(heading_key)
            push("heading", heading_text)
        push(plan.module, text, local_spans)

    if truncated and not blocks and not unlimited:
        notice = templates["truncation_notice"]
        if len(notice) <= budget:
            push("notice", notice)

    return NarrativeDoc(
        blocks=tuple(blocks),
        spans=tuple(spans),
        scope=scope,
        budget=None if unlimited else budget,
        truncated=truncated,
    )
