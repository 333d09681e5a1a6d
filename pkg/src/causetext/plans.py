"""Sentence plans: the structured intermediate between the narrative
modules and the renderer.

A plan names a template and fills its slots with typed fragments.  The
renderer realizes fragments into text and emits the matching span
annotations (node references, emphasis, polarity colors, glyphs, list
items), so the same plan can be realized under either narrative scope
without the modules knowing about budgets or typography.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class TextFrag:
    text: str


@dataclass(frozen=True)
class NodeFrag:
    node: str
    label: str
    emphasis: bool = False  # interventions and objectives are emphasized


@dataclass(frozen=True)
class ValueFrag:
    """A signed percentage, rendered as e.g. ``+21% ↑``."""

    value: float


@dataclass(frozen=True)
class ChangeFrag:
    """A node's change over the horizon, realized per narrative scope:
    the net value under cumulative scope, the nonzero per-step moves
    under instantaneous scope."""

    net: float
    hops: tuple[float, ...]


@dataclass(frozen=True)
class TemplateFrag:
    """A phrase pulled from the template file at realization time, so
    wording stays data (e.g. trend-shape vocabulary)."""

    key: str


@dataclass(frozen=True)
class GroupFrag:
    children: tuple = ()


@dataclass(frozen=True)
class ListFrag:
    """Items joined with commas and a final "and", each wrapped in a
    list-item span."""

    items: tuple = ()


Fragment = TextFrag | NodeFrag | ValueFrag | ChangeFrag | TemplateFrag | GroupFrag | ListFrag


def fragment_nodes(frag) -> list[str]:
    if isinstance(frag, NodeFrag):
        return [frag.node]
    if isinstance(frag, (GroupFrag, ListFrag)):
        children = frag.children if isinstance(frag, GroupFrag) else frag.items
        return [nid for child in children for nid in fragment_nodes(child)]
    return []


@dataclass(frozen=True)
class SentencePlan:
    module: str  # effect | major-effect | no-effect | max-effect |
    #              time-series | spike | wiki | correlation
    template_id: str
    slots: dict[str, Fragment] = field(default_factory=dict)
    order_hint: int = 0
    doi: float = 0.0

    @property
    def nodes(self) -> tuple[str, ...]:
        """Node ids mentioned by this plan, in realization order."""
        seen: list[str] = []
        for frag in self.slots.values():
            for nid in fragment_nodes(frag):
                if nid not in seen:
                    seen.append(nid)
        return tuple(seen)
