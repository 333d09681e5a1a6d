"""Packaged example data: a climate-change causal network with a
ready-made selection (three interventions, three objectives) and an
offline summary cache for the context module."""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from .model import CausalGraph, InterventionSpec, graph_from_doc, interventions_from_doc


def _data_path(name: str) -> Path:
    return Path(str(resources.files("causetext").joinpath(f"data/{name}")))


def climate_graph_path() -> Path:
    return _data_path("climate_graph.json")


def climate_selection_path() -> Path:
    return _data_path("climate_selection.json")


def wiki_cache_path() -> Path:
    return _data_path("wiki_cache.json")


def climate_graph() -> CausalGraph:
    doc = json.loads(climate_graph_path().read_text(encoding="utf-8"))
    return graph_from_doc(doc)


def climate_selection() -> tuple[list[InterventionSpec], list[str]]:
    doc = json.loads(climate_selection_path().read_text(encoding="utf-8"))
    return interventions_from_doc(doc["interventions"]), list(doc["objectives"])
