"""causetext: intervention propagation over weighted causal networks
with budget-constrained narrative summaries."""

from .analytics import (
    CentralityScores,
    ClusteringResult,
    SpikeEvent,
    cluster_trajectories,
    detect_spikes,
    pagerank,
)
from .model import (
    CausalEdge,
    CausalGraph,
    GraphFormatError,
    GraphValidationError,
    InterventionSpec,
    ProcessNode,
    UnknownNodeError,
    causal_paths,
    graph_from_doc,
    load_graph,
    validate_graph,
)
from .narrate import NarrativeResult, narrate, view_encodings
from .pipeline import (
    Clause,
    DoiSceneGraph,
    aggregate,
    build_scene_graph,
    doi_score,
    extract_clauses,
    score_clauses,
)
from .plans import SentencePlan
from .propagation import PropagationTrace, hop_changes, net_change, propagate
from .render import (
    NarrativeDoc,
    Span,
    interaction_index,
    render,
    render_scope,
    search_spans,
)
from .wiki import WikiSummaryProvider

__version__ = "0.1.0"

__all__ = [
    "CausalEdge",
    "CausalGraph",
    "CentralityScores",
    "Clause",
    "ClusteringResult",
    "DoiSceneGraph",
    "GraphFormatError",
    "GraphValidationError",
    "InterventionSpec",
    "NarrativeDoc",
    "NarrativeResult",
    "ProcessNode",
    "PropagationTrace",
    "SentencePlan",
    "Span",
    "SpikeEvent",
    "UnknownNodeError",
    "WikiSummaryProvider",
    "aggregate",
    "build_scene_graph",
    "causal_paths",
    "cluster_trajectories",
    "detect_spikes",
    "doi_score",
    "extract_clauses",
    "graph_from_doc",
    "hop_changes",
    "interaction_index",
    "load_graph",
    "narrate",
    "net_change",
    "pagerank",
    "propagate",
    "render",
    "render_scope",
    "score_clauses",
    "search_spans",
    "validate_graph",
    "view_encodings",
    "__version__",
]
