"""HTTP service: graph storage, analysis sessions, and narratives.

Graph versions are immutable and content-addressed on disk; sessions
are in-memory with a last-writer-wins version counter.  The narrative
endpoint recomputes the full pipeline per request (deterministic given
the session seed), so repeated reads return identical bytes.

Endpoints:
    PUT  /graphs                   -> {"version": ...}
    GET  /graphs/{version}         -> stored document
    POST /sessions                 -> {"id": ..., "version": 0}
    PATCH /sessions/{id}           -> update selections/scope/budget
    GET  /sessions/{id}/narrative  -> narrative + encodings (?format=doc
                                      returns the bare NarrativeDoc bytes)
    GET  /sessions/{id}/trace      -> propagation trace
    GET  /sessions/{id}/search?q=  -> span hits over the narrative text

Configuration comes from an optional JSON config file plus environment
overrides PORT, DATA_DIR, and WIKI_MODE.
"""

from __future__ import annotations

import hashlib
import json
import os
import shutil
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import Body, FastAPI, HTTPException, Response

from . import fixtures
from .model import (
    CausalGraph,
    GraphFormatError,
    InterventionSpec,
    graph_from_doc,
    interventions_from_doc,
    validate_graph,
    validate_selection,
)
from .narrate import narrate, parse_budget
from .propagation import DEFAULT_HORIZON
from .render import DEFAULT_BUDGET, SCOPES, interaction_index, search_spans
from .wiki import WikiSummaryProvider


@dataclass
class ServiceConfig:
    port: int = 8000
    data_dir: Path = Path("./causetext-data")
    wiki_mode: str = "offline"

    @classmethod
    def load(cls, path: str | Path | None = None, env: dict | None = None) -> "ServiceConfig":
        env = os.environ if env is None else env
        values: dict = {}
        if path and Path(path).exists():
            values = json.loads(Path(path).read_text(encoding="utf-8"))
        cfg = cls(
            port=int(values.get("port", 8000)),
            data_dir=Path(values.get("data_dir", "./causetext-data")),
            wiki_mode=values.get("wiki_mode", "offline"),
        )
        if "PORT" in env:
            cfg.port = int(env["PORT"])
        if "DATA_DIR" in env:
            cfg.data_dir = Path(env["DATA_DIR"])
        if "WIKI_MODE" in env:
            cfg.wiki_mode = env["WIKI_MODE"]
        return cfg


class GraphStore:
    """Content-addressed, append-only store of graph documents."""

    def __init__(self, root: Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._graphs: dict[str, CausalGraph] = {}

    @staticmethod
    def _key(doc: dict) -> str:
        blob = json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()[:16]

    def put(self, doc: dict) -> str:
        graph = graph_from_doc(doc)  # raises on schema/invariant problems
        version = self._key(doc)
        path = self.root / f"{version}.json"
        if not path.exists():
            path.write_text(
                json.dumps(doc, ensure_ascii=False, indent=2, sort_keys=True),
                encoding="utf-8",
            )
        self._graphs[version] = graph
        return version

    def get_doc(self, version: str) -> dict | None:
        path = self.root / f"{version}.json"
        if not path.exists():
            return None
        return json.loads(path.read_text(encoding="utf-8"))

    def get_graph(self, version: str) -> CausalGraph | None:
        if version in self._graphs:
            return self._graphs[version]
        doc = self.get_doc(version)
        if doc is None:
            return None
        graph = graph_from_doc(doc)
        self._graphs[version] = graph
        return graph


@dataclass
class Session:
    id: str
    graph_version: str
    interventions: list[InterventionSpec] = field(default_factory=list)
    objectives: list[str] = field(default_factory=list)
    scope: str = "cumulative"
    budget: int | None = DEFAULT_BUDGET
    seed: int = 0  # fixed at creation: narratives are reproducible per session
    horizon: int = DEFAULT_HORIZON
    version: int = 0

    def to_doc(self) -> dict:
        return {
            "id": self.id,
            "graph_version": self.graph_version,
            "interventions": [
                {"node": s.node, "delta": s.delta, "start": s.start, "kind": s.kind}
                for s in self.interventions
            ],
            "objectives": list(self.objectives),
            "scope": self.scope,
            "budget": self.budget,
            "seed": self.seed,
            "horizon": self.horizon,
            "version": self.version,
        }


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig.load()
    config.data_dir.mkdir(parents=True, exist_ok=True)

    cache_path = config.data_dir / "wiki_cache.json"
    if not cache_path.exists():
        shutil.copy(fixtures.wiki_cache_path(), cache_path)
    provider = WikiSummaryProvider(cache_path, mode=config.wiki_mode)

    store = GraphStore(config.data_dir / "graphs")
    sessions: dict[str, Session] = {}
    lock = threading.Lock()

    app = FastAPI(title="causetext", version="0.1.0")
    app.state.config = config
    app.state.store = store

    def _session(session_id: str) -> Session:
        session = sessions.get(session_id)
        if session is None:
            raise HTTPException(404, f"no session {session_id}")
        return session

    def _graph(session: Session) -> CausalGraph:
        graph = store.get_graph(session.graph_version)
        if graph is None:
            raise HTTPException(410, f"graph version {session.graph_version} is gone")
        return graph

    @app.get("/")
    def root():
        return {"service": "causetext", "version": app.version}

    @app.put("/graphs")
    def put_graph(doc: dict = Body(...)):
        try:
            graph = graph_from_doc(doc, validate=False)
        except GraphFormatError as exc:
            raise HTTPException(400, str(exc))
        report = validate_graph(graph)
        if not report.ok:
            cycles = [v for v in report.violations if v.rule == "cycle"]
            detail = {"violations": report.messages()}
            if cycles:
                detail["cycle"] = list(cycles[0].ids)
                raise HTTPException(422, detail)
            raise HTTPException(400, detail)
        return {"version": store.put(doc)}

    @app.get("/graphs/{version}")
    def get_graph(version: str):
        doc = store.get_doc(version)
        if doc is None:
            raise HTTPException(404, f"no graph version {version}")
        return doc

    @app.post("/sessions")
    def post_session(body: dict = Body(...)):
        version = body.get("graph_version")
        graph = store.get_graph(version) if version else None
        if graph is None:
            raise HTTPException(404, f"unknown graph version {version!r}")
        session = Session(
            id=uuid.uuid4().hex[:12],
            graph_version=version,
            seed=int(body.get("seed", 0)),
            horizon=int(body.get("horizon", DEFAULT_HORIZON)),
        )
        _apply_updates(session, graph, body)
        with lock:
            sessions[session.id] = session
        return {"id": session.id, "version": session.version, "session": session.to_doc()}

    @app.patch("/sessions/{session_id}")
    def patch_session(session_id: str, body: dict = Body(...)):
        session = _session(session_id)
        graph = _graph(session)
        forbidden = {"seed", "horizon", "graph_version"} & set(body)
        if forbidden:
            raise HTTPException(400, f"fields fixed at session creation: {sorted(forbidden)}")
        with lock:
            _apply_updates(session, graph, body)
            session.version += 1
        return {"id": session.id, "version": session.version, "session": session.to_doc()}

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return _session(session_id).to_doc()

    def _narrative(session: Session):
        if not session.interventions or not session.objectives:
            raise HTTPException(409, "select interventions and objectives first")
        graph = _graph(session)
        return narrate(
            graph,
            session.interventions,
            session.objectives,
            horizon=session.horizon,
            scope=session.scope,
            budget=session.budget,
            seed=session.seed,
            kb=provider,
        )

    @app.get("/sessions/{session_id}/narrative")
    def get_narrative(session_id: str, format: str = "full"):
        session = _session(session_id)
        result = _narrative(session)
        if format == "doc":
            return Response(content=result.doc.canonical_bytes(), media_type="application/json")
        doc = result.doc
        return {
            "doc": doc.to_doc(),
            "net_changes": {
                nid: round(series[-1] - series[0], 6)
                for nid, series in result.trace.series.items()
            },
            "encodings": result.encodings,
            "interaction_index": {
                nid: [list(r) for r in ranges]
                for nid, ranges in interaction_index(doc).items()
            },
            "graph_version": session.graph_version,
            "session_version": session.version,
        }

    @app.get("/sessions/{session_id}/trace")
    def get_trace(session_id: str):
        session = _session(session_id)
        if not session.interventions:
            raise HTTPException(409, "select interventions first")
        graph = _graph(session)
        from .propagation import propagate

        trace = propagate(graph, session.interventions, session.horizon)
        return trace.to_doc()

    @app.get("/sessions/{session_id}/search")
    def search(session_id: str, q: str = ""):
        session = _session(session_id)
        result = _narrative(session)
        return {"query": q, "hits": [list(h) for h in search_spans(result.doc, q)]}

    return app


def _apply_updates(session: Session, graph: CausalGraph, body: dict) -> None:
    if "interventions" in body:
        try:
            session.interventions = interventions_from_doc(body["interventions"])
        except GraphFormatError as exc:
            raise HTTPException(400, str(exc))
    if "objectives" in body:
        if not isinstance(body["objectives"], list):
            raise HTTPException(400, "objectives must be an array of node ids")
        session.objectives = [str(o) for o in body["objectives"]]
    if "scope" in body:
        if body["scope"] not in SCOPES:
            raise HTTPException(400, f"scope must be one of {SCOPES}")
        session.scope = body["scope"]
    if "budget" in body:
        session.budget = parse_budget(body["budget"])
    problems = validate_selection(
        graph, session.interventions, session.objectives, session.horizon
    )
    if problems:
        raise HTTPException(400, "; ".join(problems))


def main(argv: list[str] | None = None) -> int:
    import argparse

    import uvicorn

    parser = argparse.ArgumentParser(description="Run the causetext service.")
    parser.add_argument("--config", default=None, help="path to a JSON config file")
    parser.add_argument("--port", type=int, default=None)
    parser.add_argument("--data-dir", default=None)
    args = parser.parse_args(argv)

    config = ServiceConfig.load(args.config)
    if args.port is not None:
        config.port = args.port
    if args.data_dir is not None:
        config.data_dir = Path(args.data_dir)
    uvicorn.run(create_app(config), host="127.0.0.1", port=config.port)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
