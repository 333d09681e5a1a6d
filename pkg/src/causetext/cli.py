"""Batch narrative generation from a graph file and a selection file.

The selection file holds the interventions and objectives:

    {"interventions": [{"node": "a", "delta": -31, "start": 0,
                        "kind": "sustained"}],
     "objectives": ["b", "c"]}

Plain narrative text goes to stdout (exit 0); ``--json`` emits the full
document in the same canonical bytes the service serves, so the two
surfaces can be diffed directly.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import fixtures
from .model import GraphFormatError, GraphValidationError, interventions_from_doc, load_graph
from .narrate import narrate, parse_budget
from .propagation import DEFAULT_HORIZON
from .render import DEFAULT_BUDGET, SCOPES
from .wiki import WikiSummaryProvider


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="causetext",
        description="Simulate interventions on a causal graph and print the narrative.",
    )
    parser.add_argument("graph", help="graph JSON file (nodes/edges arrays)")
    parser.add_argument("selection", help="selection JSON file (interventions/objectives)")
    parser.add_argument("--scope", choices=SCOPES, default="cumulative")
    parser.add_argument(
        "--budget",
        default=str(DEFAULT_BUDGET),
        help='character budget; "inf" or a negative number lifts the limit',
    )
    parser.add_argument("--horizon", type=int, default=DEFAULT_HORIZON)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument(
        "--wiki-mode", choices=("offline", "live"), default="offline", dest="wiki_mode"
    )
    parser.add_argument(
        "--offline",
        action="store_true",
        help="forbid live summary fetches regardless of --wiki-mode",
    )
    parser.add_argument(
        "--wiki-cache",
        default=None,
        help="summary cache file (defaults to the packaged one)",
    )
    parser.add_argument(
        "--json", action="store_true", help="emit the full narrative document as JSON"
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    try:
        graph = load_graph(args.graph)
        selection = json.loads(Path(args.selection).read_text(encoding="utf-8"))
        interventions = interventions_from_doc(selection.get("interventions", []))
        objectives = list(selection.get("objectives", []))
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (GraphFormatError, GraphValidationError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    mode = "offline" if args.offline else args.wiki_mode
    cache = Path(args.wiki_cache) if args.wiki_cache else fixtures.wiki_cache_path()
    kb = WikiSummaryProvider(cache, mode=mode)

    try:
        result = narrate(
            graph,
            interventions,
            objectives,
            horizon=args.horizon,
            scope=args.scope,
            budget=parse_budget(args.budget),
            seed=args.seed,
            kb=kb,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    if args.json:
        sys.stdout.buffer.write(result.doc.canonical_bytes())
    else:
        print(result.doc.text)
    if result.doc.truncated:
        print("note: narrative truncated to fit the character budget", file=sys.stderr)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
