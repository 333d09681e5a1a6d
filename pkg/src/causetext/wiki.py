"""Encyclopedia summary lookups for narrative context sentences.

Offline mode serves from a JSON cache file mapping labels to summary
paragraphs.  Live mode additionally queries a REST summary endpoint
(2 s per label) and writes fetched paragraphs back to the cache.  A
lookup failure never propagates: the narrative simply gets no context
sentence for that label.
"""

from __future__ import annotations

import json
import logging
import re
import threading
from pathlib import Path

import httpx

log = logging.getLogger(__name__)

DEFAULT_ENDPOINT = "https://en.wikipedia.org/api/rest_v1/page/summary"
SUMMARY_CHAR_LIMIT = 280
_SENTENCE_BREAK = re.compile(r"(?<=[.!?])\s+")


class ProviderUnavailable(RuntimeError):
    """Live lookups are failing; callers should skip the module."""


def truncate_summary(text: str, limit: int = SUMMARY_CHAR_LIMIT) -> str:
    """First paragraph, cut at a sentence boundary within ``limit`` chars.

    Falls back to a hard cut with an ellipsis when even the first
    sentence is too long.
    """
    paragraph = text.strip().split("\n\n")[0].split("\n")[0].strip()
    if len(paragraph) <= limit:
        return paragraph
    kept: list[str] = []
    total = 0
    for sentence in _SENTENCE_BREAK.split(paragraph):
        extra = len(sentence) + (1 if kept else 0)
        if total + extra > limit:
            break
        kept.append(sentence)
        total += extra
    if kept:
        return " ".join(kept)
    return paragraph[: limit - 1].rstrip() + "…"


class WikiSummaryProvider:
    """Label -> summary paragraph, backed by a cache file.

    mode="offline" never touches the network; mode="live" fetches
    misses from ``endpoint`` and persists them.  Cache writes are
    serialized so concurrent narrative requests stay safe.
    """

    def __init__(
        self,
        cache_path: str | Path | None = None,
        mode: str = "offline",
        timeout: float = 2.0,
        endpoint: str = DEFAULT_ENDPOINT,
        transport: httpx.BaseTransport | None = None,
    ):
        if mode not in ("offline", "live"):
            raise ValueError(f"unknown wiki mode {mode!r}")
        self.cache_path = Path(cache_path) if cache_path else None
        self.mode = mode
        self.timeout = timeout
        self.endpoint = endpoint.rstrip("/")
        self._transport = transport
        self._lock = threading.Lock()
        self._failed = False
        self._cache: dict[str, str] = {}
        if self.cache_path and self.cache_path.exists():
            try:
                loaded = json.loads(self.cache_path.read_text(encoding="utf-8"))
            except (OSError, json.JSONDecodeError) as exc:
                log.warning("wiki cache %s unreadable: %s", self.cache_path, exc)
                loaded = {}
            self._cache = {str(k): str(v) for k, v in loaded.items()}

    @property
    def failed(self) -> bool:
        return self._failed

    def get(self, label: str) -> str | None:
        """Summary for ``label`` or None when unavailable.

        Raises :class:`ProviderUnavailable` on live I/O failure so the
        caller can skip context sentences wholesale.
        """
        if label in self._cache:
            return truncate_summary(self._cache[label])
        if self.mode != "live":
            return None
        if self._failed:
            raise ProviderUnavailable("live summary endpoint marked unavailable")
        try:
            with httpx.Client(timeout=self.timeout, transport=self._transport) as client:
                resp = client.get(f"{self.endpoint}/{label}")
        except httpx.HTTPError as exc:
            self._failed = True
            raise ProviderUnavailable(str(exc)) from exc
        if resp.status_code == 404:
            return None
        if resp.status_code != 200:
            self._failed = True
            raise ProviderUnavailable(f"summary endpoint returned {resp.status_code}")
        extract = resp.json().get("extract")
        if not extract:
            return None
        self._store(label, extract)
        return truncate_summary(extract)

    def _store(self, label: str, text: str) -> None:
        with self._lock:
            self._cache[label] = text
            if self.cache_path:
                self.cache_path.parent.mkdir(parents=True, exist_ok=True)
                self.cache_path.write_text(
                    json.dumps(self._cache, ensure_ascii=False, indent=2, sort_keys=True),
                    encoding="utf-8",
                )
