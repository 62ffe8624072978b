"""Edge providers: where expansion gets the edges incident to an account.

The file provider indexes a fully ingested edge file. The HTTP provider
speaks the Etherscan account API (txlist + tokentx) with retry, pacing,
and an on-disk response cache so reruns are reproducible.
"""
from __future__ import annotations

import hashlib
import json
import os
import time
from pathlib import Path
from typing import Protocol

import requests

from .graph import IngestError, TransferEdge, _parse_record, load_graph

API_KEY_ENV = "FUNDTRACE_API_KEY"


class ProviderError(RuntimeError):
    pass


class EdgeProvider(Protocol):
    def fetch_edges(self, account: str) -> list[TransferEdge]: ...


class FileProvider:
    """Whole-graph ingest; fetch_edges is an index lookup."""

    def __init__(self, path: str, *, chain_symbol: str = "ETH"):
        self.graph = load_graph(path, chain_symbol=chain_symbol)
        self.calls = 0

    def fetch_edges(self, account: str) -> list[TransferEdge]:
        self.calls += 1
        return self.graph.incident_edges(account)


class GraphProvider:
    """In-memory variant of the file provider, for library use and tests."""

    def __init__(self, graph):
        self.graph = graph
        self.calls = 0

    def fetch_edges(self, account: str) -> list[TransferEdge]:
        self.calls += 1
        return self.graph.incident_edges(account)


class HttpProvider:
    """Etherscan-compatible account API client.

    Queries module=account with action=txlist (native currency) and
    action=tokentx (token transfers). Responses are cached on disk keyed
    by (account, action) so a rerun against the same cache is
    deterministic and offline.
    """

    RETRIES = 3
    BACKOFF = 1.0

    def __init__(self, base_url: str, *, chain_symbol: str = "ETH",
                 cache_dir: str | None = None, api_key: str | None = None,
                 pacing: float = 0.2, session: requests.Session | None = None):
        self.base_url = base_url.rstrip("/")
        self.chain_symbol = chain_symbol
        self.cache_dir = Path(cache_dir) if cache_dir else None
        if self.cache_dir:
            self.cache_dir.mkdir(parents=True, exist_ok=True)
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV, "")
        self.pacing = pacing
        self.session = session or requests.Session()
        self.calls = 0
        self._last_request = 0.0

    def _cache_path(self, account: str, action: str) -> Path | None:
        if not self.cache_dir:
            return None
        digest = hashlib.sha256(f"{account}:{action}".encode()).hexdigest()[:24]
        return self.cache_dir / f"{action}_{digest}.json"

    def _request(self, account: str, action: str) -> list[dict]:
        cache = self._cache_path(account, action)
        if cache is not None and cache.exists():
            return json.loads(cache.read_text())
        params = {
            "module": "account",
            "action": action,
            "address": account,
            "sort": "asc",
            "apikey": self.api_key,
        }
        last_error: Exception | None = None
        for attempt in range(self.RETRIES):
            wait = self.pacing - (time.monotonic() - self._last_request)
            if wait > 0:
                time.sleep(wait)
            self._last_request = time.monotonic()
            try:
                self.calls += 1
                resp = self.session.get(self.base_url, params=params, timeout=30)
                resp.raise_for_status()
                payload = resp.json()
            except (requests.RequestException, ValueError) as exc:
                last_error = exc
                time.sleep(self.BACKOFF * 2 ** attempt)
                continue
            result = payload.get("result")
            if not isinstance(result, list):
                # "No transactions found" comes back as status 0.
                if str(payload.get("status")) == "0":
                    result = []
                else:
                    last_error = ProviderError(f"bad response: {payload}")
                    time.sleep(self.BACKOFF * 2 ** attempt)
                    continue
            if cache is not None:
                cache.write_text(json.dumps(result, sort_keys=True))
            return result
        raise ProviderError(f"{action} failed for {account}: {last_error}")

    def fetch_edges(self, account: str) -> list[TransferEdge]:
        edges: list[TransferEdge] = []
        for action in ("txlist", "tokentx"):
            for i, rec in enumerate(self._request(account, action), start=1):
                try:
                    edges.append(_parse_record(rec, i, self.chain_symbol))
                except IngestError:
                    continue
        return edges
