"""Reference tracing methods: BFS, boolean and proportional taint, the
classic degree-normalized local push, and a dense exact solver used as a
test oracle.

The taint methods keep a temporal guard: taint never travels along an
edge dated before its source became dirty, matching how the rank methods
reason about time on account graphs.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from ._accel import push_kernel
from .graph import TransactionGraph, TransferEdge


@dataclass
class TaintResult:
    subgraph: TransactionGraph
    taint: dict[str, float]  # dirty value (proportional) or 1.0 (boolean)
    held: dict[str, float] | None = None  # resting dirty value (haircut)


def _induced(edges: list[TransferEdge], extra_nodes: set[str]
             ) -> TransactionGraph:
    sub = TransactionGraph(list(edges))
    sub.nodes.update(extra_nodes)
    return sub


def bfs_trace(graph: TransactionGraph, source: str, depth: int = 2
              ) -> TransactionGraph:
    """All nodes within ``depth`` directed hops of source, with the
    traversed edges."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    visited = {source}
    frontier = [source]
    edges: list[TransferEdge] = []
    for _ in range(depth):
        nxt = []
        for u in frontier:
            for e in graph.out_edges(u):
                edges.append(e)
                if e.tgt not in visited:
                    visited.add(e.tgt)
                    nxt.append(e.tgt)
        frontier = nxt
    return _induced([e for e in edges if e.tgt in visited], {source})


def poison_trace(graph: TransactionGraph, source: str, depth: int = 2
                 ) -> TaintResult:
    """Boolean taint: everything a dirty account later sends to is dirty.

    An edge carries taint only if it is dated at or after the moment its
    source first became dirty. Dijkstra on (hop, first-dirty-time).
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    # Label-correcting search over (node, hops, first-dirty-time) states;
    # a state is pruned when a recorded one has both fewer hops and an
    # earlier dirty time.
    labels: dict[str, list[tuple[int, float]]] = {source: [(0, float("-inf"))]}
    work: list[tuple[str, int, float]] = [(source, 0, float("-inf"))]
    edges: list[TransferEdge] = []
    while work:
        u, hops, since = work.pop()
        if hops >= depth:
            continue
        for e in graph.out_edges(u):
            if e.timestamp < since:
                continue
            cand = (hops + 1, float(e.timestamp))
            edges.append(e)
            known = labels.setdefault(e.tgt, [])
            if any(h <= cand[0] and t <= cand[1] for h, t in known):
                continue
            known[:] = [(h, t) for h, t in known
                        if not (cand[0] <= h and cand[1] <= t)]
            known.append(cand)
            work.append((e.tgt, cand[0], cand[1]))
    tainted = set(labels)
    sub = _induced([e for e in edges if e.tgt in tainted], {source})
    return TaintResult(sub, {u: 1.0 for u in tainted})


def haircut_trace(graph: TransactionGraph, source: str,
                  cutoff_fraction: float = 0.001) -> TaintResult:
    """Proportional taint: dirty value splits across later outgoing
    edges by amount; a parcel below cutoff_fraction of the source's
    initial dirty value stops propagating."""
    if not 0.0 < cutoff_fraction <= 1.0:
        raise ValueError("cutoff_fraction must be in (0,1]")
    initial = sum(e.amount for e in graph.out_edges(source))
    if initial <= 0.0:
        return TaintResult(_induced([], {source}), {source: 0.0})
    floor = cutoff_fraction * initial
    received: dict[str, float] = {source: initial}
    held: dict[str, float] = {source: initial}
    edges_used: list[TransferEdge] = []
    # Parcels processed in chronological order; seq breaks heap ties.
    # Subsequent hops need a strictly later timestamp, so every parcel
    # path has strictly increasing times and propagation terminates.
    heap: list[tuple[float, int, str, float]] = [(float("-inf"), 0, source, initial)]
    seq = 1
    while heap:
        since, _, u, value = heapq.heappop(heap)
        if value < floor:
            continue
        out = [e for e in graph.out_edges(u) if e.timestamp > since]
        total = sum(e.amount for e in out)
        if total <= 0.0:
            continue  # dirty value rests at u
        held[u] = held.get(u, 0.0) - value
        for e in out:
            share = value * e.amount / total
            if share <= 0.0:
                continue
            received[e.tgt] = received.get(e.tgt, 0.0) + share
            held[e.tgt] = held.get(e.tgt, 0.0) + share
            if share >= floor:
                edges_used.append(e)
                heapq.heappush(heap, (float(e.timestamp), seq, e.tgt, share))
                seq += 1
    taint = {u: v for u, v in received.items() if v >= floor or u == source}
    sub = _induced([e for e in edges_used if e.tgt in taint], {source})
    return TaintResult(sub, taint, held)


def _index_graph(graph: TransactionGraph
                 ) -> tuple[list[str], np.ndarray, np.ndarray]:
    """CSR over distinct out-neighbor pairs with edge multiplicity kept."""
    nodes = sorted(graph.nodes)
    idx = {u: i for i, u in enumerate(nodes)}
    indptr = np.zeros(len(nodes) + 1, dtype=np.int64)
    cols: list[int] = []
    for i, u in enumerate(nodes):
        targets = sorted(idx[e.tgt] for e in graph.out_edges(u))
        cols.extend(targets)
        indptr[i + 1] = len(cols)
    return nodes, indptr, np.asarray(cols, dtype=np.int64)


def appr_rank(graph: TransactionGraph, source: str, alpha: float = 0.15,
              epsilon: float = 1e-3
              ) -> tuple[dict[str, float], dict[str, float]]:
    """Classic local push ignoring amounts, timestamps, and tokens.

    Degree is the out-degree with multiplicity; dangling nodes behave as
    a self-loop so mass stays accounted. Every residual is below epsilon
    on return.
    """
    if source not in graph.nodes:
        return {source: _isolated_rank(alpha, epsilon)}, {source: _isolated_residual(alpha, epsilon)}
    nodes, indptr, indices = _index_graph(graph)
    p, r = push_kernel(indptr, indices, alpha, epsilon, nodes.index(source))
    rank = {nodes[i]: float(p[i]) for i in np.nonzero(p)[0]}
    residual = {nodes[i]: float(r[i]) for i in np.nonzero(r)[0]}
    return rank, residual


def _isolated_rank(alpha: float, epsilon: float) -> float:
    p, r = 0.0, 1.0
    while r >= epsilon:
        p += alpha * r
        r *= 1.0 - alpha
    return p


def _isolated_residual(alpha: float, epsilon: float) -> float:
    r = 1.0
    while r >= epsilon:
        r *= 1.0 - alpha
    return r


def exact_ppr(graph: TransactionGraph, source: str, alpha: float = 0.15
              ) -> dict[str, float]:
    """Dense solve of p = alpha*e + (1-alpha)*p*M with M = D^-1 A.

    Test-scale oracle; dangling nodes get a self-loop, matching
    appr_rank. The result sums to 1.
    """
    nodes = sorted(graph.nodes)
    idx = {u: i for i, u in enumerate(nodes)}
    n = len(nodes)
    M = np.zeros((n, n), dtype=np.float64)
    for i, u in enumerate(nodes):
        out = graph.out_edges(u)
        if not out:
            M[i, i] = 1.0
            continue
        d = len(out)
        for e in out:
            M[i, idx[e.tgt]] += 1.0 / d
    e_s = np.zeros(n)
    e_s[idx[source]] = 1.0
    # p (I - (1-alpha) M) = alpha e_s, solved on the transposed system.
    A = np.eye(n) - (1.0 - alpha) * M
    p = np.linalg.solve(A.T, alpha * e_s)
    return {nodes[i]: float(p[i]) for i in range(n)}
