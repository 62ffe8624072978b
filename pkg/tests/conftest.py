import random

import pytest

from fundtrace.graph import TransactionGraph, TransferEdge


def build_graph(rows):
    """rows: (src, tgt, amount, ts, token, hash) tuples."""
    return TransactionGraph([TransferEdge(*row) for row in rows])


FIG_SWAP_ROWS = [
    ("a", "u", 100.0, 10, "USDC", "h1"),
    ("u", "dex", 100.0, 20, "USDC", "h2"),
    ("dex", "u", 0.05, 20, "ETH", "h2"),
    ("u", "x", 0.03, 30, "ETH", "h3"),
    ("u", "y", 0.02, 40, "ETH", "h4"),
]


@pytest.fixture
def swap_redirect_graph():
    """Incoming USDC at u is exchanged to ETH under one hash and spent
    onward through two later ETH transfers."""
    return build_graph(FIG_SWAP_ROWS)


def random_txgraph(seed, n_nodes=20, n_edges=60, n_tokens=3, swap_rate=0.0):
    rng = random.Random(seed)
    nodes = [f"n{i:02d}" for i in range(n_nodes)]
    tokens = [f"tk{i}" for i in range(n_tokens)]
    rows = []
    h = 0
    for _ in range(n_edges):
        src, tgt = rng.sample(nodes, 2)
        h += 1
        rows.append((src, tgt, rng.uniform(0.5, 100.0), rng.randint(1, 10_000),
                     rng.choice(tokens), f"x{h:05d}"))
        if swap_rate and rng.random() < swap_rate:
            # counter leg at src under the same hash with a different token
            other = rng.choice([t for t in tokens if t != rows[-1][4]])
            rows.append((tgt, src, rng.uniform(0.5, 100.0), rows[-1][3],
                         other, f"x{h:05d}"))
    return build_graph(rows)


def random_path_seed(seed, n_nodes=20):
    rng = random.Random(seed)
    return f"n{rng.randrange(n_nodes):02d}"
