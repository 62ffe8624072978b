"""Benchmark the compiled push kernel against the pure-python fallback.

Builds a random CSR graph, runs the degree-normalized local push with
both implementations, checks they agree, and reports wall time. The
fallback is what you get at runtime with FUNDTRACE_NO_NUMBA=1.
"""
import argparse
import random
import time

import numpy as np

from fundtrace import _accel


def random_csr(n_nodes, n_edges, seed):
    rng = random.Random(seed)
    adj = [[] for _ in range(n_nodes)]
    for _ in range(n_edges):
        u = rng.randrange(n_nodes)
        v = rng.randrange(n_nodes)
        adj[u].append(v)
    indptr = np.zeros(n_nodes + 1, dtype=np.int64)
    cols = []
    for i, targets in enumerate(adj):
        cols.extend(sorted(targets))
        indptr[i + 1] = len(cols)
    return indptr, np.asarray(cols, dtype=np.int64)


def bench(fn, indptr, indices, alpha, epsilon, repeats):
    times = []
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(indptr, indices, alpha, epsilon, 0)
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nodes", type=int, default=50_000)
    ap.add_argument("--edges", type=int, default=400_000)
    ap.add_argument("--alpha", type=float, default=0.15)
    ap.add_argument("--epsilon", type=float, default=1e-6)
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    indptr, indices = random_csr(args.nodes, args.edges, args.seed)
    print(f"graph: {args.nodes} nodes, {len(indices)} edges, "
          f"alpha={args.alpha}, epsilon={args.epsilon}")

    t_py, (p_py, r_py) = bench(_accel._push_py, indptr, indices,
                               args.alpha, args.epsilon, args.repeats)
    print(f"pure python : {t_py * 1000:9.2f} ms")

    push_nb = getattr(_accel, "_push_nb", None)
    if push_nb is None:
        print("compiled    : numba not available, skipped")
        return

    # warm up the JIT before timing
    push_nb(indptr, indices, args.alpha, args.epsilon, 0)
    t_nb, (p_nb, r_nb) = bench(push_nb, indptr, indices,
                               args.alpha, args.epsilon, args.repeats)
    print(f"compiled    : {t_nb * 1000:9.2f} ms  ({t_py / t_nb:.1f}x)")

    assert np.allclose(p_py, p_nb, atol=1e-12)
    assert np.allclose(r_py, r_nb, atol=1e-12)
    print("outputs identical across implementations")


if __name__ == "__main__":
    main()
