"""Time the compiled kernels against the numpy fallback on representative inputs.

    python benchmarks/bench_kernels.py [--repeat 5]

Prints one line per kernel with the best-of-N time for each implementation
and the speedup.  Without a built extension only the fallback is timed.
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from semioblivious import kernels
from semioblivious.graphs import hypercube
from semioblivious.oblivious import valiant_routing


def _pool(rng, npaths, m, longest=8):
    lengths = rng.integers(1, longest + 1, npaths)
    ptr = np.concatenate([[0], np.cumsum(lengths)]).astype(np.int64)
    edges = np.concatenate([rng.choice(m, k, replace=False) for k in lengths]).astype(np.int64)
    return ptr, edges


def workloads(rng):
    """name -> callable(mod) exercising that kernel once."""
    m = 2000
    ptr, edges = _pool(rng, 20_000, m)
    w = rng.random(ptr.size - 1)
    gamma = float(np.median(np.bincount(edges, weights=np.repeat(w, np.diff(ptr)), minlength=m)))
    blocks = np.arange(0, ptr.size, 4, dtype=np.int64)
    if blocks[-1] != ptr.size - 1:
        blocks = np.append(blocks, ptr.size - 1)
    g = rng.normal(size=ptr.size - 1)
    logx = np.log(rng.random(ptr.size - 1))

    cube = valiant_routing(hypercube(7))
    n = cube.graph.n
    perm = rng.permutation(n)
    s_arr = np.arange(n, dtype=np.int64)
    t_arr = perm.astype(np.int64)
    w_mat = rng.integers(0, n, size=(200, n)).astype(np.int64)
    ones = np.ones(n)
    buf = np.zeros(2 * cube.dim + 1, dtype=np.int64)

    def walks(mod):
        for s in range(n):
            mod.loop_erased_walk(cube.dim, s, int(w_mat[0, s]), int(t_arr[s]), buf)

    return {
        "path_loads": lambda mod: mod.path_loads(ptr, edges, w, m),
        "greedy_cut": lambda mod: mod.greedy_cut(ptr, edges, w, gamma, m),
        "block_min": lambda mod: mod.block_min(blocks, g),
        "eg_step": lambda mod: mod.eg_step(blocks, logx, g, 0.1),
        "loop_erased_walk x128": walks,
        "valiant_trial_loads 200x128": lambda mod: mod.valiant_trial_loads(cube.dim, cube.eid, s_arr, t_arr, ones,
                                                                          w_mat, cube.graph.m),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    impls = kernels.implementations()
    print(f"active implementation: {kernels.IMPLEMENTATION}; available: {', '.join(impls)}")
    for name, job in workloads(np.random.default_rng(args.seed)).items():
        best = {}
        for label, mod in impls.items():
            timer = timeit.Timer(lambda: job(mod))
            number, _ = timer.autorange()
            best[label] = min(timer.repeat(args.repeat, number)) / number
        cells = "  ".join(f"{label} {sec * 1e3:9.3f} ms" for label, sec in best.items())
        speedup = f"  x{best['python'] / best['cython']:.1f}" if "cython" in best else ""
        print(f"{name:28s} {cells}{speedup}")


if __name__ == "__main__":
    main()
