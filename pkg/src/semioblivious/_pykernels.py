"""Numpy implementations of the hot loops (fallback for the compiled core).

Layout conventions shared with ``_kernels.pyx``:

* blocks: ``block_ptr`` (int64, len B+1) slices a flat weight vector into
  per-pair simplices; every block is nonempty.
* path pools: ``path_ptr`` (int64, len P+1) slices ``path_edges`` (int64)
  into the edge lists of P paths.
"""
from __future__ import annotations

import numpy as np

IMPLEMENTATION = "python"


def block_min(block_ptr, g):
    return np.minimum.reduceat(g, block_ptr[:-1])


def eg_step(block_ptr, logx, g, eta):
    """Exponentiated-gradient step in log space on a product of simplices.

    Returns ``logx - eta * g`` renormalized so each block log-sums to zero.
    """
    sizes = np.diff(block_ptr)
    starts = block_ptr[:-1]
    z = logx - eta * g
    z = z - np.repeat(np.maximum.reduceat(z, starts), sizes)
    return z - np.repeat(np.log(np.add.reduceat(np.exp(z), starts)), sizes)


def path_loads(path_ptr, path_edges, w, m):
    lengths = np.diff(path_ptr)
    return np.bincount(path_edges, weights=np.repeat(w, lengths), minlength=m).astype(np.float64)


def greedy_cut(path_ptr, path_edges, w0, gamma, m):
    """Sequential edge-deletion process.

    Returns ``(w, cut, deltas)``: surviving weights, a 0/1 mask of edges that
    triggered a deletion, and the mass deleted at each edge step.
    """
    w = np.array(w0, dtype=np.float64)
    lengths = np.diff(path_ptr)
    owner = np.repeat(np.arange(len(lengths)), lengths)
    order = np.argsort(path_edges, kind="stable")
    inc_ptr = np.zeros(m + 1, dtype=np.int64)
    np.cumsum(np.bincount(path_edges, minlength=m), out=inc_ptr[1:])
    inc_paths = owner[order]
    cut = np.zeros(m, dtype=np.int8)
    deltas = np.zeros(m)
    for e in range(m):
        through = inc_paths[inc_ptr[e]:inc_ptr[e + 1]]
        if through.size == 0:
            continue
        live = w[through]
        if live.sum() > gamma:
            cut[e] = 1
            deltas[e] = live.sum()
            w[through] = 0.0
    return w, cut, deltas


def loop_erased_walk(dim, s, w, t, out):
    """Loop-erased bit-fixing walk s -> w -> t on the hypercube.

    Bits are fixed least-significant first on each leg.  Writes the vertex
    sequence into ``out`` and returns its length.
    """
    walk = [s]
    for a, b in ((s, w), (w, t)):
        v = a
        diff = a ^ b
        for bit in range(dim):
            if diff >> bit & 1:
                v ^= 1 << bit
                walk.append(v)
    pos: dict[int, int] = {}
    k = 0
    for v in walk:
        if v in pos:
            keep = pos[v] + 1
            for j in range(keep, k):
                del pos[int(out[j])]
            k = keep
            continue
        out[k] = v
        pos[v] = k
        k += 1
    return k


def valiant_trial_loads(dim, eid, s_arr, t_arr, amounts, w_mat, m):
    """Max edge load per trial for Valiant draws.

    ``w_mat[j, i]`` is the intermediate vertex of pair ``i`` in trial ``j``;
    ``eid[u * dim + b]`` is the edge joining ``u`` and ``u ^ (1 << b)``.
    """
    trials, npairs = w_mat.shape
    out = np.zeros(trials)
    buf = np.zeros(2 * dim + 1, dtype=np.int64)
    for j in range(trials):
        loads = np.zeros(m)
        for i in range(npairs):
            k = loop_erased_walk(dim, int(s_arr[i]), int(w_mat[j, i]), int(t_arr[i]), buf)
            for h in range(k - 1):
                u, v = int(buf[h]), int(buf[h + 1])
                loads[eid[u * dim + (u ^ v).bit_length() - 1]] += amounts[i]
        out[j] = loads.max() if m else 0.0
    return out
