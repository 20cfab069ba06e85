"""alpha-samples of an oblivious routing: the sparse path systems under study.

Draws for pair ``(s, t)`` come from a counter-based stream keyed by
``(seed, s, t)``.  Two consequences worth knowing:

* a sample restricted to some pairs equals the full sample restricted
  afterwards, and
* for a fixed seed the draws for a smaller draw count are a prefix of the
  draws for a larger one, so samples at increasing alpha are nested.
"""
from __future__ import annotations

from typing import Iterable

from .graphs import Graph, cut_table
from .rng import derive_many, stream, uniforms
from .routing_core import ExplicitRouting, Pair, Path, PathSystem, Routing, RoutingError, gc_paused


def _pairs_of(r: Routing, pairs: Iterable[Pair] | None) -> list[Pair]:
    if pairs is not None:
        return sorted(set(pairs))
    if isinstance(r, ExplicitRouting):
        return r.pairs()
    n = r.graph.n
    return [(s, t) for s in range(n) for t in range(n) if s != t]


def draw_paths(r: Routing, s: int, t: int, count: int, seed: int) -> list[Path]:
    """``count`` independent with-replacement draws from ``R(s, t)``."""
    if not r.defined(s, t):
        raise RoutingError(f"cannot sample undefined pair ({s}, {t})")
    st = stream(seed, s, t)
    return [r.sample_path(s, t, st.random()) for _ in range(count)]


@gc_paused()
def _sample(r: Routing, counts: dict[Pair, int], seed: int) -> PathSystem:
    paths: dict[Pair, list[Path]] = {}
    mult: dict[Pair, dict[Path, int]] = {}
    pairs = list(counts)
    for s, t in pairs:
        if not r.defined(s, t):
            raise RoutingError(f"cannot sample undefined pair ({s}, {t})")
    if not pairs:
        return PathSystem(r.graph, {}, {}, validate=False)
    keys = derive_many(seed, [s for s, _ in pairs], [t for _, t in pairs])
    width = max(counts.values())
    table = uniforms(keys, width).tolist()
    for (s, t), row in zip(pairs, table):
        drawn: dict[Path, int] = {}
        for u in row[:counts[(s, t)]]:
            q = r.sample_path(s, t, u)
            drawn[q] = drawn.get(q, 0) + 1
        paths[(s, t)] = list(drawn)
        mult[(s, t)] = drawn
    return PathSystem(r.graph, paths, mult, validate=False)


def alpha_sample(r: Routing, alpha: int, seed: int, pairs: Iterable[Pair] | None = None) -> PathSystem:
    """alpha draws per pair, deduplicated; multiplicities kept in ``.counts``."""
    if alpha < 1:
        raise ValueError("alpha must be at least 1")
    return _sample(r, {pr: alpha for pr in _pairs_of(r, pairs)}, seed)


def alpha_plus_cut_sample(r: Routing, g: Graph, alpha: int, seed: int,
                          pairs: Iterable[Pair] | None = None) -> PathSystem:
    if alpha < 1:
        raise ValueError("alpha must be at least 1")
    if r.graph != g:
        raise RoutingError("routing and graph differ")
    cuts = cut_table(g)
    return _sample(r, {pr: alpha + cuts(*pr) for pr in _pairs_of(r, pairs)}, seed)
