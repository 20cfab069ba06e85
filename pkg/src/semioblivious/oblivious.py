"""Oblivious-routing backends used as sampling sources."""
from __future__ import annotations

import math
from bisect import bisect_right
from collections import Counter, defaultdict
from itertools import accumulate
from typing import Iterable

import numpy as np
import scipy.sparse as sp

from . import kernels
from .graphs import Graph, GraphError, ParseError, cut_table, dump_graph, hypercube_dim
from .minmax import minimize_max
from .routing_core import (Distribution, ExplicitRouting, Pair, Path, PathLimitError, Routing, RoutingError,
                           dump_explicit_routing, gc_paused, parse_explicit_routing, simple_paths_from,
                           split_sections)

VALIANT = "valiant-hypercube"
OPTIMAL = "exhaustive-optimal"
SPUNIFORM = "shortest-path-uniform"

BACKEND_ALIASES = {"valiant": VALIANT, "optimal": OPTIMAL, "spuniform": SPUNIFORM,
                   VALIANT: VALIANT, OPTIMAL: OPTIMAL, SPUNIFORM: SPUNIFORM}


# -- Valiant ---------------------------------------------------------------

class ValiantRouting(Routing):
    """Two-phase bit-fixing routing via a uniform intermediate vertex.

    Each leg fixes differing bits least-significant first; the concatenated
    walk is loop-erased chronologically so the result is a simple path.
    Path probabilities are exact: the intermediate vertex has only ``2**dim``
    values, so :meth:`distribution` enumerates them.
    """

    kind = VALIANT

    def __init__(self, g: Graph):
        dim = hypercube_dim(g)
        if dim is None:
            raise GraphError("Valiant routing needs a generated hypercube")
        self.graph = g
        self.dim = dim
        eid = np.empty(g.n * dim, dtype=np.int64)
        for u in range(g.n):
            for b in range(dim):
                eid[u * dim + b] = g.edges_between(u, u ^ (1 << b))[0]
        self.eid = eid
        self._cache: dict[Pair, Distribution] = {}
        self._buf = np.zeros(2 * dim + 1, dtype=np.int64)

    def path_via(self, s: int, w: int, t: int) -> Path:
        k = kernels.loop_erased_walk(self.dim, s, w, t, self._buf)
        verts = tuple(int(v) for v in self._buf[:k])
        edges = tuple(int(self.eid[u * self.dim + (u ^ v).bit_length() - 1]) for u, v in zip(verts, verts[1:]))
        return Path(verts, edges)

    def sample_path(self, s: int, t: int, u: float) -> Path:
        if not self.defined(s, t):
            raise RoutingError(f"no Valiant path for pair ({s}, {t})")
        return self.path_via(s, min(int(u * self.graph.n), self.graph.n - 1), t)

    def distribution(self, s: int, t: int) -> Distribution:
        dist = self._cache.get((s, t))
        if dist is None:
            if not self.defined(s, t):
                raise RoutingError(f"no Valiant path for pair ({s}, {t})")
            n = self.graph.n
            counts = Counter(self.path_via(s, w, t) for w in range(n))
            dist = tuple((p, c / n) for p, c in sorted(counts.items()))
            self._cache[(s, t)] = dist
        return dist

    def edge_probabilities(self, s: int, t: int) -> dict[int, float]:
        probs: dict[int, float] = defaultdict(float)
        for p, w in self.distribution(s, t):
            for e in p.edges:
                probs[e] += w
        return dict(probs)

    def explicit_routing(self, pairs: Iterable[Pair] | None = None) -> ExplicitRouting:
        return ExplicitRouting(self.graph, provider=self.distribution, pairs=pairs, validate=False)


def valiant_routing(g: Graph) -> ValiantRouting:
    return ValiantRouting(g)


# -- shortest paths --------------------------------------------------------

def _bfs(g: Graph, root: int) -> list[int]:
    dist = [-1] * g.n
    dist[root] = 0
    frontier = [root]
    while frontier:
        nxt = []
        for u in frontier:
            for v, _ in g.adjacency[u]:
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    nxt.append(v)
        frontier = nxt
    return dist


def _dag_successors(g: Graph, to_t: list[int]) -> list[list[tuple[int, int]]]:
    """Per vertex, the (neighbour, edge) steps that get one hop closer to the target."""
    return [[(u, e) for u, e in g.adjacency[v] if to_t[u] == to_t[v] - 1] for v in range(g.n)]


def shortest_paths(g: Graph, s: int, t: int, limit: int = 100_000,
                   down: list[list[tuple[int, int]]] | None = None) -> list[Path]:
    """All shortest s-t paths (parallel edges distinct), in adjacency DFS order.

    ``down`` may supply the shortest-path DAG towards ``t`` (see :func:`_dag_successors`).
    """
    if down is None:
        down = _dag_successors(g, _bfs(g, t))
    out: list[Path] = []

    def walk(v: int, verts: list[int], edges: list[int]):
        if v == t:
            out.append(Path(tuple(verts), tuple(edges)))
            if len(out) > limit:
                raise PathLimitError(f"more than {limit} shortest paths between {s} and {t}")
            return
        for u, e in down[v]:
            verts.append(u)
            edges.append(e)
            walk(u, verts, edges)
            verts.pop()
            edges.pop()

    walk(s, [s], [])
    return out


class ShortestPathUniform(ExplicitRouting):
    """Uniform distribution over all shortest paths, built lazily per pair."""

    kind = SPUNIFORM

    def __init__(self, g: Graph, pairs: Iterable[Pair] | None = None, limit: int = 100_000):
        self.limit = limit
        self._down: dict[int, list[list[tuple[int, int]]]] = {}
        self._cum: dict[int, list[float]] = {}
        # per pair: cumulative weights and the paths unranked so far
        self._ranked: dict[Pair, tuple[list[float], dict[int, Path]]] = {}
        super().__init__(g, provider=self._uniform, pairs=pairs, validate=False)

    def _dag(self, t: int):
        hit = self._down.get(t)
        if hit is None:
            to_t = _bfs(self.graph, t)
            down = _dag_successors(self.graph, to_t)
            count = [0] * self.graph.n
            count[t] = 1
            for v in sorted(range(self.graph.n), key=to_t.__getitem__)[1:]:
                count[v] = sum(count[u] for u, _ in down[v])
            hit = self._down[t] = (down, count)
        return hit

    def _uniform(self, s: int, t: int) -> Distribution:
        paths = shortest_paths(self.graph, s, t, self.limit, self._dag(t)[0])
        return tuple((p, 1.0 / len(paths)) for p in paths)

    def sample_path(self, s: int, t: int, u: float) -> Path:
        """Same draw as inverse-CDF sampling over :meth:`distribution`, without
        enumerating the paths: the index is located on the same cumulative
        weights, then unranked in DFS order through the path counts."""
        known = self._ranked.get((s, t))
        if known is None:
            if (s, t) in self._dist or not self.defined(s, t):
                return super().sample_path(s, t, u)
            total = self._dag(t)[1][s]
            if total > self.limit:
                raise PathLimitError(f"more than {self.limit} shortest paths between {s} and {t}")
            cum = self._cum.get(total)
            if cum is None:
                cum = self._cum[total] = list(accumulate([1.0 / total] * total))
            known = self._ranked[(s, t)] = (cum, {})
        cum, paths = known
        i = min(bisect_right(cum, u * cum[-1]), len(cum) - 1)
        q = paths.get(i)
        if q is None:
            q = paths[i] = self._unrank(s, t, i)
        return q

    def _unrank(self, s: int, t: int, rank: int) -> Path:
        down, count = self._dag(t)
        verts, edges, v = [s], [], s
        while v != t:
            for w, e in down[v]:
                if rank < count[w]:
                    break
                rank -= count[w]
            verts.append(w)
            edges.append(e)
            v = w
        return Path(tuple(verts), tuple(edges))


def shortest_path_uniform(g: Graph, pairs: Iterable[Pair] | None = None) -> ShortestPathUniform:
    return ShortestPathUniform(g, pairs)


# -- restricted-adversary optimal routing ------------------------------------

class OptimalObliviousRouting(ExplicitRouting):
    """Explicit routing returned by :func:`exhaustive_optimal_oblivious`.

    ``competitiveness`` is the worst ratio over the restricted adversary
    family; ``lower_bound`` certifies that no routing on the same pairs does
    better than ``lower_bound`` against that family.
    """

    kind = OPTIMAL
    competitiveness: float = math.nan
    lower_bound: float = math.nan
    iterations: int = 0


@gc_paused()
def exhaustive_optimal_oblivious(g: Graph, eps: float, pairs: Iterable[Pair] | None = None,
                                 max_paths: int = 200_000, max_iter: int = 20_000) -> OptimalObliviousRouting:
    """Oblivious routing minimizing the worst competitive ratio, within 1+eps.

    The adversary is restricted to single-pair demands ``cut(s,t) * e_st``
    (each with optimum exactly 1) and the uniform demand over the routed
    pairs.  The path of ``(t, s)`` is the reversal of the chosen ``(s, t)``
    path, so only unordered pairs are optimized.  ``pairs`` restricts the
    routing to the given ordered pairs (and their reversals' counterparts).
    """
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    n = g.n
    if pairs is None:
        ordered = [(s, t) for s in range(n) for t in range(n) if s != t]
    else:
        ordered = sorted({(int(s), int(t)) for s, t in pairs if s != t})
    for s, t in ordered:
        g.check_vertex(s)
        g.check_vertex(t)
    mult: dict[Pair, int] = Counter((min(s, t), max(s, t)) for s, t in ordered)
    unordered = sorted(mult)
    by_source: dict[int, list[int]] = defaultdict(list)
    for s, t in unordered:
        by_source[s].append(t)

    pool: dict[Pair, list[Path]] = {}
    total = 0
    for s, targets in sorted(by_source.items()):
        found = simple_paths_from(g, s, targets, limit=max_paths - total)
        for t in targets:
            pool[(s, t)] = found[t]
            total += len(found[t])
    if total > max_paths:
        raise PathLimitError(f"{total} simple paths exceed the cutoff {max_paths}")

    cuts = cut_table(g)
    sizes = np.array([len(pool[u]) for u in unordered], dtype=np.int64)
    block_ptr = np.concatenate([[0], np.cumsum(sizes)])
    path_ptr = np.zeros(total + 1, dtype=np.int64)
    flat_edges = []
    col = 0
    for u in unordered:
        for p in pool[u]:
            flat_edges.extend(p.edges)
            col += 1
            path_ptr[col] = len(flat_edges)
    path_edges = np.asarray(flat_edges, dtype=np.int64)
    lengths = np.diff(path_ptr)
    cols = np.repeat(np.arange(total), lengths)
    block_of_col = np.repeat(np.arange(len(unordered)), sizes)
    block_of_entry = block_of_col[cols]

    m = g.m
    uniform_w = np.array([mult[u] for u in unordered], dtype=np.float64)[block_of_entry]
    uniform = sp.csr_matrix((uniform_w, (path_edges, cols)), shape=(m, total))
    opt_u = minimize_max(uniform, block_ptr, eps / 4, max_iter=max_iter).lower

    # single-pair rows: one row per (unordered pair, edge used by that pair)
    keys = block_of_entry * m + path_edges
    row_keys, rows = np.unique(keys, return_inverse=True)
    cut_w = np.array([cuts(*u) for u in unordered], dtype=np.float64)[block_of_entry]
    single = sp.csr_matrix((cut_w, (rows, cols)), shape=(row_keys.size, total))
    A = sp.vstack([single, uniform / opt_u]).tocsr()
    res = minimize_max(A, block_ptr, eps, max_iter=max_iter)

    dist: dict[Pair, list[tuple[Path, float]]] = {}
    x = res.x
    for b, u in enumerate(unordered):
        entries = [(p, float(x[block_ptr[b] + i])) for i, p in enumerate(pool[u])]
        dist[u] = entries
        dist[(u[1], u[0])] = [(p.reversed(), w) for p, w in entries]
    wanted = set(ordered)
    out = OptimalObliviousRouting(g, {pr: d for pr, d in dist.items() if pr in wanted}, validate=False)
    # recompute the uniform row unscaled so exact instances (trees) report exactly 1
    value = max(float((single @ x).max()) if single.shape[0] else 0.0, float((uniform @ x).max()) / opt_u)
    out.competitiveness = value
    out.lower_bound = min(res.lower, value)
    out.iterations = res.iterations
    return out


def build_backend(kind: str, g: Graph, eps: float = 0.05, pairs: Iterable[Pair] | None = None) -> Routing:
    kind = BACKEND_ALIASES.get(kind, kind)
    if kind == VALIANT:
        return valiant_routing(g)
    if kind == SPUNIFORM:
        return shortest_path_uniform(g, pairs)
    if kind == OPTIMAL:
        return exhaustive_optimal_oblivious(g, eps, pairs)
    raise ValueError(f"unknown backend {kind!r}")


# -- routing files -----------------------------------------------------------

def dump_routing(r: Routing) -> str:
    """Explicit routings list every weighted path; Valiant writes a descriptor."""
    if isinstance(r, ValiantRouting):
        return dump_graph(r.graph) + f"routing {VALIANT}\n"
    if isinstance(r, ExplicitRouting):
        return dump_explicit_routing(r)
    raise RoutingError(f"cannot serialize {type(r).__name__}")


def load_routing(text: str) -> Routing:
    g, header, body = split_sections(text)
    parts = header.split()
    if parts[0] != "routing" or len(parts) != 2:
        raise ParseError(f"bad routing header {header!r}")
    kind = parts[1]
    if kind == VALIANT:
        if body:
            raise ParseError("a Valiant descriptor has no path lines", body[0][0])
        try:
            return valiant_routing(g)
        except GraphError as exc:
            raise ParseError(str(exc)) from None
    if kind == "explicit":
        try:
            return parse_explicit_routing(g, body)
        except RoutingError as exc:
            raise ParseError(str(exc)) from None
    raise ParseError(f"unknown routing kind {kind!r}")
