"""Congestion solvers over path systems, the weak routing process, the
reductions between demand classes, and randomized rounding."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import dijkstra

from . import kernels
from .graphs import Graph, cut_table
from .minmax import MinMaxResult, NonConvergenceError, minimize_max
from .rng import stream
from .routing_core import (Demand, ExplicitRouting, Pair, Path, PathLimitError, PathSystem, Routing, RoutingError,
                           all_simple_paths, combine_routings, congestion, is_integral_amount)
from .oblivious import shortest_paths

PRUNE = 1e-10


class SolverError(RuntimeError):
    """Base class for solver failures."""


class RoundingError(SolverError):
    def __init__(self, message: str, achieved: float, bound: float):
        super().__init__(message)
        self.achieved = achieved
        self.bound = bound


class OracleTooLarge(SolverError):
    """Instance exceeds the exhaustive oracle's size precondition."""


class ContractViolation(SolverError):
    """A supplied weak router broke its contract."""


@dataclass
class SolveResult:
    routing: ExplicitRouting
    achieved: float
    lower_bound: float
    certificate: np.ndarray
    iterations: int
    dilation: int = 0


# -- fractional congestion on a fixed path system ------------------------------

def _incidence(g: Graph, d: Demand, columns: Mapping[Pair, list[Path]]):
    """Edge x path matrix with entry d(s,t) when the path uses the edge."""
    pairs = sorted(d)
    sizes = np.array([len(columns[pr]) for pr in pairs], dtype=np.int64)
    block_ptr = np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)
    rows, cols, vals = [], [], []
    c = 0
    for pr in pairs:
        amount = float(d[pr])
        for p in columns[pr]:
            rows.extend(p.edges)
            cols.extend([c] * len(p.edges))
            vals.extend([amount] * len(p.edges))
            c += 1
    A = sp.csr_matrix((vals, (rows, cols)), shape=(g.m, c))
    return pairs, block_ptr, A


def _routing_from(g: Graph, pairs, block_ptr, x, columns) -> ExplicitRouting:
    dist = {}
    for b, pr in enumerate(pairs):
        w = x[block_ptr[b]:block_ptr[b + 1]]
        keep = w >= PRUNE * w.max()
        total = w[keep].sum()
        dist[pr] = [(p, float(wi / total)) for p, wi, k in zip(columns[pr], w, keep) if k]
    return ExplicitRouting(g, dist, validate=False)


def _result(g, d, pairs, block_ptr, columns, res: MinMaxResult) -> SolveResult:
    routing = _routing_from(g, pairs, block_ptr, res.x, columns)
    report = congestion(routing, d)
    return SolveResult(routing, report.max_congestion, min(res.lower, report.max_congestion),
                       res.y, res.iterations, report.dilation)


def min_congestion_fractional(p: PathSystem, d: Demand, eps: float = 0.05, max_iter: int = 20_000) -> SolveResult:
    """Best fractional routing of ``d`` using only the paths in ``p``."""
    if not 0 < eps <= 0.5:
        raise ValueError("eps must lie in (0, 1/2]")
    g = p.graph
    d.check_vertices(g.n)
    columns = {}
    for pr in d:
        if not p[pr]:
            raise RoutingError(f"pair {pr} has positive demand but no candidate path")
        columns[pr] = list(p[pr])
    if not d:
        return SolveResult(ExplicitRouting(g, {}), 0.0, 0.0, np.zeros(g.m), 0)
    pairs, block_ptr, A = _incidence(g, d, columns)
    res = minimize_max(A, block_ptr, eps, max_iter=max_iter)
    return _result(g, d, pairs, block_ptr, columns, res)


# -- fractional optimum over all paths (column generation) ----------------------

def _collapsed_lengths(g: Graph, y: np.ndarray, floor: float):
    """Sparse symmetric length matrix keeping the shortest of parallel edges."""
    best: dict[Pair, tuple[float, int]] = {}
    for e, (u, v) in enumerate(g.edges):
        key = (min(u, v), max(u, v))
        length = y[e] + floor
        if key not in best or length < best[key][0]:
            best[key] = (length, e)
    keys = list(best)
    us = np.array([k[0] for k in keys])
    vs = np.array([k[1] for k in keys])
    lens = np.array([best[k][0] for k in keys])
    W = sp.csr_matrix((np.concatenate([lens, lens]), (np.concatenate([us, vs]), np.concatenate([vs, us]))),
                      shape=(g.n, g.n))
    return W, best


def _trace(pred_row, s: int, t: int, best) -> Path:
    verts = [t]
    while verts[-1] != s:
        verts.append(int(pred_row[verts[-1]]))
    verts.reverse()
    edges = tuple(best[(min(a, b), max(a, b))][1] for a, b in zip(verts, verts[1:]))
    return Path(tuple(verts), edges)


def optimal_fractional_congestion(g: Graph, d: Demand, eps: float = 0.05, max_rounds: int = 200,
                                  max_iter: int = 20_000) -> SolveResult:
    """opt over all simple paths, by column generation with shortest-path pricing.

    The lower bound is the LP dual value ``sum d(s,t) dist_y(s,t)`` for the
    normalized edge weights ``y`` of the restricted solve, which is valid for
    the unrestricted problem.
    """
    if not 0 < eps <= 0.5:
        raise ValueError("eps must lie in (0, 1/2]")
    d.check_vertices(g.n)
    if not d:
        return SolveResult(ExplicitRouting(g, {}), 0.0, 0.0, np.zeros(g.m), 0)
    columns = {pr: [shortest_paths(g, *pr, limit=1 << 30)[0]] for pr in d}
    sources = sorted({s for s, _ in d})
    inner = eps / 2
    x0 = None
    best_lb = 0.0
    total_iter = 0
    for _ in range(max_rounds):
        used = {pr: list(cols) for pr, cols in columns.items()}
        pairs, block_ptr, A = _incidence(g, d, used)
        res = minimize_max(A, block_ptr, inner, x0=x0, max_iter=max_iter)
        total_iter += res.iterations
        y = res.y / res.y.sum()
        floor = 1e-12 * max(float(y.max()), 1e-300)
        W, best = _collapsed_lengths(g, y, floor)
        dist, pred = dijkstra(W, directed=False, indices=sources, return_predecessors=True)
        row_of = {s: i for i, s in enumerate(sources)}
        lb = 0.0
        added = False
        x_parts = []
        for b, pr in enumerate(pairs):
            s, t = pr
            i = row_of[s]
            lb += d[pr] * max(dist[i, t] - floor * (g.n - 1), 0.0)
            xb = res.x[block_ptr[b]:block_ptr[b + 1]]
            current = min(sum(y[e] for e in p.edges) for p in columns[pr])
            if dist[i, t] < current * (1 - 1e-9):
                cand = _trace(pred[i], s, t, best)
                if cand not in columns[pr]:
                    columns[pr].append(cand)
                    theta = 1.0 / len(columns[pr])
                    xb = np.append(xb * (1 - theta), theta)
                    added = True
            x_parts.append(xb)
        best_lb = max(best_lb, lb)
        if res.value <= (1 + eps) * best_lb:
            break
        if not added:
            inner = max(inner / 2, 1e-6)
        x0 = np.concatenate(x_parts)
    else:
        raise NonConvergenceError(f"column generation did not close the gap in {max_rounds} rounds")
    out = _result(g, d, pairs, block_ptr, used, res)
    out.lower_bound = min(best_lb, out.achieved)
    out.iterations = total_iter
    out.certificate = res.y
    return out


# -- exhaustive integral optimum ------------------------------------------------

def optimal_integral_congestion(g: Graph, d: Demand, limit: int = 10**7) -> tuple[int, ExplicitRouting]:
    """Exact integral optimum by branch-and-bound over unit path choices.

    Paths of each pair are tried shortest first (ties by vertex sequence) and
    pairs in sorted order, so among optimal assignments the lexicographically
    first one is returned.  Units of the same pair choose paths in
    nondecreasing index order, which removes permutation symmetry.
    """
    d.check_vertices(g.n)
    if not all(is_integral_amount(v, 0) for v in d.values()):
        raise ValueError("integral optimum needs an integral demand")
    pairs = sorted(d)
    options: dict[Pair, list[Path]] = {}
    space = 1
    for pr in pairs:
        try:
            paths = all_simple_paths(g, *pr, limit=limit)
        except PathLimitError:
            raise OracleTooLarge(f"pair {pr} has more than {limit} simple paths") from None
        options[pr] = sorted(paths, key=lambda p: (p.hop, p.vertices, p.edges))
        space *= len(paths) ** int(d[pr])
        if space > limit:
            raise OracleTooLarge(f"search space exceeds {limit} assignments")
    if not pairs:
        return 0, ExplicitRouting(g, {})

    units = [(pr, options[pr]) for pr in pairs for _ in range(int(d[pr]))]
    loads = np.zeros(g.m, dtype=np.int64)
    choice = [0] * len(units)
    best_value = [len(units) + 1]
    best_choice: list[int] = []

    def search(i: int, current: int, floor: int):
        if current >= best_value[0]:
            return
        if i == len(units):
            best_value[0] = current
            best_choice[:] = choice
            return
        pr, paths = units[i]
        start = floor if i > 0 and units[i - 1][0] == pr else 0
        for j in range(start, len(paths)):
            edges = list(paths[j].edges)
            loads[edges] += 1
            choice[i] = j
            search(i + 1, max(current, int(loads[edges].max())), j)
            loads[edges] -= 1

    search(0, 0, 0)
    dist: dict[Pair, dict[Path, float]] = {}
    for (pr, paths), j in zip(units, best_choice):
        slot = dist.setdefault(pr, {})
        slot[paths[j]] = slot.get(paths[j], 0.0) + 1.0 / d[pr]
    return best_value[0], ExplicitRouting(g, {pr: list(w.items()) for pr, w in dist.items()}, validate=False)


# -- the weak routing process -------------------------------------------------

@dataclass
class WeakRouteResult:
    subdemand: Demand
    routing: ExplicitRouting
    deleted_mass: float
    cut_edges: list[int]
    deltas: np.ndarray
    congestion: float
    gamma: float

    @property
    def cut_loads(self) -> list[float]:
        """Load on each cut edge at the moment it was cut."""
        return [float(self.deltas[e]) for e in self.cut_edges]


def _pool(d: Demand, columns: Mapping[Pair, list[Path]]):
    pairs = sorted(d)
    path_ptr = [0]
    edges: list[int] = []
    owners = []
    for pr in pairs:
        for p in columns[pr]:
            edges.extend(p.edges)
            path_ptr.append(len(edges))
            owners.append(pr)
    return pairs, np.asarray(path_ptr, dtype=np.int64), np.asarray(edges, dtype=np.int64), owners


def greedy_cut_weak_route(p: PathSystem, d: Demand, gamma: float,
                          draw_counts: Mapping[Pair, Mapping[Path, int]] | None = None) -> WeakRouteResult:
    """Delete all weight through each overloaded edge, scanning edges in index order.

    The initial weight of a path is ``d(s,t)`` times its share of the draws
    for its pair.  ``draw_counts`` defaults to the multiplicities stored on
    ``p``; without any, every path counts once.
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    g = p.graph
    d.check_vertices(g.n)
    counts = draw_counts if draw_counts is not None else p.counts
    columns = {}
    w0 = []
    for pr in sorted(d):
        paths = list(p[pr])
        if not paths:
            raise RoutingError(f"pair {pr} has positive demand but no candidate path")
        mult = np.array([(counts or {}).get(pr, {}).get(q, 1 if counts is None else 0) for q in paths], dtype=float)
        if mult.sum() <= 0:
            raise RoutingError(f"draw counts for pair {pr} are all zero")
        columns[pr] = paths
        w0.extend(d[pr] * mult / mult.sum())
    pairs, path_ptr, path_edges, owners = _pool(d, columns)
    w, cut, deltas = kernels.greedy_cut(path_ptr, path_edges, np.asarray(w0, dtype=float), float(gamma), g.m)

    sub: dict[Pair, float] = {}
    dist: dict[Pair, list[tuple[Path, float]]] = {}
    k = 0
    for pr in pairs:
        ws = w[k:k + len(columns[pr])]
        k += len(columns[pr])
        total = math.fsum(ws)
        if total > 0:
            sub[pr] = total
            dist[pr] = [(q, float(wi / total)) for q, wi in zip(columns[pr], ws) if wi > 0]
    routing = ExplicitRouting(g, dist, validate=False)
    loads = kernels.path_loads(path_ptr, path_edges, w, g.m)
    return WeakRouteResult(Demand(sub), routing, float(math.fsum(deltas)), [int(e) for e in np.flatnonzero(cut)],
                           deltas, float(loads.max()) if loads.size else 0.0, float(gamma))


# -- weak to strong -----------------------------------------------------------

@dataclass
class StrongRouteResult:
    routing: ExplicitRouting
    rounds: int
    weak_calls: int
    pieces: list[Demand]
    residual: Demand


def round_limit(m: int) -> int:
    """ceil(log_{3/2} m), computed without floating error at exact powers."""
    s, power = 0, 1
    while power < m:
        power *= 1.5
        s += 1
    return s


def _first_path_routing(p: PathSystem, d: Demand) -> ExplicitRouting:
    dist = {}
    for pr in d:
        if not p[pr]:
            raise RoutingError(f"pair {pr} has positive demand but no candidate path")
        dist[pr] = [(p[pr][0], 1.0)]
    return ExplicitRouting(p.graph, dist, validate=False)


def _unpack(out) -> tuple[Demand, ExplicitRouting]:
    if isinstance(out, WeakRouteResult):
        return out.subdemand, out.routing
    sub, routing = out
    return sub, routing


def weak_to_strong(p: PathSystem, d: Demand, weak: Callable[[Demand], object], m: int | None = None,
                   tol: float = 1e-9) -> StrongRouteResult:
    """Turn a router that handles half of any sub-demand into one that routes all of it.

    Each round keeps the pairs where the weak router delivered at least a
    quarter of the remaining demand, routes them in full with the weak
    routing, and continues on the rest.  After at most ceil(log_{3/2} m)
    rounds the leftover has size at most siz(d)/m and goes on each pair's
    first candidate path.
    """
    m = p.graph.m if m is None else m
    limit = round_limit(m)
    remaining = d
    size0 = d.size()
    acc_d, acc_r = Demand(), ExplicitRouting(p.graph, {})
    pieces = []
    calls = 0
    while remaining and calls < limit and remaining.size() > size0 / m:
        sub, routing = _unpack(weak(remaining))
        calls += 1
        for pr, v in sub.items():
            if v > remaining[pr] * (1 + tol) + tol:
                raise ContractViolation(f"weak router returned {v} > {remaining[pr]} on pair {pr}")
        if sub.size() < 0.5 * remaining.size() * (1 - tol):
            raise ContractViolation(f"weak router routed {sub.size()} of {remaining.size()}, less than half")
        kept = [pr for pr in remaining if sub[pr] >= 0.25 * remaining[pr]]
        piece = remaining.restricted(kept)
        pieces.append(piece)
        acc_d, acc_r = combine_routings(acc_d, acc_r, piece, routing)
        remaining = Demand({pr: v for pr, v in remaining.items() if pr not in piece})
    rounds = calls
    if remaining:
        acc_d, acc_r = combine_routings(acc_d, acc_r, remaining, _first_path_routing(p, remaining))
        rounds += 1
    final = ExplicitRouting(p.graph, {pr: acc_r.distribution(*pr) for pr in d}, validate=False)
    return StrongRouteResult(final, rounds, calls, pieces, remaining)


# -- special demands to general demands ------------------------------------------

@dataclass
class BucketRouteResult:
    routing: ExplicitRouting
    buckets: dict[int, Demand]
    levels: int


def bucket_levels(n: int, m: int) -> int:
    """l = ceil(log2(n^2 m)) + 1."""
    return (n * n * m - 1).bit_length() + 1


def bucket_index(amount: float, alpha: int, cut: int, levels: int) -> int:
    """i with amount / (alpha + cut) in [2^(i-l-1), 2^(i-l))."""
    _, exponent = math.frexp(amount / (alpha + cut))
    return exponent + levels


def poly_sufficiency_split(d: Demand, g: Graph) -> tuple[Demand, Demand, float]:
    """Scale ``d`` to size n^2 m and split off entries below one.

    Returns ``(large, small, scale)`` with ``large + small == scale * d``.
    """
    size = d.size()
    if size == 0:
        return Demand(), Demand(), 1.0
    scale = g.n * g.n * g.m / size
    scaled = d.scaled(scale)
    large = Demand({pr: v for pr, v in scaled.items() if v >= 1})
    small = Demand({pr: v for pr, v in scaled.items() if v < 1})
    return large, small, scale


def special_bucket_route(p: PathSystem, d: Demand, g: Graph, alpha: int,
                         special_router: Callable[[Demand], object]) -> BucketRouteResult:
    """Route ``d`` (entries in [1, n^2 m]) through per-bucket special demands.

    Pairs are bucketed by the dyadic scale of ``d(s,t)/(alpha + cut(s,t))``;
    bucket ``i`` is dominated by the alpha-special demand on its support
    scaled by ``2^(i-l)``, so the routing the special router returns for that
    special demand also serves the bucket.
    """
    d.check_vertices(g.n)
    top = g.n * g.n * g.m
    for pr, v in d.items():
        if not 1 <= v <= top:
            raise ValueError(f"entry {v} of pair {pr} outside [1, n^2 m]; split the demand first")
    cuts = cut_table(g)
    levels = bucket_levels(g.n, g.m)
    grouped: dict[int, dict[Pair, float]] = {}
    for pr, v in d.items():
        i = bucket_index(v, alpha, cuts(*pr), levels)
        if not 1 <= i <= 2 * levels:
            raise AssertionError(f"bucket {i} outside [1, {2 * levels}]")
        grouped.setdefault(i, {})[pr] = v
    buckets = {i: Demand(entries) for i, entries in sorted(grouped.items())}
    acc_d, acc_r = Demand(), ExplicitRouting(g, {})
    for i, bucket in buckets.items():
        special = Demand({pr: alpha + cuts(*pr) for pr in bucket})
        out = special_router(special)
        routing = getattr(out, "routing", out)
        acc_d, acc_r = combine_routings(acc_d, acc_r, bucket, routing)
    final = ExplicitRouting(g, {pr: acc_r.distribution(*pr) for pr in d}, validate=False)
    return BucketRouteResult(final, buckets, levels)


def route_general(p: PathSystem, d: Demand, g: Graph, alpha: int,
                  special_router: Callable[[Demand], object]) -> ExplicitRouting:
    """Scale, split off the sub-unit part, bucket the rest, and merge."""
    large, small, _ = poly_sufficiency_split(d, g)
    acc_d, acc_r = Demand(), ExplicitRouting(g, {})
    if large:
        routed = special_bucket_route(p, large, g, alpha, special_router)
        acc_d, acc_r = combine_routings(acc_d, acc_r, large, routed.routing)
    if small:
        acc_d, acc_r = combine_routings(acc_d, acc_r, small, _first_path_routing(p, small))
    return ExplicitRouting(g, {pr: acc_r.distribution(*pr) for pr in d}, validate=False)


# -- randomized rounding --------------------------------------------------------

@dataclass
class RoundResult:
    routing: ExplicitRouting
    congestion: float
    bound: float
    reference: float
    retries: int


def _as_explicit(r: Routing) -> ExplicitRouting:
    if isinstance(r, ExplicitRouting):
        return r
    return ExplicitRouting(r.graph, provider=r.distribution, validate=False)


def randomized_round(r: Routing, d: Demand, max_retries: int = 50, seed: int = 0) -> RoundResult:
    """Integral routing of ``d`` from ``d(s,t)`` independent draws per pair.

    Attempt ``a`` uses the streams keyed by ``(seed, a, s, t)``; the first
    attempt with congestion at most ``2 cong(R, d) + 3 ln m`` is returned.
    """
    if not all(is_integral_amount(v, 0) for v in d.values()):
        raise ValueError("randomized rounding needs an integral demand")
    r = _as_explicit(r)
    g = r.graph
    reference = congestion(r, d).max_congestion
    bound = 2 * reference + 3 * math.log(g.m)
    best = math.inf
    for attempt in range(max_retries):
        loads = np.zeros(g.m, dtype=np.int64)
        dist: dict[Pair, list[tuple[Path, float]]] = {}
        for (s, t), amount in d.items():
            k = int(amount)
            st = stream(seed, attempt, s, t)
            drawn: dict[Path, int] = {}
            for _ in range(k):
                q = r.sample_path(s, t, st.random())
                drawn[q] = drawn.get(q, 0) + 1
                loads[list(q.edges)] += 1
            dist[(s, t)] = [(q, c / k) for q, c in drawn.items()]
        value = float(loads.max()) if loads.size else 0.0
        if value <= bound:
            return RoundResult(ExplicitRouting(g, dist, validate=False), value, bound, reference, attempt)
        best = min(best, value)
    raise RoundingError(f"no attempt met {bound:.6g} in {max_retries} tries (best {best:.6g})", best, bound)
