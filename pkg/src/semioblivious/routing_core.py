"""Demands, paths, path systems, routings and the congestion algebra."""
from __future__ import annotations

import contextlib
import gc
import math
from bisect import bisect_right
from collections import Counter
from dataclasses import dataclass, field
from itertools import accumulate
from typing import Callable, Iterable, Iterator, Mapping, Sequence

import numpy as np

from .graphs import Graph, GraphError, ParseError, content_lines, parse_graph_lines

Pair = tuple[int, int]

WEIGHT_TOL = 1e-9
DENSE_LIMIT = 1024


@contextlib.contextmanager
def gc_paused():
    """Suspend the cyclic collector while building many acyclic objects.

    Sampling and enumeration allocate hundreds of thousands of paths and
    tuples; each allocation burst otherwise triggers full collections that
    rescan everything already built.  Usable as a decorator.
    """
    was_enabled = gc.isenabled()
    gc.disable()
    try:
        yield
    finally:
        if was_enabled:
            gc.enable()


class RoutingError(ValueError):
    """Invalid routing, missing pair distribution, or incompatible inputs."""


class PathLimitError(RoutingError):
    """Simple-path enumeration exceeded its cutoff."""


# -- paths -------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class Path:
    vertices: tuple[int, ...]
    edges: tuple[int, ...]
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        # paths are dictionary keys in every hot loop; hash once
        object.__setattr__(self, "_hash", hash((self.vertices, self.edges)))

    def __hash__(self):
        return self._hash

    @property
    def s(self) -> int:
        return self.vertices[0]

    @property
    def t(self) -> int:
        return self.vertices[-1]

    @property
    def hop(self) -> int:
        return len(self.edges)

    def reversed(self) -> "Path":
        return Path(self.vertices[::-1], self.edges[::-1])

    def __repr__(self):
        return f"Path({'-'.join(map(str, self.vertices))})"


def path_key(p: Path) -> tuple:
    """Sort key equal to the dataclass ordering, but compared natively."""
    return (p.vertices, p.edges)


def make_path(g: Graph, vertices: Sequence[int], edges: Sequence[int] | None = None) -> Path:
    """Path through ``vertices``; hops default to the lowest-index parallel edge."""
    vertices = tuple(int(v) for v in vertices)
    if edges is None:
        chosen = []
        for u, v in zip(vertices, vertices[1:]):
            between = g.edges_between(u, v)
            if not between:
                raise RoutingError(f"vertices {u} and {v} are not adjacent")
            chosen.append(between[0])
        edges = chosen
    p = Path(vertices, tuple(int(e) for e in edges))
    validate_path(g, p)
    return p


def validate_path(g: Graph, p: Path) -> None:
    if len(p.vertices) < 2 or len(p.edges) != len(p.vertices) - 1:
        raise RoutingError(f"{p!r} must have at least one hop and one edge per hop")
    if len(set(p.vertices)) != len(p.vertices):
        raise RoutingError(f"{p!r} is not simple")
    for u, v, e in zip(p.vertices, p.vertices[1:], p.edges):
        if not 0 <= e < g.m or set(g.edges[e]) != {u, v}:
            raise RoutingError(f"edge {e} does not join {u} and {v}")


def default_edges(g: Graph, p: Path) -> bool:
    return all(g.edges_between(u, v)[0] == e for u, v, e in zip(p.vertices, p.vertices[1:], p.edges))


def _dfs_paths(g: Graph, s: int, want: Callable[[int], bool], limit: int | None):
    """All simple paths from ``s`` ending at vertices accepted by ``want``."""
    found: dict[int, list[Path]] = {}
    total = 0
    adj = g.adjacency
    verts = [s]
    edges: list[int] = []
    on_path = {s}
    stack = [iter(adj[s])]
    while stack:
        step = next(stack[-1], None)
        if step is None:
            stack.pop()
            on_path.discard(verts.pop())
            if edges:
                edges.pop()
            continue
        v, e = step
        if v in on_path:
            continue
        verts.append(v)
        edges.append(e)
        on_path.add(v)
        if want(v):
            found.setdefault(v, []).append(Path(tuple(verts), tuple(edges)))
            total += 1
            if limit is not None and total > limit:
                raise PathLimitError(f"more than {limit} simple paths from vertex {s}")
        stack.append(iter(adj[v]))
    return found, total


def all_simple_paths(g: Graph, s: int, t: int, limit: int | None = None) -> list[Path]:
    """Every simple s-t path (parallel edges give distinct paths), DFS order."""
    g.check_vertex(s)
    g.check_vertex(t)
    if s == t:
        return []
    found, _ = _dfs_paths(g, s, lambda v: v == t, limit)
    return found.get(t, [])


def simple_paths_from(g: Graph, s: int, targets: Iterable[int], limit: int | None = None) -> dict[int, list[Path]]:
    wanted = set(targets)
    found, _ = _dfs_paths(g, s, wanted.__contains__, limit)
    return found


# -- demands -----------------------------------------------------------------

def _clean_amount(x) -> float | int:
    if isinstance(x, (int, np.integer)):
        return int(x)
    x = float(x)
    if not math.isfinite(x):
        raise RoutingError("demand amounts must be finite")
    return x


class Demand(Mapping[Pair, float]):
    """Sparse nonnegative demand on ordered pairs; zero entries are dropped."""

    __slots__ = ("_entries",)

    def __init__(self, entries: Mapping[Pair, float] | Iterable[tuple[Pair, float]] | None = None):
        items = entries.items() if isinstance(entries, Mapping) else (entries or ())
        clean: dict[Pair, float] = {}
        for (s, t), amount in items:
            s, t = int(s), int(t)
            if s == t:
                raise RoutingError(f"diagonal demand entry ({s}, {s})")
            if s < 0 or t < 0:
                raise RoutingError("negative vertex index")
            amount = _clean_amount(amount)
            if amount < 0:
                raise RoutingError(f"negative demand {amount} on ({s}, {t})")
            if amount > 0:
                clean[(s, t)] = clean.get((s, t), 0) + amount
        self._entries = dict(sorted(clean.items()))

    def __getitem__(self, pair: Pair) -> float:
        return self._entries.get(pair, 0)

    def __contains__(self, pair) -> bool:
        return pair in self._entries

    def __iter__(self) -> Iterator[Pair]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __repr__(self):
        return f"Demand({self._entries!r})"

    def __eq__(self, other):
        if isinstance(other, Demand):
            return self._entries == other._entries
        return NotImplemented

    def __hash__(self):
        return hash(tuple(self._entries.items()))

    def size(self) -> float:
        return math.fsum(self._entries.values())

    def support(self) -> frozenset[Pair]:
        return frozenset(self._entries)

    def __add__(self, other: "Demand") -> "Demand":
        merged = dict(self._entries)
        for k, v in other.items():
            merged[k] = merged.get(k, 0) + v
        return Demand(merged)

    def scaled(self, c: float) -> "Demand":
        if c < 0:
            raise RoutingError("scale must be nonnegative")
        return Demand({k: v * c for k, v in self._entries.items()})

    def restricted(self, pairs: Iterable[Pair]) -> "Demand":
        keep = set(pairs)
        return Demand({k: v for k, v in self._entries.items() if k in keep})

    def max_entry(self) -> float:
        return max(self._entries.values(), default=0)

    def check_vertices(self, n: int) -> None:
        for s, t in self._entries:
            if s >= n or t >= n:
                raise GraphError(f"demand pair ({s}, {t}) outside [0, {n})")

    def to_dense(self, n: int) -> np.ndarray:
        if n > DENSE_LIMIT:
            raise RoutingError(f"dense demand matrices are limited to n <= {DENSE_LIMIT}")
        out = np.zeros((n, n))
        for (s, t), v in self._entries.items():
            out[s, t] = v
        return out


def size_of(d: Demand) -> float:
    return d.size()


def support_of(d: Demand) -> frozenset[Pair]:
    return d.support()


def is_integral_amount(x: float, tol: float = 1e-9) -> bool:
    return abs(x - round(x)) <= tol


@dataclass(frozen=True)
class DemandClass:
    integral: bool
    zero_one: bool
    permutation: bool
    special: bool
    alpha: int


def classify(d: Demand, g: Graph, alpha: int) -> DemandClass:
    from .graphs import cut_table

    d.check_vertices(g.n)
    integral = all(is_integral_amount(v, 0) for v in d.values())
    zero_one = all(v == 1 for v in d.values())
    permutation = zero_one
    if permutation:
        out_deg = Counter(s for s, _ in d)
        in_deg = Counter(t for _, t in d)
        permutation = max(out_deg.values(), default=0) <= 1 and max(in_deg.values(), default=0) <= 1
    cuts = cut_table(g) if d else None
    special = all(v == alpha + cuts(s, t) for (s, t), v in d.items())
    return DemandClass(integral, zero_one, permutation, special, alpha)


def format_amount(x: float) -> str:
    if isinstance(x, int) or float(x).is_integer():
        return str(int(x))
    return repr(float(x))


def dump_demand(d: Demand) -> str:
    return "".join(f"{s + 1} {t + 1} {format_amount(v)}\n" for (s, t), v in d.items())


def load_demand(text: str, n: int | None = None) -> Demand:
    entries = []
    for no, line in content_lines(text):
        parts = line.split()
        if len(parts) != 3:
            raise ParseError("expected '<s> <t> <amount>'", no)
        try:
            s, t = int(parts[0]) - 1, int(parts[1]) - 1
            amount = int(parts[2]) if parts[2].lstrip("+-").isdigit() else float(parts[2])
        except ValueError:
            raise ParseError(f"bad demand line {line!r}", no) from None
        if s < 0 or t < 0 or (n is not None and (s >= n or t >= n)):
            raise ParseError("vertex index out of range", no)
        entries.append(((s, t), amount))
    try:
        return Demand(entries)
    except RoutingError as exc:
        raise ParseError(str(exc)) from None


# -- path systems ------------------------------------------------------------

class PathSystem:
    """Per-pair sets of simple paths on a fixed graph.

    ``counts`` optionally records how many times each path was drawn when
    the system came from with-replacement sampling.
    """

    def __init__(self, graph: Graph, paths: Mapping[Pair, Iterable[Path]],
                 counts: Mapping[Pair, Mapping[Path, int]] | None = None, validate: bool = True):
        self.graph = graph
        self._paths: dict[Pair, tuple[Path, ...]] = {}
        for (s, t), ps in sorted(paths.items()):
            uniq = tuple(sorted(set(ps), key=path_key))
            if validate:
                graph.check_vertex(s)
                graph.check_vertex(t)
                for p in uniq:
                    validate_path(graph, p)
                    if (p.s, p.t) != (s, t):
                        raise RoutingError(f"{p!r} stored under pair ({s}, {t})")
            self._paths[(s, t)] = uniq
        self.counts: dict[Pair, dict[Path, int]] | None = None
        if counts is not None:
            self.counts = {pair: dict(c) for pair, c in counts.items()} if validate else dict(counts)

    def __getitem__(self, pair: Pair) -> tuple[Path, ...]:
        return self._paths.get(pair, ())

    def __contains__(self, pair) -> bool:
        return pair in self._paths

    def __iter__(self):
        return iter(self._paths)

    def __len__(self):
        return len(self._paths)

    def items(self):
        return self._paths.items()

    def __eq__(self, other):
        if not isinstance(other, PathSystem):
            return NotImplemented
        return self.graph == other.graph and self._paths == other._paths

    def sparsity(self) -> int:
        return max((len(ps) for ps in self._paths.values()), default=0)

    def is_alpha_sparse(self, alpha: int) -> bool:
        return self.sparsity() <= alpha

    def is_alpha_plus_cut_sparse(self, alpha: int) -> bool:
        from .graphs import cut_table

        cuts = cut_table(self.graph)
        return all(len(ps) <= alpha + cuts(s, t) for (s, t), ps in self._paths.items())

    def multiplicity(self, pair: Pair) -> tuple[int, ...]:
        if self.counts is None:
            raise RoutingError("path system carries no draw multiplicities")
        c = self.counts.get(pair, {})
        return tuple(c.get(p, 0) for p in self[pair])

    def restricted(self, pairs: Iterable[Pair]) -> "PathSystem":
        keep = [pr for pr in pairs if pr in self._paths]
        counts = None
        if self.counts is not None:
            counts = {pr: self.counts[pr] for pr in keep if pr in self.counts}
        return PathSystem(self.graph, {pr: self._paths[pr] for pr in keep}, counts, validate=False)

    def union(self, other: "PathSystem") -> "PathSystem":
        if other.graph != self.graph:
            raise RoutingError("path systems live on different graphs")
        merged = {pr: set(ps) for pr, ps in self._paths.items()}
        for pr, ps in other.items():
            merged.setdefault(pr, set()).update(ps)
        return PathSystem(self.graph, merged, validate=False)


# -- routings ----------------------------------------------------------------

Distribution = tuple[tuple[Path, float], ...]


class Routing:
    """Per-pair distributions over simple paths.  Subclasses implement
    :meth:`distribution` and/or :meth:`sample_path`."""

    graph: Graph
    explicit = False

    def defined(self, s: int, t: int) -> bool:
        return s != t and 0 <= s < self.graph.n and 0 <= t < self.graph.n

    def distribution(self, s: int, t: int) -> Distribution:
        raise NotImplementedError

    def sample_path(self, s: int, t: int, u: float) -> Path:
        """Path drawn by inverse transform from a uniform ``u`` in [0, 1)."""
        raise NotImplementedError

    def edge_probabilities(self, s: int, t: int) -> dict[int, float] | None:
        """Exact ``Pr[e in R(s, t)]`` per edge, or None if unavailable."""
        return None


def _check_distribution(g: Graph, s: int, t: int, dist: Distribution, validate: bool) -> Distribution:
    if not dist:
        raise RoutingError(f"empty distribution for pair ({s}, {t})")
    total = 0.0
    for p, w in dist:
        if w < 0:
            raise RoutingError(f"negative weight {w} on pair ({s}, {t})")
        total += w
        if validate:
            validate_path(g, p)
            if (p.s, p.t) != (s, t):
                raise RoutingError(f"{p!r} listed under pair ({s}, {t})")
    if abs(total - 1.0) > WEIGHT_TOL:
        raise RoutingError(f"weights of pair ({s}, {t}) sum to {total!r}, not 1")
    return dist


class ExplicitRouting(Routing):
    """Enumerated distributions, either given up front or built lazily per pair.

    ``provider(s, t)`` is consulted for pairs missing from ``dist``; its
    results are cached.  ``pairs`` restricts the defined pairs (default: the
    pairs in ``dist`` when no provider is given, every ordered pair
    otherwise).
    """

    explicit = True

    def __init__(self, graph: Graph, dist: Mapping[Pair, Iterable[tuple[Path, float]]] | None = None,
                 provider: Callable[[int, int], Distribution] | None = None,
                 pairs: Iterable[Pair] | None = None, validate: bool = True):
        self.graph = graph
        self._validate = validate
        self._dist: dict[Pair, Distribution] = {}
        for (s, t), entries in (dist or {}).items():
            self._dist[(s, t)] = _check_distribution(graph, s, t, tuple((p, float(w)) for p, w in entries), validate)
        self._provider = provider
        self._pairs = frozenset(pairs) if pairs is not None else None
        self._cum: dict[Pair, tuple[list[float], Distribution]] = {}

    def defined(self, s: int, t: int) -> bool:
        if self._pairs is not None:
            return (s, t) in self._pairs
        if self._provider is None:
            return (s, t) in self._dist
        return super().defined(s, t)

    def pairs(self) -> list[Pair]:
        if self._pairs is not None:
            return sorted(self._pairs)
        if self._provider is None:
            return sorted(self._dist)
        n = self.graph.n
        return [(s, t) for s in range(n) for t in range(n) if s != t]

    def distribution(self, s: int, t: int) -> Distribution:
        dist = self._dist.get((s, t))
        if dist is not None:
            return dist
        if self._provider is None or not self.defined(s, t):
            raise RoutingError(f"routing has no distribution for pair ({s}, {t})")
        dist = _check_distribution(self.graph, s, t, tuple(self._provider(s, t)), self._validate)
        self._dist[(s, t)] = dist
        return dist

    def support(self, s: int, t: int) -> tuple[Path, ...]:
        return tuple(p for p, w in self.distribution(s, t) if w > 0)

    def sample_path(self, s: int, t: int, u: float) -> Path:
        hit = self._cum.get((s, t))
        if hit is None:
            dist = self.distribution(s, t)
            hit = (list(accumulate(w for _, w in dist)), dist)
            self._cum[(s, t)] = hit
        cum, dist = hit
        i = bisect_right(cum, u * cum[-1])
        if i >= len(dist):
            i = max(j for j, (_, w) in enumerate(dist) if w > 0)
        return dist[i][0]

    def edge_probabilities(self, s: int, t: int) -> dict[int, float]:
        probs: dict[int, float] = {}
        for p, w in self.distribution(s, t):
            for e in p.edges:
                probs[e] = probs.get(e, 0.0) + w
        return probs

    def path_system(self, pairs: Iterable[Pair] | None = None) -> PathSystem:
        """supp(R), optionally restricted to ``pairs``."""
        pairs = self.pairs() if pairs is None else pairs
        return PathSystem(self.graph, {pr: self.support(*pr) for pr in pairs}, validate=False)

    def without_zero_weights(self) -> "ExplicitRouting":
        return ExplicitRouting(self.graph, {pr: [(p, w) for p, w in self.distribution(*pr) if w > 0]
                                            for pr in self.pairs()}, validate=False)


def single_path_routing(g: Graph, paths: Mapping[Pair, Path]) -> ExplicitRouting:
    return ExplicitRouting(g, {pr: [(p, 1.0)] for pr, p in paths.items()})


# -- congestion --------------------------------------------------------------

@dataclass
class CongestionReport:
    loads: np.ndarray
    max_congestion: float
    dilation: int
    ratio: float | None = None
    stderr: float = 0.0

    @property
    def completion_time(self) -> float:
        return self.max_congestion + self.dilation


def congestion(r: Routing, d: Demand, baseline: float | None = None) -> CongestionReport:
    """Exact per-edge loads ``sum d(s,t) Pr[e in R(s,t)]`` of an explicit routing."""
    if not r.explicit:
        raise RoutingError("exact congestion needs an explicit routing; use expected_congestion")
    loads = np.zeros(r.graph.m)
    dil = 0
    for (s, t), amount in d.items():
        if not r.defined(s, t):
            raise RoutingError(f"routing has no distribution for demand pair ({s}, {t})")
        for p, w in r.distribution(s, t):
            if w > 0:
                loads[list(p.edges)] += amount * w
                dil = max(dil, p.hop)
    return _report(loads, dil, baseline)


def _report(loads: np.ndarray, dil: int, baseline: float | None, stderr: float = 0.0) -> CongestionReport:
    top = float(loads.max()) if loads.size else 0.0
    ratio = None
    if baseline is not None:
        ratio = top / baseline if baseline > 0 else (1.0 if top == 0 else math.inf)
    return CongestionReport(loads, top, dil, ratio, stderr)


def expected_congestion(r: Routing, d: Demand, samples: int = 2000, seed: int = 0) -> CongestionReport:
    """Congestion of any routing: exact when edge probabilities are available,
    otherwise a Monte Carlo estimate of the per-edge expectation."""
    if r.explicit:
        return congestion(r, d)
    loads = np.zeros(r.graph.m)
    exact = True
    for (s, t), amount in d.items():
        probs = r.edge_probabilities(s, t)
        if probs is None:
            exact = False
            break
        for e, pr in probs.items():
            loads[e] += amount * pr
    if exact:
        return _report(loads, _generative_dilation(r, d), None)
    from .rng import stream

    acc = np.zeros(r.graph.m)
    acc2 = np.zeros(r.graph.m)
    dil = 0
    for i in range(samples):
        trial = np.zeros(r.graph.m)
        for (s, t), amount in d.items():
            p = r.sample_path(s, t, stream(seed, i, s, t).random())
            trial[list(p.edges)] += amount
            dil = max(dil, p.hop)
        acc += trial
        acc2 += trial * trial
    mean = acc / samples
    var = np.maximum(acc2 / samples - mean * mean, 0.0)
    top = int(np.argmax(mean)) if mean.size else 0
    return _report(mean, dil, None, float(math.sqrt(var[top] / samples)) if mean.size else 0.0)


def _generative_dilation(r: Routing, d: Demand) -> int:
    dil = 0
    for s, t in d:
        try:
            dist = r.distribution(s, t)
        except (NotImplementedError, RoutingError):
            return 0
        dil = max(dil, max(p.hop for p, w in dist if w > 0))
    return dil


def combine_routings(d1: Demand, r1: ExplicitRouting, d2: Demand, r2: ExplicitRouting) -> tuple[Demand, ExplicitRouting]:
    """Demand-weighted mixture routing for ``d1 + d2``."""
    if r1.graph != r2.graph:
        raise RoutingError("routings live on different graphs")
    d = d1 + d2
    if r1 is r2 or not d2:
        return d, r1
    if not d1:
        return d, r2
    dist: dict[Pair, list[tuple[Path, float]]] = {}
    for (s, t), total in d.items():
        mix: dict[Path, float] = {}
        for amount, r in ((d1[(s, t)], r1), (d2[(s, t)], r2)):
            if amount > 0:
                for p, w in r.distribution(s, t):
                    mix[p] = mix.get(p, 0.0) + amount * w / total
        norm = math.fsum(mix.values())
        dist[(s, t)] = [(p, w / norm) for p, w in mix.items()]

    def fallback(s: int, t: int) -> Distribution:
        return r1.distribution(s, t) if r1.defined(s, t) else r2.distribution(s, t)

    out = ExplicitRouting(r1.graph, dist, provider=fallback, validate=False)
    out._pairs = frozenset(d) | frozenset(pr for pr in (r1.pairs() + r2.pairs()))
    return d, out


@dataclass(frozen=True)
class BoundsCheck:
    ok: bool
    lower: float
    value: float
    upper: float
    violated: str | None = None

    def __bool__(self):
        return self.ok


def congestion_bounds_check(r: Routing, d: Demand, g: Graph, tol: float = 1e-9) -> BoundsCheck:
    """siz(d)/m <= cong(R, d) <= siz(d)."""
    value = congestion(r, d).max_congestion
    size = d.size()
    lower, upper = size / g.m, size
    slack = tol * max(1.0, size)
    violated = None
    if value < lower - slack:
        violated = "lower"
    elif value > upper + slack:
        violated = "upper"
    return BoundsCheck(violated is None, lower, value, upper, violated)


# -- path system / routing text format ----------------------------------------

def format_path(g: Graph, p: Path, *tokens: str) -> str:
    line = f"path {p.s + 1} {p.t + 1} : " + " ".join(str(v + 1) for v in p.vertices)
    if not default_edges(g, p):
        line += " @ " + " ".join(str(e + 1) for e in p.edges)
    if tokens:
        line += " " + " ".join(tokens)
    return line


def parse_path_line(g: Graph, line: str, no: int | None = None) -> tuple[Path, dict[str, str]]:
    parts = line.split()
    if len(parts) < 5 or parts[0] != "path" or parts[3] != ":":
        raise ParseError("expected 'path <s> <t> : v1 ... vk'", no)
    verts: list[int] = []
    edges: list[int] | None = None
    extra: dict[str, str] = {}
    target = verts
    for tok in parts[4:]:
        if "=" in tok:
            key, _, val = tok.partition("=")
            extra[key] = val
        elif tok == "@":
            edges = []
            target = edges
        else:
            try:
                target.append(int(tok) - 1)
            except ValueError:
                raise ParseError(f"bad token {tok!r}", no) from None
    try:
        s, t = int(parts[1]) - 1, int(parts[2]) - 1
        p = make_path(g, verts, edges)
    except (ValueError, RoutingError, GraphError) as exc:
        raise ParseError(str(exc), no) from None
    if (p.s, p.t) != (s, t):
        raise ParseError(f"path endpoints do not match pair ({s + 1}, {t + 1})", no)
    return p, extra


def split_sections(text: str) -> tuple[Graph, str, list[tuple[int, str]]]:
    """Split an embedded-graph file into (graph, section header, body lines)."""
    lines = content_lines(text)
    for i, (_, line) in enumerate(lines):
        if line.startswith(("paths", "routing")):
            return parse_graph_lines(lines[:i]), line, lines[i + 1:]
    raise ParseError("missing 'paths' or 'routing' section header")


def dump_path_system(p: PathSystem, with_counts: bool = False) -> str:
    from .graphs import dump_graph

    out = [dump_graph(p.graph).rstrip("\n"), "paths"]
    for (s, t), ps in p.items():
        counts = p.counts.get((s, t), {}) if (with_counts and p.counts is not None) else None
        for path in ps:
            tokens = (f"x={counts.get(path, 0)}",) if counts is not None else ()
            out.append(format_path(p.graph, path, *tokens))
    return "\n".join(out) + "\n"


def load_path_system(text: str) -> PathSystem:
    g, header, body = split_sections(text)
    if header != "paths":
        raise ParseError(f"expected a 'paths' section, found {header!r}")
    paths: dict[Pair, list[Path]] = {}
    counts: dict[Pair, dict[Path, int]] = {}
    for no, line in body:
        p, extra = parse_path_line(g, line, no)
        paths.setdefault((p.s, p.t), []).append(p)
        if "x" in extra:
            counts.setdefault((p.s, p.t), {})[p] = int(extra["x"])
    return PathSystem(g, paths, counts or None, validate=False)


def dump_explicit_routing(r: ExplicitRouting) -> str:
    from .graphs import dump_graph

    out = [dump_graph(r.graph).rstrip("\n"), "routing explicit"]
    for s, t in r.pairs():
        for p, w in r.distribution(s, t):
            out.append(format_path(r.graph, p, f"w={w!r}"))
    return "\n".join(out) + "\n"


def parse_explicit_routing(g: Graph, body: list[tuple[int, str]]) -> ExplicitRouting:
    dist: dict[Pair, list[tuple[Path, float]]] = {}
    for no, line in body:
        p, extra = parse_path_line(g, line, no)
        if "w" not in extra:
            raise ParseError("routing path line needs w=<weight>", no)
        dist.setdefault((p.s, p.t), []).append((p, float(extra["w"])))
    return ExplicitRouting(g, dist, validate=False)
