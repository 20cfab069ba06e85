"""Undirected multigraphs with stable edge indices, generators and min cuts.

Vertices are ``0..n-1`` internally; the text format is 1-based.  Parallel
edges are distinct edges, each with its own index, which is how edge
capacities are modelled throughout the package.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

MAX_HYPERCUBE_DIM = 14


class GraphError(ValueError):
    """Invalid graph (disconnected, self-loop, bad vertex index...)."""


class ParseError(ValueError):
    """Malformed line in one of the text formats."""

    def __init__(self, message: str, line_no: int | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


@dataclass(frozen=True, eq=True)
class Graph:
    n: int
    edges: tuple[tuple[int, int], ...]
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((int(u), int(v)) for u, v in self.edges))
        object.__setattr__(self, "labels", tuple(self.labels))
        if self.n < 2:
            raise GraphError(f"need at least 2 vertices, got {self.n}")
        if self.labels and len(self.labels) != self.n:
            raise GraphError("labels must be empty or have one entry per vertex")
        for i, (u, v) in enumerate(self.edges):
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphError(f"edge {i} has endpoint outside [0, {self.n})")
            if u == v:
                raise GraphError(f"edge {i} is a self-loop at vertex {u}")
        seen = self._reach(0)
        if len(seen) != self.n:
            missing = min(set(range(self.n)) - seen)
            raise GraphError(f"graph is disconnected (vertex {missing} unreachable)")

    def _reach(self, src: int) -> set[int]:
        seen = {src}
        queue = deque([src])
        adj = self.adjacency
        while queue:
            u = queue.popleft()
            for v, _ in adj[u]:
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        return seen

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def adjacency(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """Per vertex, the (neighbour, edge index) pairs in edge order."""
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.n)]
        for i, (u, v) in enumerate(self.edges):
            adj[u].append((v, i))
            adj[v].append((u, i))
        return tuple(tuple(a) for a in adj)

    @cached_property
    def _edge_lookup(self) -> dict[tuple[int, int], tuple[int, ...]]:
        table: dict[tuple[int, int], list[int]] = {}
        for i, (u, v) in enumerate(self.edges):
            table.setdefault((u, v), []).append(i)
            table.setdefault((v, u), []).append(i)
        return {k: tuple(v) for k, v in table.items()}

    def edges_between(self, u: int, v: int) -> tuple[int, ...]:
        return self._edge_lookup.get((u, v), ())

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def label(self, v: int) -> str:
        return self.labels[v] if self.labels else ""

    def check_vertex(self, v: int) -> int:
        if not (0 <= v < self.n):
            raise GraphError(f"vertex {v} outside [0, {self.n})")
        return v

    def vertices_with_label(self, tag: str) -> list[int]:
        return [v for v in range(self.n) if self.label(v) == tag]


# -- text format -----------------------------------------------------------

def parse_graph_lines(lines: Sequence[tuple[int, str]]) -> Graph:
    """Parse ``(line_no, text)`` pairs of a graph block (header first)."""
    if not lines:
        raise ParseError("empty graph block")
    no, head = lines[0]
    parts = head.split()
    if len(parts) != 3 or parts[0] != "graph":
        raise ParseError("expected header 'graph <n> <m>'", no)
    try:
        n, m = int(parts[1]), int(parts[2])
    except ValueError:
        raise ParseError("non-integer n or m in header", no) from None
    edges: list[tuple[int, int]] = []
    labels = [""] * n if n > 0 else []
    has_labels = False
    for no, text in lines[1:]:
        parts = text.split()
        if parts[0] == "label":
            if len(parts) != 3:
                raise ParseError("expected 'label <v> <tag>'", no)
            v = _int(parts[1], no) - 1
            if not 0 <= v < n:
                raise GraphError(f"line {no}: label vertex out of range")
            labels[v] = parts[2]
            has_labels = True
            continue
        if len(parts) != 2:
            raise ParseError("expected '<u> <v>'", no)
        edges.append((_int(parts[0], no) - 1, _int(parts[1], no) - 1))
    if len(edges) != m:
        raise ParseError(f"header announces {m} edges, found {len(edges)}")
    return Graph(n, tuple(edges), tuple(labels) if has_labels else ())


def _int(tok: str, no: int | None) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected an integer, got {tok!r}", no) from None


def content_lines(text: str) -> list[tuple[int, str]]:
    out = []
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append((no, line))
    return out


def load_graph(text: str) -> Graph:
    return parse_graph_lines(content_lines(text))


def dump_graph(g: Graph) -> str:
    out = [f"graph {g.n} {g.m}"]
    out.extend(f"{u + 1} {v + 1}" for u, v in g.edges)
    for v in range(g.n):
        if g.label(v):
            out.append(f"label {v + 1} {g.label(v)}")
    return "\n".join(out) + "\n"


def read_graph(path) -> Graph:
    with open(path) as fh:
        return load_graph(fh.read())


def write_graph(g: Graph, path) -> None:
    with open(path, "w") as fh:
        fh.write(dump_graph(g))


# -- generators --------------------------------------------------------------

def hypercube(dim: int) -> Graph:
    """Hypercube on ``2**dim`` vertices; vertex ids are the bit labels.

    Edge order: by lower endpoint, then by flipped bit (least significant
    first).
    """
    if not 1 <= dim <= MAX_HYPERCUBE_DIM:
        raise GraphError(f"hypercube dimension must be in [1, {MAX_HYPERCUBE_DIM}], got {dim}")
    n = 1 << dim
    edges = []
    for v in range(n):
        for b in range(dim):
            u = v ^ (1 << b)
            if v < u:
                edges.append((v, u))
    return Graph(n, tuple(edges))


def binary_tree(n: int) -> Graph:
    """Heap-shaped tree: vertex ``v > 0`` hangs off ``(v - 1) // 2``."""
    if n < 2:
        raise GraphError("a tree needs at least 2 vertices")
    return Graph(n, tuple(((v - 1) // 2, v) for v in range(1, n)))


def random_graph(n: int, extra: int, seed: int) -> Graph:
    """Random spanning tree plus ``extra`` random edges (parallels allowed).

    Reproducible from ``seed`` alone.
    """
    from .rng import stream

    if n < 2:
        raise GraphError("need at least 2 vertices")
    st = stream(seed, n, extra)
    edges = [(st.randrange(v), v) for v in range(1, n)]
    while len(edges) < n - 1 + extra:
        u, v = st.randrange(n), st.randrange(n)
        if u != v:
            edges.append((min(u, v), max(u, v)))
    return Graph(n, tuple(edges))


def hypercube_dim(g: Graph) -> int | None:
    """Dimension if ``g`` is exactly a hypercube on its integer labels, else None."""
    n = g.n
    if n & (n - 1):
        return None
    dim = n.bit_length() - 1
    if g.m != dim * (n >> 1):
        return None
    seen = set()
    for u, v in g.edges:
        x = u ^ v
        if x & (x - 1):
            return None
        key = (min(u, v), max(u, v))
        if key in seen:
            return None
        seen.add(key)
    return dim


def _c_block(n: int, k: int, offset: int, prefix: str):
    """Vertices and edges of one C(n, k) starting at vertex ``offset``."""
    left = list(range(offset, offset + n))
    v1 = offset + n
    right = list(range(offset + n + 1, offset + 2 * n + 1))
    v2 = offset + 2 * n + 1
    middle = list(range(offset + 2 * n + 2, offset + 2 * n + 2 + k))
    edges = [(s, v1) for s in left]
    edges += [(v2, t) for t in right]
    for u in middle:
        edges += [(v1, u), (u, v2)]
    labels = [prefix + "V1"] * n + [prefix + "v1"] + [prefix + "V2"] * n + [prefix + "v2"]
    labels += [prefix + "K"] * k
    return edges, labels, v1


def gadget_c(n: int, k: int) -> Graph:
    """Two ``n``-leaf stars whose centres are joined through ``k`` middle vertices.

    Vertex order: left leaves, left centre, right leaves, right centre,
    middle vertices.  Edge order: left spokes, right spokes, then for each
    middle vertex its edge to the left centre followed by the right centre.
    """
    if n < 1 or k < 1:
        raise GraphError(f"gadget C needs n >= 1 and k >= 1, got n={n}, k={k}")
    edges, labels, _ = _c_block(n, k, 0, "")
    return Graph(2 * n + 2 + k, tuple(edges), tuple(labels))


def integer_root(x: int, r: int) -> int:
    """floor(x ** (1/r)) computed exactly."""
    if x < 0 or r < 1:
        raise ValueError("need x >= 0, r >= 1")
    lo, hi = 0, 1
    while hi ** r <= x:
        hi *= 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if mid ** r <= x:
            lo = mid
        else:
            hi = mid
    return lo


def gadget_g_copies(n: int) -> list[tuple[int, int]]:
    """The (alpha, k) parameters of the copies making up G(n)."""
    return [(a, integer_root(n, 2 * a)) for a in range(1, n.bit_length())]


def gadget_g(n: int) -> Graph:
    """One C(n, floor(n^(1/(2a)))) per a in 1..floor(log2 n), chained by bridges.

    Copy ``a`` is labelled with the prefix ``"a:"``.  Bridge ``i`` joins the
    left centre of copy ``i`` to the left centre of copy ``i + 1``; bridges
    come after all copy edges in the edge order.
    """
    if n < 2:
        raise GraphError(f"gadget G needs n >= 2, got {n}")
    edges: list[tuple[int, int]] = []
    labels: list[str] = []
    centres = []
    offset = 0
    for a, k in gadget_g_copies(n):
        e, lab, v1 = _c_block(n, k, offset, f"{a}:")
        edges += e
        labels += lab
        centres.append(v1)
        offset += len(lab)
    edges += list(zip(centres, centres[1:]))
    return Graph(offset, tuple(edges), tuple(labels))


@dataclass(frozen=True)
class GadgetRoles:
    left: tuple[int, ...]
    v1: int
    right: tuple[int, ...]
    v2: int
    middle: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.left)

    @property
    def k(self) -> int:
        return len(self.middle)


def gadget_roles(g: Graph, copy: int | None = None) -> GadgetRoles:
    """Recover the star/middle roles of a labelled C gadget (or one copy of G)."""
    prefix = "" if copy is None else f"{copy}:"
    by_tag: dict[str, list[int]] = {}
    for v in range(g.n):
        by_tag.setdefault(g.label(v), []).append(v)
    try:
        left, right = by_tag[prefix + "V1"], by_tag[prefix + "V2"]
        (v1,), (v2,) = by_tag[prefix + "v1"], by_tag[prefix + "v2"]
        middle = by_tag[prefix + "K"]
    except (KeyError, ValueError):
        where = "gadget C" if copy is None else f"copy {copy} of gadget G"
        raise GraphError(f"graph is not labelled as {where}") from None
    return GadgetRoles(tuple(left), v1, tuple(right), v2, tuple(middle))


# -- min cut -----------------------------------------------------------------

def _max_flow(g: Graph, s: int, t: int) -> tuple[int, set[int]]:
    """Unit-capacity Edmonds-Karp; returns the value and the source side."""
    flow = [0] * g.m  # +1: pushed from edges[i][0] to edges[i][1]
    adj = g.adjacency
    edges = g.edges
    value = 0
    while True:
        parent: dict[int, tuple[int, int]] = {s: (-1, -1)}
        queue = deque([s])
        while queue and t not in parent:
            u = queue.popleft()
            for v, e in adj[u]:
                if v in parent:
                    continue
                forward = edges[e][0] == u
                residual = 1 - flow[e] if forward else 1 + flow[e]
                if residual > 0:
                    parent[v] = (u, e)
                    queue.append(v)
        if t not in parent:
            return value, set(parent)
        v = t
        while v != s:
            u, e = parent[v]
            flow[e] += 1 if edges[e][0] == u else -1
            v = u
        value += 1


def min_cut(g: Graph, s: int, t: int) -> int:
    """Number of edges in a minimum s-t cut, parallel edges counted."""
    g.check_vertex(s)
    g.check_vertex(t)
    if s == t:
        return 0
    return _max_flow(g, s, t)[0]


class CutTable:
    """All-pairs min cut values from n - 1 max flows (Gusfield's flow tree)."""

    def __init__(self, g: Graph):
        self.graph = g
        parent = [0] * g.n
        weight = [0] * g.n
        for s in range(1, g.n):
            t = parent[s]
            value, side = _max_flow(g, s, t)
            weight[s] = value
            for i in range(s + 1, g.n):
                if i in side and parent[i] == t:
                    parent[i] = s
        self._tree: list[list[tuple[int, int]]] = [[] for _ in range(g.n)]
        for s in range(1, g.n):
            self._tree[s].append((parent[s], weight[s]))
            self._tree[parent[s]].append((s, weight[s]))
        self._rows: dict[int, list[int]] = {}

    def row(self, s: int) -> list[int]:
        row = self._rows.get(s)
        if row is None:
            row = [0] * self.graph.n
            best = {s: None}
            stack = [s]
            while stack:
                u = stack.pop()
                for v, w in self._tree[u]:
                    if v not in best:
                        cur = best[u]
                        best[v] = w if cur is None else min(cur, w)
                        row[v] = best[v]
                        stack.append(v)
            self._rows[s] = row
        return row

    def __call__(self, s: int, t: int) -> int:
        self.graph.check_vertex(t)
        return self.row(self.graph.check_vertex(s))[t]


_CUT_TABLES: dict[int, tuple[Graph, CutTable]] = {}


def cut_table(g: Graph) -> CutTable:
    """Memoised CutTable for ``g`` (graphs are immutable)."""
    hit = _CUT_TABLES.get(id(g))
    if hit is not None and hit[0] is g:
        return hit[1]
    table = CutTable(g)
    if len(_CUT_TABLES) > 32:
        _CUT_TABLES.clear()
    _CUT_TABLES[id(g)] = (g, table)
    return table


def from_edge_list(n: int, edges: Iterable[tuple[int, int]], labels: Sequence[str] = ()) -> Graph:
    return Graph(n, tuple(edges), tuple(labels))
