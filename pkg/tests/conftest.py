import itertools

import numpy as np
import pytest

from semioblivious.graphs import Graph


def cycle(n):
    return Graph(n, tuple((i, (i + 1) % n) for i in range(n)))


def path_graph(n):
    return Graph(n, tuple((i, i + 1) for i in range(n - 1)))


def star(leaves):
    """Centre 0, leaves 1..leaves."""
    return Graph(leaves + 1, tuple((0, v) for v in range(1, leaves + 1)))


def two_cliques(n):
    """Two n-cliques joined by a perfect matching of n bridge edges."""
    edges = [(a, b) for a, b in itertools.combinations(range(n), 2)]
    edges += [(n + a, n + b) for a, b in itertools.combinations(range(n), 2)]
    edges += [(i, n + i) for i in range(n)]
    return Graph(2 * n, tuple(edges))


def brute_force_cut(g, s, t):
    """Smallest edge subset whose removal separates s from t, by enumeration."""
    if s == t:
        return 0
    for size in range(g.m + 1):
        for removed in itertools.combinations(range(g.m), size):
            gone = set(removed)
            seen, stack = {s}, [s]
            while stack:
                u = stack.pop()
                for v, e in g.adjacency[u]:
                    if e not in gone and v not in seen:
                        seen.add(v)
                        stack.append(v)
            if t not in seen:
                return size
    raise AssertionError("unreachable")


def random_small_graph(rng, n, m):
    """Connected multigraph with n vertices and exactly m >= n-1 edges."""
    edges = [(int(rng.integers(v)), v) for v in range(1, n)]
    while len(edges) < m:
        u, v = (int(x) for x in rng.choice(n, 2, replace=False))
        edges.append((min(u, v), max(u, v)))
    return Graph(n, tuple(edges))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# one "[PASS]/[FAIL] criterion N: ..." line per acceptance criterion, reprinted after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
