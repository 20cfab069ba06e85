import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from semioblivious.graphs import Graph, binary_tree, cut_table, gadget_c, gadget_roles, hypercube
from semioblivious.oblivious import shortest_path_uniform, valiant_routing
from semioblivious.routing_core import ExplicitRouting, RoutingError, dump_path_system
from semioblivious.sampler import alpha_plus_cut_sample, alpha_sample, draw_paths

from conftest import two_cliques


def test_single_path_support_gives_that_path():
    g = binary_tree(7)
    r = shortest_path_uniform(g)
    for alpha in (1, 3):
        p = alpha_sample(r, alpha, seed=4)
        assert all(len(p[pr]) == 1 and p[pr][0] == r.distribution(*pr)[0][0] for pr in r.pairs())


def test_alpha_one_is_one_sparse():
    p = alpha_sample(valiant_routing(hypercube(4)), 1, seed=1)
    assert p.sparsity() == 1
    assert len(p) == 16 * 15


def test_valiant_dim3_alpha4_sparse_and_reproducible():
    r = valiant_routing(hypercube(3))
    p = alpha_sample(r, 4, seed=2024)
    assert len(p) == 56 and p.is_alpha_sparse(4)
    assert dump_path_system(p, True) == dump_path_system(alpha_sample(valiant_routing(hypercube(3)), 4, 2024), True)
    assert all(sum(p.multiplicity(pr)) == 4 for pr in p)


def test_samples_are_subsets_of_support():
    r = valiant_routing(hypercube(4))
    p = alpha_sample(r, 3, seed=8)
    for pr in p:
        support = {q for q, w in r.distribution(*pr) if w > 0}
        assert set(p[pr]) <= support


def test_plus_cut_counts():
    g = gadget_c(4, 2)
    roles = gadget_roles(g)
    r = shortest_path_uniform(g)
    pair = (roles.v1, roles.v2)
    p = alpha_plus_cut_sample(r, g, 2, seed=1, pairs=[pair])
    assert sum(p.multiplicity(pair)) == 4
    assert p.is_alpha_plus_cut_sparse(2)
    tree = binary_tree(6)
    p = alpha_plus_cut_sample(shortest_path_uniform(tree), tree, 3, seed=1)
    assert all(len(p[pr]) == 1 and sum(p.multiplicity(pr)) == 4 for pr in p)


def test_plus_cut_two_cliques():
    n = 4
    g = two_cliques(n)
    r = shortest_path_uniform(g)
    p = alpha_plus_cut_sample(r, g, 1, seed=3, pairs=[(0, n + 1)])
    assert cut_table(g)(0, n + 1) == n
    assert sum(p.multiplicity((0, n + 1))) == 1 + n


def test_restricted_sample_equals_restricting_full_sample():
    r = valiant_routing(hypercube(3))
    full = alpha_sample(r, 3, seed=17)
    chosen = [(0, 7), (4, 1), (6, 2)]
    part = alpha_sample(r, 3, seed=17, pairs=chosen)
    assert part == full.restricted(chosen)


def test_samples_nest_across_alpha():
    r = valiant_routing(hypercube(4))
    small, large = alpha_sample(r, 2, 5), alpha_sample(r, 8, 5)
    assert all(set(small[pr]) <= set(large[pr]) for pr in small)


def test_vectorised_sampling_matches_stream_draws():
    r = valiant_routing(hypercube(3))
    p = alpha_sample(r, 5, seed=12)
    for pr in [(0, 7), (3, 5)]:
        drawn = draw_paths(r, *pr, 5, 12)
        assert set(drawn) == set(p[pr])
        assert tuple(drawn.count(q) for q in p[pr]) == p.multiplicity(pr)


def test_undefined_pair_rejected():
    g = hypercube(2)
    partial = shortest_path_uniform(g, pairs=[(0, 3)])
    with pytest.raises(RoutingError):
        alpha_sample(partial, 1, 0, pairs=[(1, 2)])
    with pytest.raises(ValueError):
        alpha_sample(partial, 0, 0)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**63))
def test_sparsity_holds_for_every_seed(alpha, seed):
    g = hypercube(3)
    p = alpha_sample(valiant_routing(g), alpha, seed)
    assert p.is_alpha_sparse(alpha)
    q = alpha_plus_cut_sample(valiant_routing(g), g, alpha, seed)
    assert q.is_alpha_plus_cut_sparse(alpha)


def test_independent_seeds_overlap_like_independent_draws():
    # with alpha = 1, two seeds pick the same path with probability sum_p w_p^2 per pair
    g = hypercube(5)
    r = valiant_routing(g)
    a, b = alpha_sample(r, 1, seed=1), alpha_sample(r, 1, seed=2)
    pairs = list(a)
    probs = np.array([sum(w * w for _, w in r.distribution(*pr)) for pr in pairs])
    same = sum(a[pr] == b[pr] for pr in pairs)
    mean, sd = probs.sum(), math.sqrt((probs * (1 - probs)).sum())
    assert abs(same - mean) <= 3 * sd
