import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from semioblivious.graphs import Graph, ParseError, cut_table, gadget_c, gadget_roles, hypercube
from semioblivious.routing_core import (Demand, ExplicitRouting, Path, PathLimitError, PathSystem, RoutingError,
                                        all_simple_paths, classify, combine_routings, congestion,
                                        congestion_bounds_check, dump_demand, dump_path_system,
                                        expected_congestion, load_demand, load_path_system, make_path,
                                        simple_paths_from, single_path_routing, size_of, support_of)
from semioblivious.oblivious import valiant_routing

from conftest import cycle, star

EDGE = Graph(2, ((0, 1),))
PARALLEL = Graph(2, ((0, 1), (0, 1)))


def test_demand_basics():
    d = Demand({(0, 1): 2, (1, 0): 0, (2, 3): 0.5})
    assert len(d) == 2 and (1, 0) not in d
    assert size_of(d) == 2.5
    assert support_of(d) == {(0, 1), (2, 3)}
    assert size_of(Demand()) == 0 and support_of(Demand()) == frozenset()
    with pytest.raises(RoutingError):
        Demand({(1, 1): 1})
    with pytest.raises(RoutingError):
        Demand({(0, 1): -1})


def test_demand_dense_limit():
    d = Demand({(0, 1): 1})
    assert d.to_dense(3)[0, 1] == 1
    with pytest.raises(RoutingError):
        d.to_dense(2000)


def test_demand_file_round_trip():
    d = Demand({(0, 4): 1, (3, 2): 2.5})
    text = dump_demand(d)
    assert text == "1 5 1\n4 3 2.5\n"
    assert load_demand(text) == d
    with pytest.raises(ParseError):
        load_demand("1 2\n")
    with pytest.raises(ParseError):
        load_demand("1 9 1\n", n=3)


def test_path_basics():
    g = cycle(4)
    p = make_path(g, [0, 1, 2])
    assert (p.s, p.t, p.hop) == (0, 2, 2)
    assert p.reversed().vertices == (2, 1, 0)
    assert p.reversed() != p
    with pytest.raises(RoutingError):
        make_path(g, [0, 2])
    with pytest.raises(RoutingError):
        make_path(g, [0, 1, 0])


def test_all_simple_paths_on_cycle_and_limit():
    g = cycle(5)
    paths = all_simple_paths(g, 0, 2)
    assert sorted(p.vertices for p in paths) == [(0, 1, 2), (0, 4, 3, 2)]
    with pytest.raises(PathLimitError):
        all_simple_paths(hypercube(4), 0, 15, limit=10)
    found = simple_paths_from(g, 0, [1, 2])
    assert len(found[1]) == len(found[2]) == 2


def test_parallel_edges_give_distinct_paths():
    paths = all_simple_paths(PARALLEL, 0, 1)
    assert len(paths) == 2
    assert {p.edges for p in paths} == {(0,), (1,)}


def test_congestion_single_edge():
    r = single_path_routing(EDGE, {(0, 1): make_path(EDGE, [0, 1])})
    rep = congestion(r, Demand({(0, 1): 1}))
    assert list(rep.loads) == [1.0] and rep.max_congestion == 1 and rep.dilation == 1
    assert rep.completion_time == 2


def test_congestion_parallel_split():
    a, b = all_simple_paths(PARALLEL, 0, 1)
    r = ExplicitRouting(PARALLEL, {(0, 1): [(a, 0.5), (b, 0.5)]})
    assert congestion(r, Demand({(0, 1): 1})).max_congestion == 0.5


def test_congestion_on_gadget_middle_routes():
    g = gadget_c(4, 2)
    roles = gadget_roles(g)
    routes = [make_path(g, [roles.v1, u, roles.v2]) for u in roles.middle]
    r = ExplicitRouting(g, {(roles.v1, roles.v2): [(p, 0.5) for p in routes]})
    rep = congestion(r, Demand({(roles.v1, roles.v2): 2}))
    assert rep.max_congestion == 1.0
    middle_edges = [e for p in routes for e in p.edges]
    assert all(rep.loads[e] == 1.0 for e in middle_edges)
    assert rep.loads.sum() == 4.0


def test_congestion_missing_pair_is_an_error():
    r = single_path_routing(EDGE, {(0, 1): make_path(EDGE, [0, 1])})
    with pytest.raises(RoutingError):
        congestion(r, Demand({(1, 0): 1}))


def test_weights_must_sum_to_one():
    a, b = all_simple_paths(PARALLEL, 0, 1)
    with pytest.raises(RoutingError):
        ExplicitRouting(PARALLEL, {(0, 1): [(a, 0.5), (b, 0.4)]})
    ExplicitRouting(PARALLEL, {(0, 1): [(a, 0.5), (b, 0.5 + 1e-10)]})


def test_classify():
    g = gadget_c(4, 2)
    one = classify(Demand({(0, 5): 1}), g, 1)
    assert one.integral and one.zero_one and one.permutation
    two = classify(Demand({(0, 5): 2}), g, 1)
    assert two.integral and not two.zero_one and not two.permutation
    roles = gadget_roles(g)
    special = classify(Demand({(roles.v1, roles.v2): 3 + 2}), g, 3)
    assert special.special
    assert not classify(Demand({(roles.v1, roles.v2): 4}), g, 3).special
    fan_out = classify(Demand({(0, 5): 1, (0, 6): 1}), g, 1)
    assert fan_out.zero_one and not fan_out.permutation


def test_special_demand_size_matches_cut_oracle():
    g = gadget_c(3, 2)
    cuts = cut_table(g)
    pairs = [(0, 4), (3, 7), (1, 2)]
    alpha = 2
    d = Demand({pr: alpha + cuts(*pr) for pr in pairs})
    assert classify(d, g, alpha).special
    assert size_of(d) == sum(alpha + cuts(*pr) for pr in pairs)


@settings(max_examples=50, deadline=None)
@given(st.permutations(list(range(6))), st.sets(st.integers(0, 5)))
def test_classify_monotone_on_subdemands(perm, drop):
    g = hypercube(3)
    d = Demand({(i, perm[i]): 1 for i in range(6) if perm[i] != i})
    assert classify(d, g, 1).permutation
    sub = Demand({pr: v for pr, v in d.items() if pr[0] not in drop})
    assert classify(sub, g, 1).permutation


def test_combine_with_empty_and_identical():
    r = valiant_routing(hypercube(2)).explicit_routing()
    d1 = Demand({(0, 3): 1})
    d, out = combine_routings(d1, r, Demand(), r)
    assert out is r and d == d1
    d, out = combine_routings(d1, r, Demand({(1, 2): 1}), r)
    assert out is r


def test_combine_disjoint_unit_demands():
    g = cycle(4)
    p1 = make_path(g, [0, 1])
    p2 = make_path(g, [2, 3])
    r1 = single_path_routing(g, {(0, 1): p1})
    r2 = single_path_routing(g, {(2, 3): p2})
    d1, d2 = Demand({(0, 1): 1}), Demand({(2, 3): 1})
    d, r = combine_routings(d1, r1, d2, r2)
    value = congestion(r, d).max_congestion
    assert value == 1 == max(congestion(r1, d1).max_congestion, congestion(r2, d2).max_congestion)


def _random_routing(g, pairs, seed):
    rng = np.random.default_rng(seed)
    dist = {}
    for s, t in pairs:
        paths = all_simple_paths(g, s, t)
        w = rng.random(len(paths)) * (rng.random(len(paths)) < 0.7)
        if w.sum() == 0:
            w[0] = 1
        dist[(s, t)] = list(zip(paths, w / w.sum()))
    return ExplicitRouting(g, dist)


def test_combine_edgewise_inequality_random():
    g = hypercube(3)
    rng = np.random.default_rng(5)
    pairs = [(s, t) for s in range(8) for t in range(8) if s != t]
    for case in range(40):
        chosen = [pairs[i] for i in rng.choice(len(pairs), 5, replace=False)]
        r1 = _random_routing(g, chosen, 2 * case)
        r2 = _random_routing(g, chosen, 2 * case + 1)
        d1 = Demand({pr: float(rng.integers(0, 3)) for pr in chosen})
        d2 = Demand({pr: float(rng.random() * 2) for pr in chosen})
        d, r = combine_routings(d1, r1, d2, r2)
        lhs = congestion(r, d).loads
        rhs = congestion(r1, d1).loads + congestion(r2, d2).loads
        assert np.all(lhs <= rhs + 1e-9)


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 10), st.integers(0, 1000))
def test_congestion_linear_in_demand(c, seed):
    g = hypercube(3)
    pairs = [(0, 7), (3, 4), (5, 1)]
    r = _random_routing(g, pairs, seed)
    d = Demand({pr: 1 + i for i, pr in enumerate(pairs)})
    base = congestion(r, d).loads
    scaled = congestion(r, d.scaled(c)).loads
    assert np.allclose(scaled, c * base, rtol=1e-12, atol=1e-12)


def test_zero_weight_paths_do_not_matter():
    g = hypercube(3)
    pairs = [(0, 7), (1, 6)]
    r = _random_routing(g, pairs, 11)
    d = Demand({(0, 7): 2, (1, 6): 1})
    assert np.array_equal(congestion(r, d).loads, congestion(r.without_zero_weights(), d).loads)


def test_support_is_valid_path_system():
    g = hypercube(3)
    r = _random_routing(g, [(0, 7), (2, 5)], 3)
    p = r.path_system()
    revalidated = PathSystem(g, {pr: p[pr] for pr in p})
    assert revalidated == p
    assert all(w > 0 for pr in p for q, w in r.distribution(*pr) if q in p[pr])


def test_bounds_check():
    g = star(5)
    # all five unit pairs run through edge 0 (centre to leaf 1)
    d = Demand({(v, 1): 1 for v in range(2, 6)} | {(0, 1): 1})
    paths = {pr: all_simple_paths(g, *pr)[0] for pr in d}
    r = single_path_routing(g, paths)
    check = congestion_bounds_check(r, d, g)
    assert check and check.value == 5 == d.size()
    empty = congestion_bounds_check(r, Demand(), g)
    assert empty and empty.value == 0 and empty.upper == 0


def test_bounds_check_unit_demand_any_routing():
    g = hypercube(3)
    r = _random_routing(g, [(0, 7)], 9)
    check = congestion_bounds_check(r, Demand({(0, 7): 1}), g)
    assert check and 1 / g.m <= check.value <= 1


def test_path_system_sparsity_and_file_round_trip():
    g = Graph(3, ((0, 1), (0, 1), (1, 2)))
    paths = all_simple_paths(g, 0, 2)
    p = PathSystem(g, {(0, 2): paths, (2, 1): [make_path(g, [2, 1])]}, counts={(0, 2): {paths[0]: 3, paths[1]: 1}})
    assert p.sparsity() == 2 and p.is_alpha_sparse(2) and not p.is_alpha_sparse(1)
    # cut(0, 2) = 1 because edge 1-2 is single, so two paths need alpha >= 1
    assert p.is_alpha_plus_cut_sparse(1) and not p.is_alpha_plus_cut_sparse(0)
    text = dump_path_system(p, with_counts=True)
    assert "@ 2 3" in text  # the second parallel edge is spelled out
    back = load_path_system(text)
    assert back == p
    assert back.multiplicity((0, 2)) == p.multiplicity((0, 2))
    assert load_path_system(dump_path_system(p)) == p


def test_path_system_rejects_bad_paths():
    g = cycle(4)
    with pytest.raises(RoutingError):
        PathSystem(g, {(0, 2): [make_path(g, [0, 1])]})
    with pytest.raises(ParseError):
        load_path_system("graph 2 1\n1 2\npaths\npath 1 2 : 1 2 1\n")


def test_expected_congestion_exact_for_valiant():
    g = hypercube(3)
    r = valiant_routing(g)
    d = Demand({(0, 7): 1, (2, 5): 1})
    exact = expected_congestion(r, d)
    explicit = congestion(r.explicit_routing(), d)
    assert np.allclose(exact.loads, explicit.loads)
    assert exact.dilation == explicit.dilation
