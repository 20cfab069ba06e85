import dataclasses

import pytest

from semioblivious.graphs import GraphError, ParseError, gadget_c, gadget_g, gadget_g_copies, gadget_roles, \
    integer_root
from semioblivious.lower_bound import (AttackCertificate, adversarial_demand, disjoint_routing, dump_certificate,
                                       hitting_sets, load_certificate, verify_certificate)
from semioblivious.oblivious import shortest_path_uniform
from semioblivious.routing_core import Demand, PathSystem, classify, congestion, make_path
from semioblivious.sampler import alpha_sample
from semioblivious.solver import optimal_integral_congestion


def leaf_sample(g, alpha, seed, copy=None):
    roles = gadget_roles(g, copy)
    pairs = [(s, t) for s in roles.left for t in roles.right]
    return alpha_sample(shortest_path_uniform(g, pairs), alpha, seed)


def test_hitting_set_single_path_is_padded():
    g = gadget_c(4, 3)
    roles = gadget_roles(g)
    s, t = roles.left[0], roles.right[0]
    full = {}
    for a in roles.left:
        for b in roles.right:
            full[(a, b)] = [make_path(g, [a, roles.v1, roles.middle[2], roles.v2, b])]
    f = hitting_sets(PathSystem(g, full), g, 2)
    assert f[(s, t)] == (roles.middle[0], roles.middle[2])


def test_hitting_set_two_paths():
    g = gadget_c(4, 3)
    roles = gadget_roles(g)
    u, w = roles.middle[1], roles.middle[2]
    full = {(a, b): [make_path(g, [a, roles.v1, x, roles.v2, b]) for x in (u, w)]
            for a in roles.left for b in roles.right}
    f = hitting_sets(PathSystem(g, full), g, 2)
    assert set(f.values()) == {(u, w)}


def test_hitting_sets_on_c16_2_are_all_of_k():
    g = gadget_c(16, 2)
    for seed in range(5):
        f = hitting_sets(leaf_sample(g, 2, seed), g, 2)
        assert set(f.values()) == {gadget_roles(g).middle}


def test_sparsity_precondition():
    g = gadget_c(4, 2)
    with pytest.raises(ValueError):
        hitting_sets(leaf_sample(g, 3, 0), g, 1)


def test_trivial_regime_alpha_at_least_k():
    g = gadget_c(16, 2)
    cert = adversarial_demand(leaf_sample(g, 2, 1), g, 2)
    assert cert.claimed_ratio == 1.0


def test_attack_on_c256_4_alpha2():
    g = gadget_c(256, 4)
    p = leaf_sample(g, 2, seed=11)
    cert = adversarial_demand(p, g, 2)
    assert cert.claimed_ratio == 2.0 and len(cert.matching) == 4
    verdict = verify_certificate(cert, p, g, 0.02)
    assert verdict, verdict.detail
    assert cert.verified_ratio >= 2 * 0.98
    assert optimal_integral_congestion(g, cert.demand)[0] == 1
    assert classify(cert.demand, g, 2).permutation


@pytest.mark.parametrize("n, alpha", [(16, 1), (16, 2), (64, 1), (64, 2), (256, 1)])
def test_attack_succeeds_across_sizes(n, alpha):
    k = integer_root(n, 2 * alpha)
    g = gadget_c(n, k)
    for seed in range(3):
        p = leaf_sample(g, alpha, seed)
        cert = adversarial_demand(p, g, alpha)
        assert verify_certificate(cert, p, g, 0.02)
        assert classify(cert.demand, g, alpha).permutation


def test_attack_warns_for_other_k():
    g = gadget_c(16, 3)
    with pytest.warns(UserWarning):
        adversarial_demand(leaf_sample(g, 1, 0), g, 1)


def test_attack_inside_gadget_g_copy():
    n = 16
    g = gadget_g(n)
    for alpha, k in gadget_g_copies(n)[:2]:
        p = leaf_sample(g, alpha, 3, copy=alpha)
        cert = adversarial_demand(p, g, alpha, copy=alpha)
        single = gadget_c(n, k)
        assert cert.claimed_ratio == k / min(alpha, k)
        assert verify_certificate(cert, p, g, 0.02)
        assert single.n == sum(1 for v in range(g.n) if g.label(v).startswith(f"{alpha}:"))


def test_tampered_matching_fails_structure():
    g = gadget_c(64, 8)
    p = leaf_sample(g, 1, 0)
    cert = adversarial_demand(p, g, 1)
    (s0, t0), (s1, _) = cert.matching[:2]
    bad = dataclasses.replace(cert, matching=((s0, t0), (s1, t0)) + cert.matching[2:])
    verdict = verify_certificate(bad, p, g)
    assert not verdict and verdict.failed_check == "structure"


def test_avoiding_path_fails_check_a():
    g = gadget_c(64, 8)
    p = leaf_sample(g, 1, 4)
    cert = adversarial_demand(p, g, 1)
    roles = gadget_roles(g)
    s, t = cert.matching[0]
    avoid = next(u for u in roles.middle if u not in cert.hitting_set)
    paths = {pr: list(p[pr]) for pr in p}
    paths[(s, t)].append(make_path(g, [s, roles.v1, avoid, roles.v2, t]))
    verdict = verify_certificate(cert, PathSystem(g, paths), g)
    assert not verdict and verdict.failed_check == "a"


def test_disjoint_routing_has_congestion_one():
    g = gadget_c(8, 3)
    roles = gadget_roles(g)
    matching = list(zip(roles.left[:3], roles.right[:3]))
    r = disjoint_routing(g, matching, roles)
    assert congestion(r, Demand({pr: 1 for pr in matching})).max_congestion == 1


def test_certificate_round_trip():
    g = gadget_c(64, 8)
    p = leaf_sample(g, 1, 2)
    cert = adversarial_demand(p, g, 1)
    verify_certificate(cert, p, g)
    text = dump_certificate(cert)
    back = load_certificate(text)
    assert dump_certificate(back) == text
    assert back.demand == cert.demand and back.matching == cert.matching
    with pytest.raises(ParseError):
        load_certificate("certificate other\n")
    with pytest.raises(ParseError):
        load_certificate(text.replace("alpha 1\n", ""))


def test_wrong_graph_labels():
    g = gadget_c(4, 2)
    cert = AttackCertificate(Demand({(0, 5): 1}), (8,), ((0, 5),), 2.0, 1, copy=3)
    verdict = verify_certificate(cert, leaf_sample(g, 1, 0), g)
    assert not verdict and verdict.failed_check == "structure"
    with pytest.raises(GraphError):
        hitting_sets(leaf_sample(g, 1, 0), g, 1, copy=2)
