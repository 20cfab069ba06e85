"""Constructive attack on sparse path systems over the C(n, k) gadget.

Given a path system with at most alpha paths per leaf pair, the attack finds
alpha middle vertices S' and k leaf pairs, matched one-to-one, all of whose
candidate paths pass through S'.  Routing one unit on each pair then forces
congestion k/alpha on the edges at S', while the pairs can be routed
integrally with congestion 1 along disjoint middle vertices.
"""
from __future__ import annotations

import warnings
from collections import Counter
from dataclasses import dataclass, field

from .graphs import Graph, GraphError, GadgetRoles, ParseError, content_lines, gadget_roles, integer_root
from .routing_core import Demand, ExplicitRouting, Pair, PathSystem, RoutingError, congestion, gc_paused, make_path
from .solver import min_congestion_fractional

HEADER = "certificate gadget-attack v1"


class AttackError(RuntimeError):
    """The attack's pigeonhole or matching step failed (preconditions violated)."""


@dataclass
class AttackCertificate:
    demand: Demand
    hitting_set: tuple[int, ...]
    matching: tuple[Pair, ...]
    claimed_ratio: float
    alpha: int
    copy: int | None = None
    verified_ratio: float | None = None
    counts: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Verdict:
    ok: bool
    failed_check: str | None = None
    detail: str = ""
    fractional: float | None = None
    lower_bound: float | None = None

    def __bool__(self):
        return self.ok


@gc_paused()
def hitting_sets(p: PathSystem, g: Graph, alpha: int, copy: int | None = None) -> dict[Pair, tuple[int, ...]]:
    """f(s,t): the middle vertex entered by each path, padded to alpha with the
    smallest unused middle vertices.  Sets are sorted tuples; when alpha is
    at least k every set is the whole middle layer."""
    roles = gadget_roles(g, copy)
    middle = roles.middle
    in_middle = set(middle)
    size = min(alpha, len(middle))
    out: dict[Pair, tuple[int, ...]] = {}
    for s in roles.left:
        for t in roles.right:
            paths = p[(s, t)]
            if not paths:
                raise RoutingError(f"path system has no path for leaf pair ({s}, {t})")
            if len(paths) > alpha:
                raise ValueError(f"pair ({s}, {t}) has {len(paths)} > {alpha} paths")
            hit = set()
            for q in paths:
                first = next((v for v in q.vertices if v in in_middle), None)
                if first is None:
                    raise GraphError(f"{q!r} avoids the middle layer; corrupt gadget or path system")
                hit.add(first)
            for u in middle:
                if len(hit) >= size:
                    break
                hit.add(u)
            out[(s, t)] = tuple(sorted(hit))
    return out


def _most_common(counter: Counter):
    """Most frequent key; ties go to the smallest key."""
    top = max(counter.values())
    return min(key for key, c in counter.items() if c == top)


def _match(left: list[int], adj: dict[int, list[int]]) -> dict[int, int] | None:
    """Augmenting-path bipartite matching saturating ``left`` (or None)."""
    owner: dict[int, int] = {}

    def augment(s: int, seen: set[int]) -> bool:
        for t in adj[s]:
            if t in seen:
                continue
            seen.add(t)
            if t not in owner or augment(owner[t], seen):
                owner[t] = s
                return True
        return False

    for s in left:
        if not augment(s, set()):
            return None
    return {s: t for t, s in owner.items()}


def adversarial_demand(p: PathSystem, g: Graph, alpha: int, copy: int | None = None) -> AttackCertificate:
    roles = gadget_roles(g, copy)
    n, k = roles.n, roles.k
    if k != integer_root(n, 2 * alpha):
        warnings.warn(f"k={k} differs from floor(n^(1/(2 alpha)))={integer_root(n, 2 * alpha)}; "
                      "the pigeonhole guarantee may not apply", stacklevel=2)
    f = hitting_sets(p, g, alpha, copy)
    per_leaf = {s: _most_common(Counter(f[(s, t)] for t in roles.right)) for s in roles.left}
    leaf_counts = Counter(per_leaf.values())
    chosen = _most_common(leaf_counts)
    group = [s for s in roles.left if per_leaf[s] == chosen]
    counts = {"leaves_with_set": len(group), "distinct_sets": len(leaf_counts),
              "pairs_with_set": sum(1 for s in roles.left for t in roles.right if f[(s, t)] == chosen)}
    if len(group) < k:
        raise AttackError(f"only {len(group)} left leaves share the most common set; need {k} ({counts})")
    a_side = group[:k]
    adj = {s: [t for t in roles.right if f[(s, t)] == chosen] for s in a_side}
    matched = _match(a_side, adj)
    if matched is None:
        raise AttackError(f"no matching saturates the {k} chosen leaves ({counts})")
    matching = tuple((s, matched[s]) for s in a_side)
    demand = Demand({pr: 1 for pr in matching})
    return AttackCertificate(demand, chosen, matching, k / len(chosen), alpha, copy, None, counts)


def disjoint_routing(g: Graph, matching, roles: GadgetRoles) -> ExplicitRouting:
    """Pair i goes leaf - centre - i-th middle vertex - centre - leaf."""
    if len(matching) > roles.k:
        raise ValueError("more pairs than middle vertices")
    return ExplicitRouting(g, {(s, t): [(make_path(g, [s, roles.v1, u, roles.v2, t]), 1.0)]
                               for (s, t), u in zip(matching, roles.middle)})


def verify_certificate(cert: AttackCertificate, p: PathSystem, g: Graph, eps: float = 0.02) -> Verdict:
    """Structural checks, then (a) hitting, (b) integral optimum 1, (c) fractional bound."""
    try:
        roles = gadget_roles(g, cert.copy)
    except GraphError as exc:
        return Verdict(False, "structure", str(exc))
    lefts = [s for s, _ in cert.matching]
    rights = [t for _, t in cert.matching]
    if len(cert.matching) != roles.k:
        return Verdict(False, "structure", f"matching has {len(cert.matching)} pairs, expected {roles.k}")
    if len(set(lefts)) != len(lefts) or len(set(rights)) != len(rights):
        return Verdict(False, "structure", "matching repeats a leaf")
    if not set(lefts) <= set(roles.left) or not set(rights) <= set(roles.right):
        return Verdict(False, "structure", "matching uses non-leaf vertices or the wrong sides")
    if cert.demand != Demand({pr: 1 for pr in cert.matching}):
        return Verdict(False, "structure", "demand is not the unit demand on the matching")
    hs = set(cert.hitting_set)
    if len(hs) != min(cert.alpha, roles.k) or not hs <= set(roles.middle):
        return Verdict(False, "structure", "hitting set has the wrong size or leaves the middle layer")
    claimed = roles.k / len(hs)
    if abs(claimed - cert.claimed_ratio) > 1e-12:
        return Verdict(False, "structure", f"claimed ratio {cert.claimed_ratio} should be {claimed}")

    for pr in cert.matching:
        if not p[pr]:
            return Verdict(False, "a", f"pair {pr} has no candidate path")
        for q in p[pr]:
            if not hs.intersection(q.vertices):
                return Verdict(False, "a", f"{q!r} avoids the hitting set")

    opt_int = congestion(disjoint_routing(g, cert.matching, roles), cert.demand).max_congestion
    if opt_int != 1:
        return Verdict(False, "b", f"disjoint routing has congestion {opt_int}")

    res = min_congestion_fractional(p, cert.demand, eps)
    cert.verified_ratio = res.achieved / opt_int
    if res.lower_bound < (1 - eps) * claimed:
        return Verdict(False, "c", f"certified bound {res.lower_bound:.6g} below (1-eps)*{claimed}",
                       res.achieved, res.lower_bound)
    return Verdict(True, None, "", res.achieved, res.lower_bound)


# -- text format -------------------------------------------------------------

def dump_certificate(cert: AttackCertificate) -> str:
    lines = [HEADER, f"alpha {cert.alpha}", f"copy {'-' if cert.copy is None else cert.copy}",
             "hitting-set " + " ".join(str(v + 1) for v in cert.hitting_set),
             f"claimed-ratio {cert.claimed_ratio!r}"]
    if cert.verified_ratio is not None:
        lines.append(f"verified-ratio {cert.verified_ratio!r}")
    lines += [f"match {s + 1} {t + 1}" for s, t in cert.matching]
    lines += [f"demand {s + 1} {t + 1} {v}" for (s, t), v in cert.demand.items()]
    return "\n".join(lines) + "\n"


def load_certificate(text: str) -> AttackCertificate:
    lines = content_lines(text)
    if not lines or lines[0][1] != HEADER:
        raise ParseError(f"expected header {HEADER!r}", lines[0][0] if lines else None)
    fields: dict[str, str] = {}
    matching: list[Pair] = []
    demand: dict[Pair, float] = {}
    for no, line in lines[1:]:
        key, _, rest = line.partition(" ")
        parts = rest.split()
        try:
            if key == "match" and len(parts) == 2:
                matching.append((int(parts[0]) - 1, int(parts[1]) - 1))
            elif key == "demand" and len(parts) == 3:
                pair = (int(parts[0]) - 1, int(parts[1]) - 1)
                demand[pair] = demand.get(pair, 0) + float(parts[2])
            elif key in ("alpha", "copy", "hitting-set", "claimed-ratio", "verified-ratio"):
                fields[key] = rest
            else:
                raise ParseError(f"unexpected line {line!r}", no)
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(f"bad line {line!r}", no) from None
    missing = {"alpha", "copy", "hitting-set", "claimed-ratio"} - set(fields)
    if missing:
        raise ParseError(f"certificate lacks {sorted(missing)}")
    try:
        return AttackCertificate(
            demand=Demand({pr: int(v) if float(v).is_integer() else v for pr, v in demand.items()}),
            hitting_set=tuple(int(v) - 1 for v in fields["hitting-set"].split()),
            matching=tuple(matching),
            claimed_ratio=float(fields["claimed-ratio"]),
            alpha=int(fields["alpha"]),
            copy=None if fields["copy"].strip() == "-" else int(fields["copy"]),
            verified_ratio=float(fields["verified-ratio"]) if "verified-ratio" in fields else None,
        )
    except (ValueError, RoutingError) as exc:
        raise ParseError(str(exc)) from None
