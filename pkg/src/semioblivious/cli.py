"""Command-line entry point ``semiobl``.

Exit codes: 0 success, 1 usage error, 2 invalid input or failed
verification, 3 solver non-convergence (including rounding that never met
its bound).  Diagnostics go to stderr; results to files or stdout.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path as FsPath

from . import __version__
from .graphs import (GraphError, ParseError, binary_tree, dump_graph, gadget_c, gadget_g, gadget_roles, hypercube,
                     random_graph, read_graph)
from .harness import CellError, ConfigError, load_config, run_experiment
from .lower_bound import AttackError, adversarial_demand, dump_certificate, load_certificate, verify_certificate
from .minmax import NonConvergenceError
from .oblivious import (BACKEND_ALIASES, SPUNIFORM, VALIANT, dump_routing, exhaustive_optimal_oblivious, load_routing,
                        shortest_path_uniform, valiant_routing)
from .routing_core import (RoutingError, dump_demand, dump_explicit_routing, dump_path_system,
                           load_demand, load_path_system)
from .sampler import alpha_plus_cut_sample, alpha_sample
from .solver import (RoundingError, SolverError, min_congestion_fractional, optimal_fractional_congestion,
                     optimal_integral_congestion, randomized_round)

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_SOLVER = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _read(path: str) -> str:
    return FsPath(path).read_text()


def _write(path: str, text: str) -> None:
    FsPath(path).write_text(text)


def _pairs_option(args, g):
    """Pairs to build/sample: a demand file's support, the gadget's leaf pairs, or everything."""
    if getattr(args, "pairs_from", None):
        return sorted(load_demand(_read(args.pairs_from), g.n))
    if getattr(args, "leaf_pairs", False):
        roles = gadget_roles(g, args.copy)
        return [(s, t) for s in roles.left for t in roles.right]
    return None


def cmd_gen(args) -> int:
    kind = args.kind
    need = {"hypercube": ["dim"], "gadget-c": ["n", "k"], "gadget-g": ["n"], "tree": ["n"],
            "random": ["n", "extra", "seed"]}[kind]
    missing = [f"--{name}" for name in need if getattr(args, name) is None]
    if missing:
        raise UsageError(f"gen --kind {kind} needs {' '.join(missing)}")
    if kind == "hypercube":
        g = hypercube(args.dim)
    elif kind == "gadget-c":
        g = gadget_c(args.n, args.k)
    elif kind == "gadget-g":
        g = gadget_g(args.n)
    elif kind == "tree":
        g = binary_tree(args.n)
    else:
        g = random_graph(args.n, args.extra, args.seed)
    _write(args.out, dump_graph(g))
    return EXIT_OK


def cmd_oblivious(args) -> int:
    g = read_graph(args.graph)
    kind = BACKEND_ALIASES[args.backend]
    pairs = _pairs_option(args, g)
    if kind == VALIANT:
        r = valiant_routing(g)
    elif kind == SPUNIFORM:
        r = shortest_path_uniform(g, pairs)
    else:
        r = exhaustive_optimal_oblivious(g, args.eps, pairs, max_paths=args.max_paths)
        print(f"competitiveness {r.competitiveness!r} (certified lower bound {r.lower_bound!r})")
    _write(args.out, dump_routing(r))
    return EXIT_OK


def cmd_sample(args) -> int:
    r = load_routing(_read(args.routing))
    g = r.graph
    pairs = _pairs_option(args, g)
    if args.plus_cut:
        p = alpha_plus_cut_sample(r, g, args.alpha, args.seed, pairs)
    else:
        p = alpha_sample(r, args.alpha, args.seed, pairs)
    _write(args.out, dump_path_system(p))
    if args.counts_out:
        _write(args.counts_out, dump_path_system(p, with_counts=True))
    return EXIT_OK


def cmd_route(args) -> int:
    p = load_path_system(_read(args.paths))
    d = load_demand(_read(args.demand), p.graph.n)
    res = min_congestion_fractional(p, d, args.eps)
    _write(args.out, dump_explicit_routing(res.routing))
    print(f"congestion {res.achieved!r}")
    print(f"lower_bound {float(res.lower_bound)!r}")
    return EXIT_OK


def cmd_round(args) -> int:
    r = load_routing(_read(args.routing))
    d = load_demand(_read(args.demand), r.graph.n)
    res = randomized_round(r, d, max_retries=args.retries, seed=args.seed)
    if args.out:
        _write(args.out, dump_explicit_routing(res.routing))
    print(f"congestion {res.congestion!r} bound {res.bound!r} retries {res.retries}")
    return EXIT_OK


def cmd_opt(args) -> int:
    g = read_graph(args.graph)
    d = load_demand(_read(args.demand), g.n)
    if args.integral:
        value, _ = optimal_integral_congestion(g, d)
        print(value)
    else:
        res = optimal_fractional_congestion(g, d, args.eps)
        print(f"{res.achieved!r} (lower bound {float(res.lower_bound)!r})")
    return EXIT_OK


def cmd_attack(args) -> int:
    g = read_graph(args.graph)
    p = load_path_system(_read(args.paths))
    if p.graph != g:
        raise RoutingError("path system was built on a different graph")
    cert = adversarial_demand(p, g, args.alpha, args.copy)
    _write(args.out, dump_certificate(cert))
    if args.demand_out:
        _write(args.demand_out, dump_demand(cert.demand))
    print(f"claimed ratio {cert.claimed_ratio!r} hitting set {' '.join(str(v + 1) for v in cert.hitting_set)}")
    return EXIT_OK


def cmd_verify(args) -> int:
    g = read_graph(args.graph)
    p = load_path_system(_read(args.paths))
    cert = load_certificate(_read(args.cert))
    verdict = verify_certificate(cert, p, g, args.eps)
    if not verdict:
        print(f"FAILED check ({verdict.failed_check}): {verdict.detail}", file=sys.stderr)
        return EXIT_INVALID
    print(f"ok ratio {verdict.fractional!r} (certified >= {float(verdict.lower_bound)!r}, claimed {cert.claimed_ratio!r})")
    return EXIT_OK


def cmd_experiment(args) -> int:
    cfg = load_config(args.config)
    if args.output:
        cfg.output = args.output
    if not cfg.output:
        raise UsageError("experiment needs an output path (config key 'output' or --output)")
    res = run_experiment(cfg)
    for s in res.summary:
        print(f"alpha {s.alpha}: median {s.median_ratio:.4f} max {s.max_ratio:.4f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="semiobl", description="Sparse semi-oblivious routing experiments.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="write a generated graph")
    p.add_argument("--kind", required=True, choices=["hypercube", "gadget-c", "gadget-g", "tree", "random"])
    p.add_argument("--dim", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--extra", type=int, help="extra edges for --kind random")
    p.add_argument("--seed", type=int, help="seed for --kind random")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    def pair_selection(p):
        p.add_argument("--pairs-from", metavar="DEMAND", help="only the pairs in this demand file's support")
        p.add_argument("--leaf-pairs", action="store_true", help="only left-leaf to right-leaf pairs of a gadget")
        p.add_argument("--copy", type=int, help="gadget copy for --leaf-pairs on G(n)")

    p = sub.add_parser("oblivious", help="build an oblivious routing")
    p.add_argument("--graph", required=True)
    p.add_argument("--backend", required=True, choices=["valiant", "optimal", "spuniform"])
    p.add_argument("--eps", type=float, default=0.05)
    p.add_argument("--max-paths", type=int, default=200_000)
    p.add_argument("--out", required=True)
    pair_selection(p)
    p.set_defaults(func=cmd_oblivious)

    p = sub.add_parser("sample", help="draw an alpha-sample path system")
    p.add_argument("--routing", required=True)
    p.add_argument("--alpha", type=int, required=True)
    p.add_argument("--plus-cut", action="store_true")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--counts-out", help="also write the path system annotated with draw multiplicities")
    pair_selection(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("route", help="min-congestion routing of a demand on a path system")
    p.add_argument("--paths", required=True)
    p.add_argument("--demand", required=True)
    p.add_argument("--eps", type=float, default=0.05)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_route)

    p = sub.add_parser("round", help="randomized rounding to an integral routing")
    p.add_argument("--routing", required=True)
    p.add_argument("--demand", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--retries", type=int, default=50)
    p.add_argument("--out")
    p.set_defaults(func=cmd_round)

    p = sub.add_parser("opt", help="offline optimum congestion")
    p.add_argument("--graph", required=True)
    p.add_argument("--demand", required=True)
    p.add_argument("--integral", action="store_true")
    p.add_argument("--eps", type=float, default=0.05)
    p.set_defaults(func=cmd_opt)

    p = sub.add_parser("attack", help="adversarial demand against a sparse path system on a gadget")
    p.add_argument("--graph", required=True)
    p.add_argument("--paths", required=True)
    p.add_argument("--alpha", type=int, required=True)
    p.add_argument("--copy", type=int)
    p.add_argument("--out", required=True)
    p.add_argument("--demand-out")
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("verify", help="check an attack certificate")
    p.add_argument("--cert", required=True)
    p.add_argument("--paths", required=True)
    p.add_argument("--graph", required=True)
    p.add_argument("--eps", type=float, default=0.02)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("experiment", help="run a config-driven sweep and write CSVs")
    p.add_argument("--config", required=True)
    p.add_argument("--output")
    p.set_defaults(func=cmd_experiment)
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except CellError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER if isinstance(exc.cause, (NonConvergenceError, RoundingError)) else EXIT_INVALID
    except (NonConvergenceError, RoundingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (ParseError, GraphError, RoutingError, AttackError, ConfigError, SolverError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
