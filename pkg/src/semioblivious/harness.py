"""Experiment runner: sparsity sweeps, competitiveness tables and tail statistics.

Config files are flat ``key = value`` text (``#`` starts a comment):

    graph      = hypercube:7        # hypercube:D | gadget-c:N,K | gadget-g:N | tree:N
                                    # | random:N,EXTRA,SEED | file:PATH
    backend    = valiant            # valiant | optimal | spuniform
    alphas     = 1,2,4,8,16
    demand     = permutation        # permutation | zero-one:RHO | adversarial | file:PATH
    trials     = 100
    seed       = 1
    eps        = 0.05
    output     = rows.csv           # summary goes to rows.summary.csv unless `summary` is set
    plus_cut   = false              # sample alpha + cut(s,t) paths per pair
    opt_integral = false            # also run the exhaustive integral oracle
    copy       = 2                  # adversarial demand on gadget-g: which copy to attack
    max_paths  = 200000             # enumeration cutoff of the optimal backend
"""
from __future__ import annotations

import csv
import io
import math
import statistics
import time
from dataclasses import dataclass, field, fields
from pathlib import Path as FsPath
from typing import Iterator

import numpy as np

from . import kernels
from .graphs import (Graph, binary_tree, content_lines, gadget_c, gadget_g, gadget_roles, hypercube,
                     random_graph, read_graph)
from .lower_bound import adversarial_demand
from .oblivious import (BACKEND_ALIASES, SPUNIFORM, VALIANT, ValiantRouting, exhaustive_optimal_oblivious,
                        shortest_path_uniform, valiant_routing)
from .rng import derive_many, stream, uniforms
from .routing_core import Demand, Pair, Routing, load_demand
from .sampler import alpha_plus_cut_sample, alpha_sample
from .solver import (OracleTooLarge, min_congestion_fractional, optimal_fractional_congestion,
                     optimal_integral_congestion)

CSV_VERSION = "semiobl-rows v1"
SUMMARY_VERSION = "semiobl-summary v1"
DEMAND_STREAM = 0xD0
TAIL_STREAM = 0x7A


class ConfigError(ValueError):
    pass


class CellError(RuntimeError):
    """A component failed inside one (alpha, trial) cell; ``cause`` holds the original error."""

    def __init__(self, alpha: int, trial: int | None, cause: BaseException):
        where = f"alpha={alpha}" + ("" if trial is None else f", trial={trial}")
        super().__init__(f"cell ({where}): {type(cause).__name__}: {cause}")
        self.alpha, self.trial, self.cause = alpha, trial, cause


@dataclass
class ExperimentConfig:
    graph: str
    backend: str = "valiant"
    alphas: list[int] = field(default_factory=lambda: [1, 2, 4])
    demand: str = "permutation"
    trials: int = 10
    seed: int = 0
    eps: float = 0.05
    output: str | None = None
    summary: str | None = None
    plus_cut: bool = False
    opt_integral: bool = False
    copy: int | None = None
    max_paths: int = 200_000

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if not self.alphas or any(a < 1 for a in self.alphas):
            raise ConfigError("alphas must be a nonempty list of positive integers")
        if BACKEND_ALIASES.get(self.backend) is None:
            raise ConfigError(f"unknown backend {self.backend!r}")
        if not 0 < self.eps <= 0.5:
            raise ConfigError("eps must lie in (0, 1/2]")

    def summary_path(self) -> str | None:
        if self.summary:
            return self.summary
        if self.output:
            stem = self.output[:-4] if self.output.endswith(".csv") else self.output
            return stem + ".summary.csv"
        return None


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


_CONVERT = {"alphas": lambda v: [int(x) for x in v.replace(",", " ").split()],
            "trials": int, "seed": int, "eps": float, "plus_cut": _bool, "opt_integral": _bool,
            "copy": int, "max_paths": int}


def parse_config(text: str, base_dir: str | None = None) -> ExperimentConfig:
    known = {f.name for f in fields(ExperimentConfig)}
    values: dict = {}
    for no, line in content_lines(text):
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or key not in known:
            raise ConfigError(f"line {no}: expected one of {sorted(known)} as 'key = value'")
        if key in values:
            raise ConfigError(f"line {no}: duplicate key {key!r}")
        try:
            values[key] = _CONVERT.get(key, str)(value)
        except ValueError as exc:
            raise ConfigError(f"line {no}: {exc}") from None
    if "graph" not in values:
        raise ConfigError("config needs a 'graph' entry")
    if base_dir is not None:
        for key in ("graph", "demand"):
            if key in values and values[key].startswith("file:"):
                rel = values[key][5:]
                values[key] = "file:" + str(FsPath(base_dir, rel)) if not FsPath(rel).is_absolute() else values[key]
    return ExperimentConfig(**values)


def load_config(path) -> ExperimentConfig:
    p = FsPath(path)
    return parse_config(p.read_text(), str(p.parent))


def build_graph(spec: str) -> Graph:
    kind, _, args = spec.partition(":")
    try:
        nums = [int(x) for x in args.split(",")] if args and kind != "file" else []
        if kind == "hypercube":
            return hypercube(*nums)
        if kind == "gadget-c":
            return gadget_c(*nums)
        if kind == "gadget-g":
            return gadget_g(*nums)
        if kind == "tree":
            return binary_tree(*nums)
        if kind == "random":
            return random_graph(*nums)
        if kind == "file":
            return read_graph(args)
    except TypeError:
        raise ConfigError(f"wrong number of parameters in graph spec {spec!r}") from None
    raise ConfigError(f"unknown graph spec {spec!r}")


# -- demand generators ---------------------------------------------------------

def random_permutation_demand(n: int, seed: int, trial: int) -> Demand:
    """Unit demand i -> pi(i) for a uniform permutation pi (fixed points dropped)."""
    st = stream(seed, DEMAND_STREAM, trial)
    perm = list(range(n))
    for i in range(n - 1, 0, -1):
        j = st.randrange(i + 1)
        perm[i], perm[j] = perm[j], perm[i]
    return Demand({(i, perm[i]): 1 for i in range(n) if perm[i] != i})


def random_zero_one_demand(n: int, rho: float, seed: int, trial: int) -> Demand:
    st = stream(seed, DEMAND_STREAM, trial)
    return Demand({(s, t): 1 for s in range(n) for t in range(n) if s != t and st.random() < rho})


# -- rows --------------------------------------------------------------------

@dataclass
class ExperimentRow:
    graph: str
    alpha: int
    trial: int
    seed: int
    size: float
    congestion: float
    opt_fractional: float
    opt_integral: int | None
    ratio: float
    dilation: int
    completion: float
    wall_time: float

    def as_csv(self) -> list[str]:
        return [self.graph, str(self.alpha), str(self.trial), str(self.seed), repr(float(self.size)),
                repr(self.congestion), repr(self.opt_fractional),
                "" if self.opt_integral is None else str(self.opt_integral),
                repr(self.ratio), str(self.dilation), repr(self.completion), f"{self.wall_time:.6f}"]


ROW_HEADER = [f.name for f in fields(ExperimentRow)]


@dataclass
class AlphaSummary:
    alpha: int
    trials: int
    median_ratio: float
    max_ratio: float
    mean_ratio: float


@dataclass
class ExperimentResult:
    rows: list[ExperimentRow]
    summary: list[AlphaSummary]
    log_slope: float

    def median(self, alpha: int) -> float:
        return next(s.median_ratio for s in self.summary if s.alpha == alpha)


def summarize(rows: list[ExperimentRow]) -> tuple[list[AlphaSummary], float]:
    by_alpha: dict[int, list[float]] = {}
    for row in rows:
        by_alpha.setdefault(row.alpha, []).append(row.ratio)
    out = [AlphaSummary(a, len(r), statistics.median(r), max(r), statistics.fmean(r))
           for a, r in sorted(by_alpha.items())]
    slope = math.nan
    if len(out) >= 2 and all(s.median_ratio > 0 for s in out):
        slope = float(np.polyfit([s.alpha for s in out], [math.log(s.median_ratio) for s in out], 1)[0])
    return out, slope


def _backend(cfg: ExperimentConfig, g: Graph, pairs: list[Pair] | None) -> Routing:
    kind = BACKEND_ALIASES[cfg.backend]
    if kind == VALIANT:
        return valiant_routing(g)
    if kind == SPUNIFORM:
        return shortest_path_uniform(g, pairs)
    return exhaustive_optimal_oblivious(g, cfg.eps, pairs, max_paths=cfg.max_paths)


def _demands(cfg: ExperimentConfig, g: Graph) -> list[Demand] | None:
    kind, _, arg = cfg.demand.partition(":")
    if kind == "permutation":
        return [random_permutation_demand(g.n, cfg.seed, j) for j in range(cfg.trials)]
    if kind == "zero-one":
        return [random_zero_one_demand(g.n, float(arg), cfg.seed, j) for j in range(cfg.trials)]
    if kind == "file":
        d = load_demand(FsPath(arg).read_text(), g.n)
        return [d] * cfg.trials
    if kind == "adversarial":
        return None
    raise ConfigError(f"unknown demand generator {cfg.demand!r}")


def iter_rows(cfg: ExperimentConfig) -> Iterator[ExperimentRow]:
    """Rows in (alpha, trial) order; deterministic apart from wall time."""
    g = build_graph(cfg.graph)
    demands = _demands(cfg, g)
    if demands is None:
        roles = gadget_roles(g, cfg.copy)
        pairs = [(s, t) for s in roles.left for t in roles.right]
    else:
        pairs = sorted({pr for d in demands for pr in d})
    r = _backend(cfg, g, pairs)
    opt_cache: dict[int, tuple[float, int | None]] = {}

    def optimum(trial: int, d: Demand) -> tuple[float, int | None]:
        key = trial if demands is not None else -1 - trial
        if demands is None or key not in opt_cache:
            frac = optimal_fractional_congestion(g, d, cfg.eps).achieved
            integral = None
            if cfg.opt_integral:
                try:
                    integral = optimal_integral_congestion(g, d)[0]
                except OracleTooLarge:
                    integral = None
            if demands is None:
                return frac, integral
            opt_cache[key] = (frac, integral)
        return opt_cache[key]

    for alpha in sorted(cfg.alphas):
        start = time.perf_counter()
        try:
            if cfg.plus_cut:
                system = alpha_plus_cut_sample(r, g, alpha, cfg.seed, pairs)
            else:
                system = alpha_sample(r, alpha, cfg.seed, pairs)
        except Exception as exc:
            raise CellError(alpha, None, exc) from exc
        sample_time = time.perf_counter() - start
        for trial in range(cfg.trials):
            t0 = time.perf_counter()
            try:
                if demands is None:
                    d = adversarial_demand(system, g, alpha, cfg.copy).demand
                else:
                    d = demands[trial]
                res = min_congestion_fractional(system, d, cfg.eps)
                frac, integral = optimum(trial, d) if d else (0.0, 0)
            except Exception as exc:
                raise CellError(alpha, trial, exc) from exc
            ratio = res.achieved / frac if frac > 0 else 1.0
            elapsed = time.perf_counter() - t0 + (sample_time if trial == 0 else 0.0)
            yield ExperimentRow(cfg.graph, alpha, trial, cfg.seed, d.size(), res.achieved, frac, integral,
                                ratio, res.dilation, res.achieved + res.dilation, elapsed)


def run_experiment(cfg: ExperimentConfig, write: bool = True) -> ExperimentResult:
    rows = sorted(iter_rows(cfg), key=lambda r: (r.alpha, r.trial))
    summary, slope = summarize(rows)
    result = ExperimentResult(rows, summary, slope)
    if write and cfg.output:
        FsPath(cfg.output).write_text(rows_csv(rows))
        FsPath(cfg.summary_path()).write_text(summary_csv(summary, slope))
    return result


def rows_csv(rows: list[ExperimentRow]) -> str:
    buf = io.StringIO()
    buf.write(f"# {CSV_VERSION}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ROW_HEADER)
    for row in rows:
        w.writerow(row.as_csv())
    return buf.getvalue()


def summary_csv(summary: list[AlphaSummary], slope: float) -> str:
    buf = io.StringIO()
    buf.write(f"# {SUMMARY_VERSION}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["alpha", "trials", "median_ratio", "max_ratio", "mean_ratio", "log_ratio_slope"])
    for s in summary:
        w.writerow([s.alpha, s.trials, repr(s.median_ratio), repr(s.max_ratio), repr(s.mean_ratio), repr(slope)])
    return buf.getvalue()


def read_rows(text: str) -> list[dict]:
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))


# -- tail statistics -------------------------------------------------------------

@dataclass
class TailPoint:
    gamma: float
    delta: float
    exceedance: float
    bound: float
    trials: int


def expected_loads(r: Routing, d: Demand) -> np.ndarray:
    mu = np.zeros(r.graph.m)
    for (s, t), amount in d.items():
        probs = r.edge_probabilities(s, t)
        if probs is None:
            probs = {}
            for p, w in r.distribution(s, t):
                for e in p.edges:
                    probs[e] = probs.get(e, 0.0) + w
        for e, pr in probs.items():
            mu[e] += amount * pr
    return mu


def chernoff_union_bound(mu: np.ndarray, gamma: float) -> float:
    """min(1, sum_e exp(-gamma/4 * ln(gamma/mu_e))), a term of 1 where gamma/mu_e < 2."""
    total = 0.0
    for m_e in mu:
        if m_e <= 0:
            continue
        delta = gamma / m_e
        if delta < 2:
            return 1.0
        total += math.exp(-0.25 * gamma * math.log(delta))
    return min(1.0, total)


def _trial_max_loads(r: Routing, d: Demand, trials: int, seed: int) -> np.ndarray:
    units = [(s, t) for (s, t), v in d.items() for _ in range(int(v))]
    if not units:
        return np.zeros(trials)
    # unit i in trial j uses the first uniform of stream (seed, TAIL, j, i)
    jj, ii = np.meshgrid(np.arange(trials), np.arange(len(units)), indexing="ij")
    keys = derive_many(seed, TAIL_STREAM, jj.ravel(), ii.ravel())
    u = uniforms(keys, 1)[:, 0].reshape(trials, len(units))
    if isinstance(r, ValiantRouting):
        n = r.graph.n
        w_mat = np.minimum((u * n).astype(np.int64), n - 1)
        s_arr = np.array([s for s, _ in units], dtype=np.int64)
        t_arr = np.array([t for _, t in units], dtype=np.int64)
        return kernels.valiant_trial_loads(r.dim, r.eid, s_arr, t_arr, np.ones(len(units)), w_mat, r.graph.m)
    out = np.zeros(trials)
    for j in range(trials):
        loads = np.zeros(r.graph.m)
        for i, (s, t) in enumerate(units):
            loads[list(r.sample_path(s, t, float(u[j, i])).edges)] += 1
        out[j] = loads.max()
    return out


def tail_test(r: Routing, d: Demand, gammas: list[float], trials: int, seed: int) -> list[TailPoint]:
    """Empirical Pr[max edge load > gamma] when every unit of the integral
    demand ``d`` picks its path independently, next to the Chernoff/union
    bound built from the exact expected loads."""
    if any(not float(v).is_integer() for v in d.values()):
        raise ValueError("tail test needs an integral demand (independent unit packets)")
    mu = expected_loads(r, d)
    top = float(mu.max()) if mu.size else 0.0
    maxima = _trial_max_loads(r, d, trials, seed)
    out = []
    for gamma in gammas:
        exceed = float(np.mean(maxima > gamma))
        out.append(TailPoint(gamma, gamma / top if top > 0 else math.inf, exceed,
                             chernoff_union_bound(mu, gamma) if top > 0 else 0.0, trials))
    return out


def gammas_for_deltas(r: Routing, d: Demand, deltas: list[float]) -> list[float]:
    """Thresholds delta * max_e E[load_e]."""
    top = float(expected_loads(r, d).max())
    return [delta * top for delta in deltas]
