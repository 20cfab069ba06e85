"""Min-max engine: minimize max_r (A x)_r over a product of simplices.

Columns of the nonnegative sparse matrix ``A`` are grouped into blocks
(``block_ptr``); ``x`` is a probability vector on each block.  This is the
bilinear game  min_x max_y  y^T A x  with ``y`` a distribution over rows, and
the engine runs entropic mirror-prox on it: multiplicative-weights updates
for both players with an extragradient correction and a backtracking step.

Certificates are cheap: for any row distribution ``y``,

    sum_b min_{p in b} (A^T y)_p  <=  OPT  <=  max_r (A x)_r

so the loop stops as soon as the best upper bound is within ``1 + eps`` of
the best lower bound seen on current or step-averaged iterates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import kernels


class NonConvergenceError(RuntimeError):
    """Iteration budget ran out before the gap certificate closed."""

    def __init__(self, message: str, best: "MinMaxResult | None" = None):
        super().__init__(message)
        self.best = best


@dataclass
class MinMaxResult:
    x: np.ndarray
    value: float
    lower: float
    y: np.ndarray
    iterations: int

    @property
    def gap(self) -> float:
        return self.value / self.lower if self.lower > 0 else math.inf


def _log_normalize(z: np.ndarray) -> np.ndarray:
    z = z - z.max()
    return z - math.log(np.exp(z).sum())


def minimize_max(A: sp.spmatrix, block_ptr: np.ndarray, eps: float, x0: np.ndarray | None = None,
                 max_iter: int = 20_000) -> MinMaxResult:
    """Solve to within factor ``1 + eps`` or raise :class:`NonConvergenceError`.

    ``x0`` warm-starts the column player; zero entries are allowed.
    """
    block_ptr = np.asarray(block_ptr, dtype=np.int64)
    sizes = np.diff(block_ptr)
    if np.any(sizes <= 0):
        raise ValueError("every block needs at least one column")
    A = sp.csr_matrix(A, dtype=np.float64)
    nrows = A.shape[0]
    live = np.flatnonzero(A.getnnz(axis=1))
    B = A[live]
    Bt = B.T.tocsr()

    if x0 is None:
        logx = -np.log(np.repeat(sizes, sizes).astype(np.float64))
    else:
        logx = kernels.eg_step(block_ptr, np.log(np.maximum(np.asarray(x0, dtype=np.float64), 1e-300)),
                               np.zeros(sizes.sum()), 0.0)
    x = np.exp(logx)

    def full_y(yl):
        y = np.zeros(nrows)
        y[live] = yl
        return y

    loads = B @ x
    if live.size == 0 or loads.max() <= 0:
        return MinMaxResult(x, 0.0, 0.0, np.zeros(nrows), 0)
    if np.all(sizes == 1):
        y = np.zeros(live.size)
        y[int(np.argmax(loads))] = 1.0
        top = float(loads.max())
        return MinMaxResult(x, top, top, full_y(y), 0)

    # balance the two players' step sizes by their entropy radii
    radius_x = max(float(np.log(sizes).sum()), math.log(2))
    ratio = math.log(max(live.size, 2)) / radius_x
    logy = np.full(live.size, -math.log(live.size))
    y = np.exp(logy)

    best_ub, best_x = float(loads.max()), x
    best_lb, best_y = 0.0, y
    eta = 1.0 / float(abs(B).max())
    x_sum = np.zeros_like(x)
    y_sum = np.zeros_like(y)
    weight = 0.0
    g = Bt @ y

    for it in range(1, max_iter + 1):
        for _ in range(60):
            logx_h = kernels.eg_step(block_ptr, logx, g, eta)
            logy_h = _log_normalize(logy + eta * ratio * loads)
            x_h, y_h = np.exp(logx_h), np.exp(logy_h)
            loads_h = B @ x_h
            g_h = Bt @ y_h
            move = max(float(np.abs(g_h - g).max()), ratio * float(np.abs(loads_h - loads).max()))
            if eta * move <= 0.9:
                break
            eta *= 0.5
        logx = kernels.eg_step(block_ptr, logx, g_h, eta)
        logy = _log_normalize(logy + eta * ratio * loads_h)
        x = np.exp(logx)
        y = np.exp(logy)

        x_sum += eta * x_h
        y_sum += eta * y_h
        weight += eta
        for cand_x, cand_loads in ((x_h, loads_h), (x_sum / weight, None)):
            top = float((B @ cand_x if cand_loads is None else cand_loads).max())
            if top < best_ub:
                best_ub, best_x = top, cand_x
        for cand_y, cand_g in ((y_h, g_h), (y_sum / weight, None)):
            lb = float(kernels.block_min(block_ptr, Bt @ cand_y if cand_g is None else cand_g).sum())
            if lb > best_lb:
                best_lb, best_y = lb, cand_y
        if best_ub <= (1.0 + eps) * best_lb:
            return MinMaxResult(best_x, best_ub, best_lb, full_y(best_y), it)

        loads = B @ x
        g = Bt @ y
        eta *= 1.2

    best = MinMaxResult(best_x, best_ub, best_lb, full_y(best_y), max_iter)
    raise NonConvergenceError(
        f"no (1+{eps}) certificate after {max_iter} iterations (value {best_ub:.6g}, bound {best_lb:.6g})", best)
