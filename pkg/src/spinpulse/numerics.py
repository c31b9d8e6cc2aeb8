"""Numerical kernels: adaptive Gauss-Kronrod quadrature, root finding with an
explicit residue gate, and 1-D amplitude minimization over a spare parameter.

The root finder wraps MINPACK's hybrd (Powell dogleg, forward-difference
Jacobian) through scipy; success is never reported unless the recomputed
residue sum(|f_i|) is below the configured acceptance.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.optimize

from ._gk61 import GAUSS_SLICE, GAUSS_WEIGHTS, GK_NODES, GK_WEIGHTS


@dataclass(frozen=True)
class QuadraturePolicy:
    """Adaptive-quadrature settings for the 61-point Gauss-Kronrod pair."""

    target: float = 1e-12
    max_panels: int = 4000

    def __post_init__(self):
        if self.target < 1e-15:
            raise ValueError("error target below the machine-epsilon floor of the rule")


@dataclass(frozen=True)
class SolverConfig:
    """Root-finder settings; acceptance is on sum(|f_i|)."""

    acceptance: float = 1e-10
    max_evals: int = 4000
    fd_step: float = 1e-7
    seeds: tuple[int, ...] = (0, 1, 2, 3, 4, 5, 6, 7)

    def __post_init__(self):
        if self.acceptance <= 0:
            raise ValueError("acceptance must be positive")


def panel_nodes(a: float, b: float) -> np.ndarray:
    """The 61 Kronrod abscissae mapped to the interval [a, b]."""
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    return mid + half * GK_NODES


def panel_values(fa: np.ndarray, a: float, b: float) -> tuple[np.ndarray, float]:
    """(Kronrod integral, error estimate) from integrand samples at panel_nodes.

    fa has shape (61,) or (61, k). The error estimate is the raw embedded
    difference |K - G|, which overestimates the Kronrod error; adaptive
    bisection simply digs a little deeper than strictly needed.
    """
    half = 0.5 * (b - a)
    kron = half * np.tensordot(GK_WEIGHTS, fa, axes=(0, 0))
    gauss = half * np.tensordot(GAUSS_WEIGHTS, fa[GAUSS_SLICE], axes=(0, 0))
    err = float(np.max(np.abs(kron - gauss)))
    return kron, err


def integrate_adaptive(
    f: Callable[[np.ndarray], np.ndarray],
    interval: tuple[float, float],
    policy: QuadraturePolicy = QuadraturePolicy(),
) -> np.ndarray | float:
    """Integrate a vectorized (possibly vector-valued) function adaptively.

    f maps an array of sample points to an array of shape (n,) or (n, k).
    Raises RuntimeError when the panel cap is reached before the absolute
    error target.
    """
    a, b = interval
    scalar = None

    def evaluate(lo: float, hi: float):
        nonlocal scalar
        vals = np.asarray(f(panel_nodes(lo, hi)), dtype=float)
        if scalar is None:
            scalar = vals.ndim == 1
        return panel_values(vals, lo, hi)

    val, err = evaluate(a, b)
    heap = [(-err, a, b, val)]
    total_err = err
    while total_err > policy.target:
        if len(heap) >= policy.max_panels:
            raise RuntimeError(
                f"quadrature did not reach {policy.target:g} within "
                f"{policy.max_panels} panels (error {total_err:g})"
            )
        neg_err, lo, hi, _ = heapq.heappop(heap)
        total_err += neg_err  # parent error leaves the running total
        mid = 0.5 * (lo + hi)
        for lo2, hi2 in ((lo, mid), (mid, hi)):
            v, e = evaluate(lo2, hi2)
            heapq.heappush(heap, (-e, lo2, hi2, v))
            total_err += e
    total = sum(item[3] for item in heap)
    return float(total) if scalar else total


@dataclass
class RootResult:
    x: np.ndarray
    residue: float
    success: bool
    nfev: int
    message: str


def find_root(
    F: Callable[[np.ndarray], np.ndarray],
    x0: np.ndarray,
    config: SolverConfig = SolverConfig(),
) -> RootResult:
    """Solve the square system F(x) = 0 by Powell's hybrid method.

    The plain start is tried first; if the residue gate fails, the start is
    re-jittered once per entry in config.seeds (hybrd stalls are start-point
    artifacts, e.g. narrow curved valleys). Success requires the recomputed
    residue sum(|F_i|) < config.acceptance; otherwise the best iterate seen
    is returned with success=False.
    """
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    starts = [x0]
    for seed in config.seeds:
        rng = np.random.default_rng(seed)
        starts.append(x0 + rng.normal(size=x0.size) * 0.25 * (1.0 + np.abs(x0)))

    best: RootResult | None = None
    nfev = 0
    for start in starts:
        sol = scipy.optimize.root(
            F,
            start,
            method="hybr",
            options={
                "xtol": 1e-13,
                "eps": config.fd_step,
                "maxfev": config.max_evals,
            },
        )
        nfev += int(sol.nfev)
        residue = float(np.sum(np.abs(F(sol.x))))
        result = RootResult(
            x=sol.x,
            residue=residue,
            success=residue < config.acceptance,
            nfev=nfev,
            message=sol.message,
        )
        if result.success:
            return result
        if best is None or residue < best.residue:
            best = result
    best.nfev = nfev
    return best


@dataclass
class SpareScan:
    """One amplitude-minimization attempt: a pinned-spare solve plus a bracket.

    solve_at(spare, x0) solves the square residual system with the spare
    coefficient held fixed and returns (amplitude, x, residue); infeasible
    points must return amplitude = inf. label names the coefficient subset.
    """

    label: str
    solve_at: Callable[[float, np.ndarray], tuple[float, np.ndarray, float]]
    bracket: tuple[float, float]
    x0: np.ndarray


@dataclass
class MinimizeResult:
    label: str
    spare: float
    amplitude: float
    x: np.ndarray
    residue: float
    scans: list = field(default_factory=list)


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_section(g, lo: float, hi: float, tol: float, max_iter: int = 120):
    """Minimize g on [lo, hi]; g returns (amplitude, payload)."""
    c = hi - _GOLDEN * (hi - lo)
    d = lo + _GOLDEN * (hi - lo)
    gc, pc = g(c)
    gd, pd = g(d)
    for _ in range(max_iter):
        if hi - lo < tol:
            break
        if gc < gd:
            hi, d, gd, pd = d, c, gc, pc
            c = hi - _GOLDEN * (hi - lo)
            gc, pc = g(c)
        else:
            lo, c, gc, pc = c, d, gd, pd
            d = lo + _GOLDEN * (hi - lo)
            gd, pd = g(d)
    if gc < gd:
        return c, gc, pc
    return d, gd, pd


def minimize_amplitude(
    scans: Sequence[SpareScan],
    config: SolverConfig = SolverConfig(),
    n_coarse: int = 9,
    spare_tol: float = 1e-7,
) -> MinimizeResult:
    """Smallest-amplitude solution over several spare-coefficient scans.

    Each scan runs a coarse grid over its bracket followed by golden-section
    refinement of amplitude(spare); the inner solve is warm-started along the
    scan. Results merge deterministically; near-ties (within 1e-9 relative)
    go to the smaller |spare|.
    """
    best: MinimizeResult | None = None
    history = []
    for scan in scans:
        warm = {"x": np.asarray(scan.x0, dtype=float)}

        def g(spare, _scan=scan, _warm=warm):
            amp, x, residue = _scan.solve_at(spare, _warm["x"])
            if np.isfinite(amp):
                _warm["x"] = x
            return amp, (x, residue)

        lo, hi = scan.bracket
        grid = np.linspace(lo, hi, n_coarse)
        values = [g(s) for s in grid]
        amps = np.array([v[0] for v in values])
        if not np.isfinite(amps).any():
            history.append((scan.label, None, math.inf))
            continue
        i = int(np.argmin(amps))
        blo = grid[max(i - 1, 0)]
        bhi = grid[min(i + 1, n_coarse - 1)]
        warm["x"] = values[i][1][0] if np.isfinite(amps[i]) else warm["x"]
        spare, amp, (x, residue) = _golden_section(g, blo, bhi, spare_tol)
        history.append((scan.label, spare, amp))
        candidate = MinimizeResult(scan.label, spare, amp, x, residue)
        if best is None:
            best = candidate
        elif amp < best.amplitude * (1.0 - 1e-9):
            best = candidate
        elif amp < best.amplitude * (1.0 + 1e-9) and abs(spare) < abs(best.spare):
            best = candidate
    if best is None:
        raise RuntimeError("no feasible root found from any scan")
    best.scans = history
    return best
