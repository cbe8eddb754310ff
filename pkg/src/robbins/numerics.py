"""Adaptive Simpson quadrature with forced breakpoints, and bracketed root finding."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np
from scipy.optimize import brentq

from .core import ConvergenceError


@dataclass(frozen=True)
class QuadConfig:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_depth: int = 30
    min_panels: int = 4
    root_tol: float = 1e-13

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0 or self.root_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_depth < 1 or self.min_panels < 1:
            raise ValueError("max_depth and min_panels must be positive")

    def halved(self) -> "QuadConfig":
        return QuadConfig(self.rel_tol / 2, self.abs_tol / 2, self.max_depth, self.min_panels, self.root_tol / 2)


def _simpson_panel(f, a, fa, m, fm, b, fb, whole, tol, depth, max_depth, out):
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = f(lm)
    frm = f(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    delta = left + right - whole
    if abs(delta) <= 15.0 * tol:
        return left + right + delta / 15.0
    if depth >= max_depth:
        out[0] = max(out[0], abs(delta) / 15.0)
        return left + right + delta / 15.0
    # the tolerance shrinks by sqrt(2) per level so isolated kinks stay affordable
    t = tol / math.sqrt(2.0)
    return (_simpson_panel(f, a, fa, lm, flm, m, fm, left, t, depth + 1, max_depth, out)
            + _simpson_panel(f, m, fm, rm, frm, b, fb, right, t, depth + 1, max_depth, out))


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    breakpoints: Iterable[float] = (),
    cfg: QuadConfig = QuadConfig(),
) -> float:
    """Integrate ``f`` over [a, b], never letting a panel straddle a breakpoint.

    Breakpoints should be every known discontinuity or kink of ``f``.
    Panels are summed left to right, so the result does not depend on call order.
    """
    if b < a:
        return -adaptive_simpson(f, b, a, breakpoints, cfg)
    cuts = sorted({a, b} | {x for x in breakpoints if a < x < b})
    edges = []
    for lo, hi in zip(cuts, cuts[1:]):
        step = (hi - lo) / cfg.min_panels
        edges.extend(lo + i * step for i in range(cfg.min_panels))
    edges.append(b)

    panels = []
    for lo, hi in zip(edges, edges[1:]):
        if hi <= lo:
            continue
        # evaluate strictly inside each continuity interval: breakpoints may be jumps
        eps = 1e-15 * max(1.0, abs(lo), abs(hi))
        flo = f(min(lo + eps, 0.5 * (lo + hi)))
        fhi = f(max(hi - eps, 0.5 * (lo + hi)))
        m = 0.5 * (lo + hi)
        fm = f(m)
        panels.append((lo, flo, m, fm, hi, fhi, (hi - lo) / 6.0 * (flo + 4.0 * fm + fhi)))
    rough = sum(p[-1] for p in panels)
    tol = max(cfg.abs_tol, cfg.rel_tol * abs(rough)) / max(1, len(panels))

    worst = [0.0]
    total = 0.0
    for lo, flo, m, fm, hi, fhi, whole in panels:
        total += _simpson_panel(f, lo, flo, m, fm, hi, fhi, whole, tol, 0, cfg.max_depth, worst)
    if worst[0] > max(cfg.abs_tol, cfg.rel_tol * abs(total)):
        raise ConvergenceError(
            f"adaptive Simpson missed tolerance on [{a}, {b}]", best=total, achieved=worst[0]
        )
    return total


def find_root(f: Callable[[float], float], lo: float, hi: float, flo=None, fhi=None, tol=1e-13) -> float:
    """Root of ``f`` in [lo, hi] given a sign change (Brent's bracketed method)."""
    flo = f(lo) if flo is None else flo
    fhi = f(hi) if fhi is None else fhi
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise ConvergenceError(f"no sign change on [{lo}, {hi}]", best=None)
    return brentq(f, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=200)
