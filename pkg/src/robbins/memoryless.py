"""Memoryless threshold rules: accept X_k iff X_k <= a_k for a fixed vector a.

The expected rank of such a rule with ``0 <= a_1 <= ... <= a_n = 1`` is::

    1 + 1/2 sum_{k<n} (n-k) a_k^2 P_k
      + 1/2 sum_{k<=n} P_k sum_{j<k} (a_k - a_j)^2 / (1 - a_j),
    P_k = prod_{j<k} (1 - a_j).

Once some a_K = 1 every later P_k vanishes, so the sums are cut at K.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import ConvergenceError, InputError, Policy

CAP = 1.0 - 1e-12
PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ThresholdVector:
    a: tuple[float, ...]

    def __init__(self, a: Sequence[float]):
        a = tuple(float(x) for x in a)
        if not a:
            raise InputError("threshold vector is empty")
        if a[-1] != 1.0:
            raise InputError(f"last threshold must be 1, got {a[-1]!r}")
        if a[0] < 0.0:
            raise InputError("thresholds must be non-negative")
        if any(y < x for x, y in zip(a, a[1:])):
            raise InputError("thresholds must be nondecreasing")
        object.__setattr__(self, "a", a)

    @property
    def n(self) -> int:
        return len(self.a)

    def policy(self, name: Optional[str] = None) -> "MemorylessPolicy":
        return MemorylessPolicy(self, name)


class MemorylessPolicy(Policy):
    def __init__(self, tv: ThresholdVector, name: Optional[str] = None):
        self.tv = tv
        self.horizon = tv.n
        self.name = name or f"memoryless[{tv.n}]"
        self._a = np.array(tv.a)

    def threshold(self, k, history=()):
        return self.tv.a[k - 1]

    def threshold_array(self, k, history):
        return np.full(len(history), self.tv.a[k - 1])

    @property
    def kernel(self):
        return "memoryless", self._a

    def describe(self):
        return {"id": self.name, "horizon": self.horizon, "thresholds": list(self.tv.a)}


def stop_first(n: int) -> MemorylessPolicy:
    """The rule that always keeps X_1."""
    if n < 1:
        raise InputError("n must be at least 1")
    return ThresholdVector([1.0] * n).policy(f"stop-first:{n}")


def _expected_rank(a: np.ndarray) -> float:
    n = len(a)
    hit = np.flatnonzero(a[:-1] >= 1.0)
    m = hit[0] + 1 if len(hit) else n
    a = a[:m]
    one_minus = 1.0 - a[: m - 1]
    p = np.ones(m)
    p[1:] = np.cumprod(one_minus)
    w = n - np.arange(1, m + 1)
    first = np.dot(w * a * a, p)
    diff = a[:, None] - a[None, : m - 1]
    inner = np.tril(diff * diff / one_minus[None, :], k=-1).sum(axis=1)
    return float(1.0 + 0.5 * first + 0.5 * np.dot(p, inner))


def expected_rank(tv: ThresholdVector) -> float:
    return _expected_rank(np.asarray(tv.a))


# --------------------------------------------------------------------------
# optimisation


def golden_section(f, lo: float, hi: float, tol: float = 1e-12, max_iter: int = 200):
    """Minimise a unimodal ``f`` on [lo, hi]; returns (x, f(x))."""
    x1 = hi - PHI * (hi - lo)
    x2 = lo + PHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - PHI * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + PHI * (hi - lo)
            f2 = f(x2)
    best = min((f1, x1), (f2, x2), (f(lo), lo), (f(hi), hi))
    return best[1], best[0]


def _coordinate_slice(a: np.ndarray, i: int):
    """The objective as a function of a[i] alone.

    With everything else fixed it is an exact quadratic, so three evaluations
    pin it down.
    """
    pts = (0.0, 0.25, 0.5)
    vals = []
    for x in pts:
        a[i] = x
        vals.append(_expected_rank(a))
    f0, f1, f2 = vals
    c2 = (f2 - 2.0 * f1 + f0) / (2.0 * 0.25**2)
    c1 = (f1 - f0) / 0.25 - c2 * 0.25
    return lambda x: f0 + x * (c1 + c2 * x)


def _descend(a: np.ndarray, tol: float, max_sweeps: int):
    n = len(a)
    value = _expected_rank(a)
    for sweep in range(max_sweeps):
        previous = value
        step = 0.0
        for i in range(n - 1):
            old = a[i]
            line = _coordinate_slice(a, i)
            x, _ = golden_section(line, 0.0, CAP)
            a[i] = x
            step = max(step, abs(x - old))
        value = _expected_rank(a)
        if previous - value < tol and step < 1e-7:
            return a, value, sweep + 1, True
    return a, value, max_sweeps, False


def _starts(n: int, count: int = 5):
    for j in range(count):
        level = (j + 1) / (count + 1)
        a = np.full(n, level)
        a[-1] = 1.0
        yield a


@dataclass
class OptimizeResult:
    thresholds: ThresholdVector
    value: float
    sweeps: int
    start: int


def optimize(n: int, tol: float = 1e-9, max_sweeps: int = 20000, workers: int = 1):
    """Best memoryless thresholds for horizon ``n``: ``(ThresholdVector, value)``.

    Coordinate descent with golden-section line searches from five constant
    starting levels; the best start wins (lowest value, then lowest index).
    """
    return optimize_full(n, tol, max_sweeps, workers)[:2]


def optimize_full(n, tol=1e-9, max_sweeps=20000, workers=1):
    if n < 1:
        raise InputError("n must be at least 1")
    if n == 1:
        tv = ThresholdVector([1.0])
        return tv, 1.0, OptimizeResult(tv, 1.0, 0, 0)

    def run(item):
        j, a0 = item
        a, value, sweeps, ok = _descend(a0, tol, max_sweeps)
        return j, a, value, sweeps, ok

    items = list(enumerate(_starts(n)))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(run, items))
    else:
        results = [run(item) for item in items]

    j, a, value, sweeps, ok = min(results, key=lambda r: (r[2], r[0]))
    a = np.maximum.accumulate(a)
    a[-1] = 1.0
    tv = ThresholdVector(a)
    value = _expected_rank(np.asarray(tv.a))
    if not ok:
        raise ConvergenceError(
            f"coordinate descent did not converge in {max_sweeps} sweeps (n={n})",
            best=(tv, value),
        )
    return tv, value, OptimizeResult(tv, value, sweeps, j)


# --------------------------------------------------------------------------
# parametric threshold family (ASC)


@dataclass(frozen=True)
class ASCCoefficients:
    """Numerator polynomial c0 + c1 t + c2 t^2 (t = k/n) over n - k + c."""

    c0: float = 1.77
    c1: float = 0.54
    c2: float = -0.27
    c: float = 1.0


def asc_thresholds(n: int, coeffs: ASCCoefficients) -> ThresholdVector:
    if n < 1:
        raise InputError("n must be at least 1")
    k = np.arange(1, n + 1, dtype=float)
    denom = n - k[:-1] + coeffs.c
    if np.any(denom <= 0):
        raise InputError(f"denominator n - k + c is not positive for c={coeffs.c}")
    t = k[:-1] / n
    a = np.ones(n)
    a[:-1] = (coeffs.c0 + coeffs.c1 * t + coeffs.c2 * t * t) / denom
    a = np.clip(a, 0.0, 1.0)
    return ThresholdVector(np.maximum.accumulate(a))


def tune_asc_offset(n: int, coeffs: ASCCoefficients = ASCCoefficients(), lo=0.05, hi=20.0, tol=1e-6):
    """Pick the denominator offset c by 1-D search; returns (coeffs, value)."""

    def value(c):
        return expected_rank(asc_thresholds(n, ASCCoefficients(coeffs.c0, coeffs.c1, coeffs.c2, c)))

    c, v = golden_section(value, lo, hi, tol=tol)
    return ASCCoefficients(coeffs.c0, coeffs.c1, coeffs.c2, c), v
