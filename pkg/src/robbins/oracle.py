"""Numerical backward induction for small horizons.

Nothing here uses the closed forms of :mod:`robbins.exact`; every threshold
and value is recomputed from the stop/continue comparison by quadrature and
root finding, so the two modules check each other.

Conventions
-----------
``history`` always holds the k - 1 values seen before step k.

* ``stop_value(n, k, history, x)`` is the expected final rank of keeping
  X_k = x: one, plus the past values at or below x, plus (n - k) x expected
  future values below x.
* ``continuation_value(n, k, history)`` is the expected final rank of playing
  optimally from step k on, before X_k is revealed.  At k = n it is the
  closed last-step average ``1 + sum(1 - h)``; otherwise it is
  ``int_0^1 min(stop_value(n, k, history, u),
  continuation_value(n, k + 1, history + (u,))) du``.
* ``threshold_numeric(n, k, history)`` is the indifference point between
  keeping X_k and moving on to step k + 1.
"""

from __future__ import annotations

import bisect
import logging
from typing import Sequence

from .core import InputError, check_unit
from .numerics import QuadConfig, adaptive_simpson, find_root

log = logging.getLogger(__name__)

DEFAULT = QuadConfig()


def _check(n, k, history, kmax=None):
    if n < 1:
        raise InputError("n must be at least 1")
    kmax = n if kmax is None else kmax
    if not 1 <= k <= kmax:
        raise InputError(f"step k={k} outside [1, {kmax}] for n={n}")
    if len(history) != k - 1:
        raise InputError(f"step {k} needs {k - 1} past values, got {len(history)}")
    return tuple(check_unit("history value", h) for h in history)


def stop_value(n: int, k: int, history: Sequence[float], x: float) -> float:
    history = _check(n, k, history)
    x = check_unit("x", x)
    return _stop(n, k, history, x)


def _stop(n, k, history, x):
    return 1.0 + sum(1 for h in history if h <= x) + (n - k) * x


def continuation_value(n: int, k: int, history: Sequence[float] = (), cfg: QuadConfig = DEFAULT) -> float:
    history = _check(n, k, history)
    return _cont(n, k, history, cfg)


def _cont(n, k, history, cfg):
    if k == n:
        return 1.0 + sum(1.0 - h for h in history)
    t = _threshold(n, k, history, cfg)

    def integrand(u):
        s = _stop(n, k, history, u)
        return s if u <= t else min(s, _cont(n, k + 1, history + (u,), cfg))

    return adaptive_simpson(integrand, 0.0, 1.0, tuple(history) + (t,), cfg)


def threshold_numeric(n: int, k: int, history: Sequence[float] = (), cfg: QuadConfig = DEFAULT) -> float:
    """Smallest x where keeping X_k = x stops being at least as good as moving on."""
    history = _check(n, k, history)
    if k == n:
        return 1.0
    return _threshold(n, k, history, cfg)


def _threshold(n, k, history, cfg):
    # the stop value jumps up by one at each past value, so search each
    # continuity segment left to right for the first point where stopping loses
    cuts = sorted({0.0, 1.0} | {h for h in history if 0.0 < h < 1.0})
    for lo, hi in zip(cuts, cuts[1:]):
        below = bisect.bisect_right(sorted(history), lo)

        def gap(x, below=below):
            return 1.0 + below + (n - k) * x - _cont(n, k + 1, history + (x,), cfg)

        glo = gap(lo)
        if glo > 0.0:
            return lo
        ghi = gap(hi)
        if ghi > 0.0:
            return find_root(gap, lo, hi, glo, ghi, tol=cfg.root_tol)
    return 1.0


def value_v(n: int, cfg: QuadConfig = DEFAULT) -> float:
    """Optimal expected rank v(n).

    Validated for n <= 4; n = 5 runs but is slow and has no reference value.
    """
    if not 1 <= n <= 5:
        raise InputError("value_v supports 1 <= n <= 5")
    if n == 5:
        log.warning("value_v(5) is best-effort: no reference value exists")
    return _cont(n, 1, (), cfg)
