"""No-information benchmark: only relative ranks are observed.

Keeping the k-th arrival when it has relative rank r among the first k gives
an expected final rank of r (n + 1) / (k + 1).  With ``C_k`` the value of
continuing after step k (the next relative rank is uniform on 1..k+1)::

    V_k(r) = min(r (n + 1) / (k + 1), C_k),   V_n(r) = r,
    C_k    = mean_{r=1..k+1} V_{k+1}(r),      W(n) = V_1(1).

``V_{k+1}(r)`` is linear in r up to the cut-off where it meets ``C_{k+1}``,
so each ``C_k`` is an O(1) closed sum and one horizon costs O(n).
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .core import InputError


def _w(n, one):
    """The recursion in whatever number type ``one`` belongs to."""
    nn = one * (n + 1)
    cont = None  # C_{n}: stopping is forced at step n
    for k in range(n - 1, 0, -1):
        # C_k from V_{k+1}(r) = min(r * alpha, C_{k+1}), r = 1..k+1
        alpha = nn / (k + 2)
        m = k + 1
        cut = m if cont is None else min(m, math.floor(cont / alpha))
        cont_next = cont if cont is not None else 0
        cont = (alpha * cut * (cut + 1) / 2 + (m - cut) * cont_next) / m
    first = nn / 2
    return first if cont is None else min(first, cont)


def w_value(n: int) -> float:
    """Optimal expected rank W(n) using relative ranks only."""
    if n < 1:
        raise InputError("n must be at least 1")
    return float(_w(n, 1.0))


def w_value_exact(n: int) -> Fraction:
    if n < 1:
        raise InputError("n must be at least 1")
    return Fraction(_w(n, Fraction(1)))


def w_table(max_n: int) -> list[tuple[int, float]]:
    """W(1), ..., W(max_n), swept for all horizons at once."""
    if max_n < 1:
        raise InputError("max_n must be at least 1")
    n = np.arange(1, max_n + 1, dtype=float)
    nn = n + 1.0
    cont = np.full(max_n, np.inf)
    # index by steps-to-go: step k = n - j for horizons with n > j
    for j in range(1, max_n):
        live = n > j
        k = n[live] - j
        alpha = nn[live] / (k + 2.0)
        m = k + 1.0
        c = cont[live]
        cut = np.where(np.isinf(c), m, np.minimum(m, np.floor(c / alpha)))
        tail = (m - cut) * np.where(np.isinf(c), 0.0, c)
        cont[live] = (alpha * cut * (cut + 1.0) / 2.0 + tail) / m
    w = np.minimum(nn / 2.0, cont)
    return [(i + 1, float(x)) for i, x in enumerate(w)]
