"""Closed-form optimal policies for horizons 2, 3 and 4.

All constants are evaluated from their radical expressions at import time.
The step-3 threshold for n = 4 is the minimiser of a convex function made of
three parabolas glued at the two past observations; it is found by comparing
a handful of candidates rather than by transcribing the region picture.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .core import InputError, Policy, check_unit
from .memoryless import MemorylessPolicy, ThresholdVector

SQRT13 = math.sqrt(13.0)

# n = 3
A3 = (5.0 - SQRT13) / 4.0
V3 = 341.0 / 144.0 - 13.0 / 48.0 * SQRT13


def _h1_closed_form() -> float:
    t = 6.0 / 1849.0 * math.sqrt(123199.0) - 87150.0 / 79507.0
    return t ** (1.0 / 3.0) - 846.0 / 1849.0 * t ** (-1.0 / 3.0) + 53.0 / 43.0


# n = 4
H1 = _h1_closed_form()
BETAS = (
    1.5 * math.sqrt(2.0) - 2.0,
    (math.sqrt(30.0) - 5.0) / 2.0,
    (7.0 - math.sqrt(19.0)) / 6.0,
    (11.0 - 3.0 * math.sqrt(11.0)) / 2.0,
    (7.0 - 3.0 * math.sqrt(3.0)) / 2.0,
)
# v(4) has no usable closed form here; this is a five-decimal reference value
V4_REFERENCE = 1.49329


class Region(enum.Enum):
    A1 = "A1"  # threshold at the smaller past value
    A2 = "A2"  # threshold at the larger past value
    B1 = "B1"  # vertex of the parabola below both past values
    B2 = "B2"  # vertex of the middle parabola
    B3 = "B3"  # vertex of the parabola above both past values


def g2(h: float) -> float:
    """Expected rank for n = 2 when X_1 is kept iff X_1 <= h."""
    h = check_unit("h", h)
    return 1.0 + h * h / 2.0 + (1.0 - h) ** 2 / 2.0


def g3(x1: float, h: float) -> float:
    """Expected rank for n = 3 from step 2 on, given X_1 = x1 and step-2 threshold h."""
    x1 = check_unit("x1", x1)
    h = check_unit("h", h)
    return 1.5 + h * h - h + (1.0 - x1) * (1.0 - h) + max(h - x1, 0.0)


def argmin_g3(x1: float) -> float:
    x1 = check_unit("x1", x1)
    if x1 < 1.0 / 3.0:
        return (1.0 - x1) / 2.0
    if x1 < 2.0 / 3.0:
        return x1
    return 1.0 - x1 / 2.0


def _g4(x1, x2, h):
    # shared by scalar and array callers; operation order matches the C kernel
    return (
        1.5 + h * h - h + (2.0 - x1 - x2) * (1.0 - h)
        + np.maximum(h - x1, 0.0) + np.maximum(h - x2, 0.0)
    )


def g4(x1: float, x2: float, h: float) -> float:
    """Expected rank for n = 4 from step 3 on, given history (x1, x2) and threshold h."""
    x1, x2, h = check_unit("x1", x1), check_unit("x2", x2), check_unit("h", h)
    return float(_g4(x1, x2, h))


_CANDIDATE_LABELS = (Region.A1, Region.A2, Region.B1, Region.B2, Region.B3, Region.B1, Region.B3)


def _h3_candidates(x1, x2):
    lo = np.minimum(x1, x2)
    hi = np.maximum(x1, x2)
    s = x1 + x2
    return (
        lo,
        hi,
        np.minimum(np.maximum((3.0 - s) / 2.0, 0.0), lo),
        np.minimum(np.maximum((2.0 - s) / 2.0, lo), hi),
        np.minimum(np.maximum((1.0 - s) / 2.0, hi), 1.0),
        np.zeros_like(s),
        np.ones_like(s),
    )


def _h3_argmin(x1, x2):
    """(threshold, candidate index) minimising g4; ties go to the smaller h, then list order."""
    cands = _h3_candidates(x1, x2)
    best_h = cands[0]
    best_v = _g4(x1, x2, best_h)
    best_i = np.zeros(np.shape(best_h), dtype=np.int64)
    for i, h in enumerate(cands[1:], start=1):
        v = _g4(x1, x2, h)
        better = (v < best_v) | ((v == best_v) & (h < best_h))
        best_h = np.where(better, h, best_h)
        best_v = np.where(better, v, best_v)
        best_i = np.where(better, i, best_i)
    return best_h, best_i


def _label_index(x1, x2):
    _, i = _h3_argmin(x1, x2)
    # on the diagonal both kinks coincide; take the label of the nearby
    # off-diagonal points, which depends on where the middle vertex sits
    diag_a2 = (x1 == x2) & (i == 0) & ((2.0 - x1 - x2) / 2.0 > x1)
    return np.where(diag_a2, 1, i)


def classify_region(x1: float, x2: float) -> Region:
    x1, x2 = check_unit("x1", x1), check_unit("x2", x2)
    return _CANDIDATE_LABELS[int(_label_index(np.float64(x1), np.float64(x2)))]


def classify_region_array(x1, x2) -> np.ndarray:
    """Region labels as strings for arrays of histories."""
    i = _label_index(np.asarray(x1, float), np.asarray(x2, float))
    return np.array([r.value for r in _CANDIDATE_LABELS])[i]


def h3_by_region(region: Region, x1: float, x2: float) -> float:
    s = x1 + x2
    return {
        Region.A1: min(x1, x2),
        Region.A2: max(x1, x2),
        Region.B1: (3.0 - s) / 2.0,
        Region.B2: (2.0 - s) / 2.0,
        Region.B3: (1.0 - s) / 2.0,
    }[region]


def h3(x1: float, x2: float) -> float:
    """Optimal step-3 threshold for n = 4 given (x1, x2)."""
    return h3_by_region(classify_region(x1, x2), float(x1), float(x2))


def h3_array(x1, x2) -> np.ndarray:
    h, _ = _h3_argmin(np.asarray(x1, float), np.asarray(x2, float))
    return h


# --------------------------------------------------------------------------
# h2 for n = 4


@dataclass(frozen=True)
class Piece:
    id: str
    formula: str
    f: Callable


@dataclass(frozen=True)
class PiecewiseCurve:
    """Closed-form pieces on [0, 1] split at sorted interior breakpoints.

    A breakpoint belongs to the piece on its left.
    """

    breakpoints: tuple[float, ...]
    pieces: tuple[Piece, ...]

    def __post_init__(self):
        if len(self.pieces) != len(self.breakpoints) + 1:
            raise InputError("need exactly one more piece than breakpoints")
        if list(self.breakpoints) != sorted(self.breakpoints):
            raise InputError("breakpoints must be sorted")

    def piece_index(self, x):
        return np.searchsorted(self.breakpoints, x, side="left")

    def __call__(self, x):
        x = np.asarray(x, float)
        idx = self.piece_index(x)
        out = np.empty_like(x)
        for i, piece in enumerate(self.pieces):
            mask = idx == i
            if np.any(mask):
                out[mask] = piece.f(x[mask])
        return out if out.ndim else float(out)

    def jumps(self) -> list[float]:
        """|left piece - right piece| at every breakpoint."""
        return [
            abs(float(self.pieces[i].f(np.float64(b))) - float(self.pieces[i + 1].f(np.float64(b))))
            for i, b in enumerate(self.breakpoints)
        ]

    def slopes(self, i: int, eps: float = 1e-6) -> tuple[float, float]:
        """One-sided difference quotients of the two pieces meeting at breakpoint i."""
        b = self.breakpoints[i]
        left, right = self.pieces[i].f, self.pieces[i + 1].f
        return (
            float(left(np.float64(b)) - left(np.float64(b - eps))) / eps,
            float(right(np.float64(b + eps)) - right(np.float64(b))) / eps,
        )


H2_PIECES = (
    Piece("h21", "(5 - x - sqrt(x^2 + 6x + 13))/4",
          lambda x: (5.0 - x - np.sqrt(x * x + 6.0 * x + 13.0)) / 4.0),
    Piece("h22", "sqrt(8x + 54) - x - 7",
          lambda x: np.sqrt(8.0 * x + 54.0) - x - 7.0),
    Piece("h23", "x", lambda x: x + 0.0),
    Piece("h24", "-(4x^2 - 6x + 5)/(2(x - 4))",
          lambda x: -(4.0 * x * x - 6.0 * x + 5.0) / (2.0 * (x - 4.0))),
    Piece("h25", "sqrt(12x + 42) - 6 - x",
          lambda x: np.sqrt(12.0 * x + 42.0) - 6.0 - x),
    Piece("h26", "3/2 - (x + sqrt(x^2 - 4x + 16))/4",
          lambda x: 1.5 - (x + np.sqrt(x * x - 4.0 * x + 16.0)) / 4.0),
)


def h2_curve() -> PiecewiseCurve:
    return PiecewiseCurve(tuple(BETAS), H2_PIECES)


def h2(x1: float) -> float:
    """Optimal step-2 threshold for n = 4 given X_1 = x1."""
    return float(h2_curve()(check_unit("x1", x1)))


# --------------------------------------------------------------------------
# policies


def policy2() -> MemorylessPolicy:
    return ThresholdVector([0.5, 1.0]).policy("exact2")


def _h2_rule3(x1):
    return np.where(x1 < A3, (1.0 - x1) / 2.0, np.where(x1 <= 2.0 / 3.0, x1, 1.0 - x1 / 2.0))


class Exact3Policy(Policy):
    horizon = 3
    name = "exact3"

    def threshold(self, k, history=()):
        if k == 1:
            return A3
        if k == 2:
            return float(_h2_rule3(float(history[0])))
        return 1.0

    def threshold_array(self, k, history):
        if k == 1:
            return np.full(len(history), A3)
        if k == 2:
            return _h2_rule3(history[:, 0])
        return np.ones(len(history))

    @property
    def kernel(self):
        return "exact3", np.array([A3])


class Exact4Policy(Policy):
    horizon = 4
    name = "exact4"

    def threshold(self, k, history=()):
        if k == 1:
            return H1
        if k == 2:
            return h2(history[0])
        if k == 3:
            return h3(history[0], history[1])
        return 1.0

    def threshold_array(self, k, history):
        if k == 1:
            return np.full(len(history), H1)
        if k == 2:
            return np.asarray(h2_curve()(history[:, 0]))
        if k == 3:
            return h3_array(history[:, 0], history[:, 1])
        return np.ones(len(history))

    @property
    def kernel(self):
        return "exact4", np.array((H1,) + tuple(BETAS))


def policy3() -> Exact3Policy:
    return Exact3Policy()


def policy4() -> Exact4Policy:
    return Exact4Policy()


def exact_policy(n: int) -> Policy:
    try:
        return {2: policy2, 3: policy3, 4: policy4}[n]()
    except KeyError:
        raise InputError(f"closed-form policies exist for n in (2, 3, 4), not {n}") from None


def thresholds_summary(n: int) -> dict:
    """Constants and piece definitions of the optimal rule for n in {2, 3, 4}."""
    if n == 2:
        return {"n": 2, "h1": 0.5, "h2": 1.0}
    if n == 3:
        return {
            "n": 3,
            "h1": A3,
            "h2": [
                {"id": "A1", "interval": [0.0, A3], "formula": "(1 - x)/2"},
                {"id": "A2", "interval": [A3, 2.0 / 3.0], "formula": "x"},
                {"id": "A3", "interval": [2.0 / 3.0, 1.0], "formula": "1 - x/2"},
            ],
            "h3": 1.0,
            "value": V3,
        }
    if n == 4:
        edges = (0.0,) + tuple(BETAS) + (1.0,)
        return {
            "n": 4,
            "h1": H1,
            "betas": list(BETAS),
            "h2": [
                {"id": p.id, "interval": [edges[i], edges[i + 1]], "formula": p.formula}
                for i, p in enumerate(H2_PIECES)
            ],
            "h3": {
                "A1": "min(x1, x2)",
                "A2": "max(x1, x2)",
                "B1": "(3 - x1 - x2)/2",
                "B2": "(2 - x1 - x2)/2",
                "B3": "(1 - x1 - x2)/2",
            },
            "h4": 1.0,
        }
    raise InputError(f"closed-form thresholds exist for n in (2, 3, 4), not {n}")
