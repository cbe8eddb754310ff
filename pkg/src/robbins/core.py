"""Shared types: policies, the play loop and the counter-based random stream.

Random numbers
--------------
Every uniform is a pure function of ``(seed, stream, index)``::

    key    = mix64(mix64(seed) + (stream + 1) * GOLDEN)
    bits   = mix64(key + (index + 1) * GOLDEN)
    sample = (bits >> 11) * 2**-53

with ``GOLDEN = 0x9E3779B97F4A7C15`` and ``mix64`` the SplitMix64 finalizer
(all arithmetic modulo 2**64).  Trial ``t`` of a simulation reads stream ``t``,
so results never depend on how trials are split between workers.  The compiled
kernel and the numpy fallback implement the same function bit for bit.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
INV_2_53 = 1.0 / (1 << 53)


class InputError(ValueError):
    """Invalid arguments (wrong shape, out-of-range value, unsupported horizon)."""


class ConvergenceError(RuntimeError):
    """A numerical routine did not reach its tolerance.

    ``best`` carries whatever the routine had when it gave up.
    """

    def __init__(self, message, best=None, achieved=None):
        super().__init__(message)
        self.best = best
        self.achieved = achieved


class Decision(enum.Enum):
    STOP = "stop"
    CONTINUE = "continue"


def check_unit(name: str, x: float) -> float:
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise InputError(f"{name}={x!r} is outside [0, 1]")
    return x


# --------------------------------------------------------------------------
# random stream


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


def stream_key(seed: int, stream: int) -> int:
    return mix64(mix64(seed) + (stream + 1) * GOLDEN)


@dataclass(frozen=True)
class RandomStream:
    """One reproducible sequence of uniforms, addressed by ``(seed, stream)``."""

    seed: int
    stream: int = 0

    def __post_init__(self):
        for name in ("seed", "stream"):
            v = getattr(self, name)
            if not 0 <= v <= MASK64:
                raise InputError(f"{name} must fit in an unsigned 64-bit integer, got {v}")

    def uniform(self, index: int) -> float:
        key = stream_key(self.seed, self.stream)
        return (mix64(key + (index + 1) * GOLDEN) >> 11) * INV_2_53

    def uniforms(self, n: int) -> list[float]:
        key = stream_key(self.seed, self.stream)
        return [(mix64(key + (i + 1) * GOLDEN) >> 11) * INV_2_53 for i in range(n)]


def uniform_sequence(stream: RandomStream, n: int) -> list[float]:
    if n < 1:
        raise InputError("n must be at least 1")
    return stream.uniforms(n)


# --------------------------------------------------------------------------
# policies


class Policy:
    """Threshold stopping rule over a fixed horizon.

    Subclasses provide :meth:`threshold`.  ``decide`` stops iff the current
    value is at most the threshold, and the last step always stops.
    """

    horizon: int
    name: str = "policy"

    def threshold(self, k: int, history: Sequence[float]) -> float:
        raise NotImplementedError

    def decide(self, k: int, history: Sequence[float], x: float) -> Decision:
        if k >= self.horizon or x <= self.threshold(k, history):
            return Decision.STOP
        return Decision.CONTINUE

    def threshold_array(self, k: int, history: np.ndarray) -> np.ndarray:
        """Thresholds for a batch of histories, ``history`` shaped (m, k - 1)."""
        return np.array([self.threshold(k, tuple(row)) for row in history], dtype=float)

    @property
    def kernel(self) -> Optional[tuple[str, np.ndarray]]:
        """``(kind, params)`` if the compiled simulator knows this policy."""
        return None

    def describe(self) -> dict:
        return {"id": self.name, "horizon": self.horizon}

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


def rank_of(sequence: Sequence[float], index: int) -> int:
    """Overall rank of ``sequence[index]`` (0-based index), counting ties as smaller."""
    x = sequence[index]
    return 1 + sum(1 for i, y in enumerate(sequence) if i != index and y <= x)


def play(policy: Policy, sequence: Sequence[float]) -> tuple[int, int]:
    """Run ``policy`` over ``sequence``; return the 1-based selected step and its rank."""
    n = policy.horizon
    if len(sequence) != n:
        raise InputError(f"sequence has {len(sequence)} values, policy horizon is {n}")
    seq = [check_unit("observation", x) for x in sequence]
    for k in range(1, n + 1):
        if policy.decide(k, seq[: k - 1], seq[k - 1]) is Decision.STOP:
            return k, rank_of(seq, k - 1)
    raise AssertionError("policy did not stop at the last step")  # pragma: no cover
