"""Numpy twin of the compiled kernels; used when the extension is missing."""

import numpy as np

from .core import GOLDEN, INV_2_53, MIX1, MIX2

_GOLDEN = np.uint64(GOLDEN)
_MIX1 = np.uint64(MIX1)
_MIX2 = np.uint64(MIX2)


def _mix64(z):
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def uniform_block(seed, stream0, m, n):
    streams = np.uint64(stream0) + np.arange(1, m + 1, dtype=np.uint64)
    key = _mix64(_mix64(np.array([seed], dtype=np.uint64)) + streams * _GOLDEN)
    offsets = np.arange(1, n + 1, dtype=np.uint64) * _GOLDEN
    bits = _mix64(key[:, None] + offsets[None, :])
    return (bits >> np.uint64(11)).astype(np.float64) * INV_2_53


def play_batch(policy, x):
    """Ranks selected by ``policy`` on each row of ``x`` (shape (m, n))."""
    m, n = x.shape
    chosen = np.full(m, n - 1)
    alive = np.ones(m, dtype=bool)
    for k in range(1, n):
        rows = np.flatnonzero(alive)
        if len(rows) == 0:
            break
        thr = policy.threshold_array(k, x[rows, : k - 1])
        stop = x[rows, k - 1] <= thr
        chosen[rows[stop]] = k - 1
        alive[rows[stop]] = False
    picked = x[np.arange(m), chosen]
    return (x <= picked[:, None]).sum(axis=1).astype(np.int32)
