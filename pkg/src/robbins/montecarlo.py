"""Seeded Monte Carlo evaluation of stopping policies.

Trial ``t`` always reads random stream ``t`` and ranks are accumulated as
exact integer sums, so results are bit-identical for any chunking or number
of workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np

from . import _backend
from .core import InputError, Policy

CHUNK = 1 << 18


@dataclass(frozen=True)
class SimResult:
    mean: float
    stderr: float
    trials: int
    seed: int
    policy_id: str
    # paired against the first policy of a compare() call
    paired_diff: Optional[float] = None
    paired_stderr: Optional[float] = None

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}


def _moments(total: int, total_sq: int, trials: int) -> tuple[float, float]:
    mean = total / trials
    if trials < 2:
        return mean, 0.0
    var = (trials * total_sq - total * total) / (trials * (trials - 1))
    return mean, math.sqrt(max(var, 0.0) / trials)


def ranks(policy: Policy, seed: int, start: int, count: int, backend: Optional[str] = None) -> np.ndarray:
    """Ranks selected by ``policy`` on trials ``start .. start + count - 1``."""
    _, mod = _backend.resolve(backend)
    kernel = policy.kernel
    if kernel is not None and hasattr(mod, "simulate"):
        kind, params = kernel
        return mod.simulate(kind, np.ascontiguousarray(params, dtype=float), policy.horizon, seed, start, count)
    x = mod.uniform_block(seed, start, count, policy.horizon)
    return _backend.python.play_batch(policy, x)


def _check_seed(seed):
    if not 0 <= seed < 1 << 64:
        raise InputError(f"seed must be an unsigned 64-bit integer, got {seed}")


def _chunks(trials, chunk):
    return [(t, min(chunk, trials - t)) for t in range(0, trials, chunk)]


def _run(job, chunks, workers):
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(job, chunks))
    return [job(c) for c in chunks]


def evaluate(
    policy: Policy,
    trials: int,
    seed: int,
    workers: int = 1,
    chunk: int = CHUNK,
    backend: Optional[str] = None,
) -> SimResult:
    if trials < 1:
        raise InputError("trials must be at least 1")
    _check_seed(seed)

    def job(c):
        r = ranks(policy, seed, c[0], c[1], backend).astype(np.int64)
        return int(r.sum()), int((r * r).sum())

    parts = _run(job, _chunks(trials, chunk), workers)
    total = sum(p[0] for p in parts)
    total_sq = sum(p[1] for p in parts)
    mean, se = _moments(total, total_sq, trials)
    return SimResult(mean, se, trials, seed, policy.name)


def compare(
    policies: Sequence[Policy],
    trials: int,
    seed: int,
    workers: int = 1,
    chunk: int = CHUNK,
    backend: Optional[str] = None,
) -> list[SimResult]:
    """Evaluate several policies on common random numbers.

    Every policy sees the same sequence in each trial.  Results after the
    first carry the paired mean difference to the first and its standard error.
    """
    if not policies:
        raise InputError("no policies given")
    if trials < 1:
        raise InputError("trials must be at least 1")
    _check_seed(seed)
    horizons = {p.horizon for p in policies}
    if len(horizons) != 1:
        raise InputError(f"policies have mixed horizons {sorted(horizons)}")

    def job(c):
        rs = [ranks(p, seed, c[0], c[1], backend).astype(np.int64) for p in policies]
        out = []
        for r in rs:
            d = r - rs[0]
            out.append((int(r.sum()), int((r * r).sum()), int(d.sum()), int((d * d).sum())))
        return out

    parts = _run(job, _chunks(trials, chunk), workers)
    results = []
    for i, p in enumerate(policies):
        s1 = sum(part[i][0] for part in parts)
        s2 = sum(part[i][1] for part in parts)
        mean, se = _moments(s1, s2, trials)
        if i == 0:
            results.append(SimResult(mean, se, trials, seed, p.name))
            continue
        d1 = sum(part[i][2] for part in parts)
        d2 = sum(part[i][3] for part in parts)
        dmean, dse = _moments(d1, d2, trials)
        results.append(SimResult(mean, se, trials, seed, p.name, dmean, dse))
    return results


# --------------------------------------------------------------------------
# policy registry

REGISTRY_HELP = "exact2, exact3, exact4, memoryless:N, asc:N[:C], stop-first:N"


def resolve_policy(policy_id: str) -> Policy:
    """Build a policy from ids like ``exact4``, ``memoryless:5``, ``asc:100:3.2``."""
    from . import exact, memoryless

    head, _, rest = policy_id.partition(":")
    args = rest.split(":") if rest else []
    try:
        if head in ("exact2", "exact3", "exact4") and not args:
            return exact.exact_policy(int(head[-1]))
        if head == "memoryless" and len(args) == 1:
            n = int(args[0])
            tv, _ = memoryless.optimize(n)
            return tv.policy(policy_id)
        if head == "stop-first" and len(args) == 1:
            return memoryless.stop_first(int(args[0]))
        if head == "asc" and len(args) in (1, 2):
            n = int(args[0])
            if len(args) == 2:
                coeffs = memoryless.ASCCoefficients(c=float(args[1]))
            else:
                coeffs, _ = memoryless.tune_asc_offset(n)
            return memoryless.asc_thresholds(n, coeffs).policy(policy_id)
    except ValueError as exc:
        raise InputError(f"bad policy id {policy_id!r}: {exc}") from None
    raise InputError(f"unknown policy id {policy_id!r}; known: {REGISTRY_HELP}")
