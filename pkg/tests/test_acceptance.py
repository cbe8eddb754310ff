"""Acceptance suite: one line per criterion is printed in the pytest summary."""

import subprocess
import sys
import time

import numpy as np
import pytest

from robbins import cli, exact, memoryless, montecarlo, noinfo, oracle, verify
from robbins.verify import enumerate_w

MC_TRIALS = 10_000_000
SEED = 20150801


def test_01_memoryless_table(criterion):
    targets = {1: 1.0, 2: 1.25, 3: 1.4009, 4: 1.5065, 5: 1.5861, 20: 1.9890, 50: 2.1482}
    got, times = {}, {}
    for n in targets:
        t = time.perf_counter()
        got[n] = memoryless.optimize(n)[1]
        times[n] = time.perf_counter() - t
    err = max(abs(got[n] - v) for n, v in targets.items())
    ok = err < 5e-4 and max(times[n] for n in range(1, 6)) < 10 and times[50] < 120
    criterion("1 memoryless V(n) table", ok,
              f"max |V - target| = {err:.2e} (tol 5e-4); n=50 in {times[50]:.1f}s")
    assert ok


def test_02_v2(criterion):
    closed = exact.g2(0.5)
    hs = np.linspace(0, 1, 100_001)
    grid_min = min(exact.g2(h) for h in hs[::100])
    numeric = oracle.value_v(2)
    ok = closed == 1.25 and grid_min >= 1.25 and abs(numeric - 1.25) < 1e-8
    criterion("2 v(2) = 5/4", ok, f"g2(1/2) = {closed!r}, oracle error {abs(numeric - 1.25):.1e} (tol 1e-8)")
    assert ok


def test_03_v3(criterion):
    numeric = oracle.value_v(3)
    r = montecarlo.evaluate(exact.policy3(), MC_TRIALS, SEED)
    z = abs(r.mean - exact.V3) / r.stderr
    ok = abs(numeric - exact.V3) < 1e-6 and z < 4
    criterion("3 v(3)", ok,
              f"closed {exact.V3:.9f}, oracle error {abs(numeric - exact.V3):.1e} (tol 1e-6), "
              f"MC {r.mean:.6f} at {z:.2f} SE (tol 4)")
    assert ok


def test_04_v4(criterion):
    t = time.perf_counter()
    numeric = oracle.value_v(4)
    elapsed = time.perf_counter() - t
    r = montecarlo.evaluate(exact.policy4(), MC_TRIALS, SEED)
    z = abs(r.mean - 1.49329) / r.stderr
    ok = abs(numeric - 1.49329) < 1e-5 and z < 4 and elapsed < 60
    criterion("4 v(4)", ok,
              f"oracle {numeric:.8f} (|err| {abs(numeric - 1.49329):.1e}, tol 1e-5, {elapsed:.1f}s), "
              f"MC {r.mean:.6f} at {z:.2f} SE (tol 4)")
    assert ok


def test_05_h1(criterion):
    numeric = oracle.threshold_numeric(4, 1)
    ok = abs(exact.H1 - 0.27502) < 1e-5 and abs(exact.H1 - numeric) < 1e-9
    criterion("5 h1 for n = 4", ok,
              f"closed {exact.H1:.12f}, numeric {numeric:.12f}, gap {abs(exact.H1 - numeric):.1e} (tol 1e-9)")
    assert ok


def test_06_h2(criterion):
    xs = np.linspace(0.0, 1.0, 200)
    err = max(abs(exact.h2(x) - oracle.threshold_numeric(4, 2, (x,))) for x in xs)
    curve = exact.h2_curve()
    jump = max(curve.jumps())
    slope_gap = max(abs(l - r) for l, r in (curve.slopes(i) for i in (0, 3, 4)))
    ok = err < 1e-6 and jump < 1e-12 and slope_gap < 1e-5
    criterion("6 h2 curve", ok,
              f"oracle error {err:.1e} (tol 1e-6), max jump {jump:.1e} (tol 1e-12), "
              f"slope gap {slope_gap:.1e} (tol 1e-5)")
    assert ok


def test_07_h3(criterion):
    pts = np.random.default_rng(SEED).random((1000, 2))
    hs = np.linspace(0.0, 1.0, 100_001)
    worst = 0.0
    for x1, x2 in pts:
        vals = 1.5 + hs * hs - hs + (2 - x1 - x2) * (1 - hs) + np.maximum(hs - x1, 0) + np.maximum(hs - x2, 0)
        worst = max(worst, abs(exact.h3(x1, x2) - hs[np.argmin(vals)]))
    grid = 512
    x1, x2, labels = verify.region_raster(grid)
    bad = verify.raster_inconsistencies(x1, x2, labels, grid)
    ok = worst <= hs[1] + 1e-12 and bad == 0
    criterion("7 h3 and regions", ok,
              f"max |h3 - grid argmin| {worst:.1e} (grid step {hs[1]:.0e}); "
              f"{bad} inconsistent faces at grid {grid}")
    assert ok


def test_08_strict_gap(criterion):
    gaps = {n: memoryless.optimize(n)[1] - oracle.value_v(n) for n in (3, 4)}
    tv, _ = memoryless.optimize(4)
    _, mem = montecarlo.compare([exact.policy4(), tv.policy("memoryless:4")], MC_TRIALS, SEED)
    target = 1.5065 - 1.49329
    z = abs(mem.paired_diff - target) / mem.paired_stderr
    ok = min(gaps.values()) > 1e-3 and mem.paired_diff > 0 and z < 4
    criterion("8 v(n) < V(n)", ok,
              f"gaps n=3 {gaps[3]:.5f}, n=4 {gaps[4]:.5f} (need > 1e-3); paired MC gap "
              f"{mem.paired_diff:.5f} +- {mem.paired_stderr:.1e}, {z:.2f} paired SE from {target:.5f}")
    assert ok


def test_09_noinfo(criterion):
    exact_ok = all(noinfo.w_value_exact(n) == enumerate_w(n) for n in range(1, 7))
    values = [w for _, w in noinfo.w_table(10_000)]
    monotone = all(a <= b for a, b in zip(values, values[1:]))
    last = noinfo.w_value(10_000)
    ok = exact_ok and monotone and last < 3.8695 + 1e-3
    criterion("9 no-information W(n)", ok,
              f"enumeration exact for n <= 6: {exact_ok}; monotone: {monotone}; W(10^4) = {last:.6f}")
    assert ok


def test_10_asc(criterion):
    coeffs, value = memoryless.tune_asc_offset(1000)
    ok = 2.29 <= value <= 2.34
    criterion("10 ASC family n = 1000", ok, f"expected rank {value:.5f} at c = {coeffs.c:.4f} (band [2.29, 2.34])")
    assert ok


def test_11_determinism(criterion):
    argv = ["simulate", "exact4", "--trials", "2000000", "--seed", "42"]
    outputs = {cli.run(argv + ["--workers", str(w)])[1] for w in (1, 2, 4)}
    outputs.add(cli.run(argv)[1])
    proc = subprocess.run([sys.executable, "-m", "robbins.cli", *argv, "--workers", "3"],
                          capture_output=True, text=True, check=True)
    outputs.add(proc.stdout)
    ok = len(outputs) == 1
    criterion("11 simulate determinism", ok, f"{len(outputs)} distinct output(s) over 5 runs, workers 1-4")
    assert ok
