import math

import pytest

from robbins import exact, oracle
from robbins.core import ConvergenceError, InputError
from robbins.numerics import QuadConfig, adaptive_simpson, find_root


def test_stop_value_step1_n4():
    h = exact.H1
    assert oracle.stop_value(4, 1, (), h) == pytest.approx(1 + 3 * h)


def test_stop_value_above_past_value():
    assert oracle.stop_value(4, 2, (0.2,), 0.6) == pytest.approx(1 + 2 * 0.6 + 1)


def test_stop_value_last_step():
    assert oracle.stop_value(3, 3, (0.2, 0.8), 0.5) == 2


def test_stop_value_shape_mismatch():
    with pytest.raises(InputError):
        oracle.stop_value(4, 2, (), 0.5)


def test_continuation_n2():
    # with X_1 rejected, X_2's rank depends on X_1: 1 + (1 - X_1) averaged
    assert oracle.continuation_value(2, 2, (0.5,)) == 1.5
    assert oracle.continuation_value(2, 1, ()) == pytest.approx(1.25, abs=1e-12)


def test_continuation_fresh_game_after_maximum():
    assert oracle.continuation_value(3, 2, (1.0,)) == pytest.approx(1.25, abs=1e-12)


def test_continuation_after_zero_shifts_by_one():
    assert oracle.continuation_value(4, 2, (0.0,)) == pytest.approx(1 + exact.V3, abs=1e-8)


@pytest.mark.parametrize("x1", [0.1, 0.4, 0.8])
def test_continuation_equals_minimised_g3(x1):
    assert oracle.continuation_value(3, 2, (x1,)) == pytest.approx(exact.g3(x1, exact.argmin_g3(x1)), abs=1e-10)


def test_threshold_n4_step1():
    assert oracle.threshold_numeric(4, 1) == pytest.approx(0.27502, abs=1e-5)


def test_threshold_n3_step1():
    assert oracle.threshold_numeric(3, 1) == pytest.approx(0.348612, abs=1e-5)


def test_threshold_plateau():
    assert oracle.threshold_numeric(4, 2, (0.3,)) == pytest.approx(0.3, abs=1e-6)


def test_threshold_last_step():
    assert oracle.threshold_numeric(4, 4, (0.1, 0.2, 0.3)) == 1.0


def test_values():
    assert abs(oracle.value_v(1) - 1.0) < 1e-12
    assert abs(oracle.value_v(2) - 1.25) < 1e-8
    assert abs(oracle.value_v(3) - 1.39155) < 1e-5
    assert abs(oracle.value_v(3) - exact.V3) < 1e-6
    assert abs(oracle.value_v(4) - 1.49329) < 1e-5


def test_value_stable_under_halved_tolerance():
    a = oracle.value_v(4)
    b = oracle.value_v(4, QuadConfig().halved())
    assert abs(a - b) < 1e-6


def test_values_increase():
    vs = [oracle.value_v(n) for n in range(1, 5)]
    assert all(a < b for a, b in zip(vs, vs[1:]))


@pytest.mark.parametrize("n", [0, 6])
def test_value_rejects_horizon(n):
    with pytest.raises(InputError):
        oracle.value_v(n)


def test_bad_step():
    with pytest.raises(InputError):
        oracle.threshold_numeric(3, 4, (0.1, 0.2, 0.3))


def test_simpson_polynomial():
    assert adaptive_simpson(lambda x: x ** 3, 0.0, 2.0) == pytest.approx(4.0, abs=1e-14)


def test_simpson_kink():
    f = lambda x: abs(x - 1 / 3)
    exact_value = (1 / 3) ** 2 / 2 + (2 / 3) ** 2 / 2
    assert adaptive_simpson(f, 0.0, 1.0, (1 / 3,)) == pytest.approx(exact_value, abs=1e-13)


def test_simpson_jump_at_breakpoint():
    f = lambda x: 1.0 if x <= 0.3 else 2.0
    assert adaptive_simpson(f, 0.0, 1.0, (0.3,)) == pytest.approx(1.7, abs=1e-13)


def test_simpson_reversed_limits():
    assert adaptive_simpson(math.sin, math.pi, 0.0) == pytest.approx(-2.0, abs=1e-10)


def test_simpson_reports_nonconvergence():
    cfg = QuadConfig(rel_tol=1e-14, abs_tol=1e-14, max_depth=2)
    with pytest.raises(ConvergenceError) as info:
        adaptive_simpson(lambda x: math.sqrt(x), 0.0, 1.0, (), cfg)
    assert info.value.achieved > 1e-14
    assert info.value.best == pytest.approx(2 / 3, abs=1e-3)


def test_find_root():
    assert find_root(lambda x: x * x - 2, 0.0, 2.0) == pytest.approx(math.sqrt(2), abs=1e-13)


def test_find_root_needs_bracket():
    with pytest.raises(ConvergenceError):
        find_root(lambda x: x * x + 1, -1.0, 1.0)


def test_quad_config_validation():
    with pytest.raises(ValueError):
        QuadConfig(rel_tol=0)
