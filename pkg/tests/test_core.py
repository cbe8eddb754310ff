import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from robbins import _backend
from robbins.core import Decision, InputError, RandomStream, play, rank_of, uniform_sequence
from robbins.exact import policy3
from robbins.memoryless import ThresholdVector, stop_first

unit = st.floats(0.0, 1.0, allow_nan=False)


def test_play_stop_first():
    assert play(stop_first(3), [0.7, 0.1, 0.9]) == (1, 2)


def test_play_minimum_has_rank_one():
    assert play(stop_first(3), [0.0, 0.1, 0.9]) == (1, 1)


def test_play_exact3_example():
    # 0.5 > h1 ~ 0.3486, continue; h2(0.5) = 0.5 < 0.6, continue; forced stop on 0.2
    assert play(policy3(), [0.5, 0.6, 0.2]) == (3, 1)


def test_play_length_mismatch():
    with pytest.raises(InputError):
        play(stop_first(3), [0.1, 0.2])


def test_play_rejects_out_of_range():
    with pytest.raises(InputError):
        play(stop_first(2), [0.1, 1.2])


@given(st.lists(unit, min_size=1, max_size=8), st.data())
def test_play_always_selects(seq, data):
    n = len(seq)
    a = sorted(data.draw(st.lists(unit, min_size=n - 1, max_size=n - 1))) + [1.0]
    k, r = play(ThresholdVector(a).policy(), seq)
    assert 1 <= k <= n
    assert 1 <= r <= n
    assert r == 1 + sum(1 for i, y in enumerate(seq) if i != k - 1 and y <= seq[k - 1])


@given(st.lists(unit, min_size=2, max_size=6), st.data())
def test_rank_ignores_behaviour_after_selection(seq, data):
    # rewriting thresholds after the selected step cannot change the outcome
    n = len(seq)
    a = sorted(data.draw(st.lists(unit, min_size=n - 1, max_size=n - 1))) + [1.0]
    k, r = play(ThresholdVector(a).policy(), seq)
    b = a[:k] + [1.0] * (n - k)
    assert play(ThresholdVector(b).policy(), seq) == (k, r)


@given(unit, unit)
def test_decide_is_monotone(x, y):
    pol = policy3()
    lo, hi = min(x, y), max(x, y)
    if pol.decide(2, (0.5,), hi) is Decision.STOP:
        assert pol.decide(2, (0.5,), lo) is Decision.STOP


def test_last_step_always_stops():
    assert policy3().decide(3, (0.1, 0.2), 1.0) is Decision.STOP


def test_rank_of_counts_ties_below():
    assert rank_of([0.3, 0.3, 0.1], 0) == 3


def test_stream_determinism():
    s = RandomStream(12345, 0)
    assert uniform_sequence(s, 4) == uniform_sequence(RandomStream(12345, 0), 4)


def test_stream_separation():
    assert uniform_sequence(RandomStream(12345, 0), 4) != uniform_sequence(RandomStream(12345, 1), 4)


def test_stream_rejects_empty():
    with pytest.raises(InputError):
        uniform_sequence(RandomStream(1, 0), 0)


def test_stream_rejects_negative_seed():
    with pytest.raises(InputError):
        RandomStream(-1, 0)


def test_uniform_mean():
    x = _backend.python.uniform_block(99, 0, 250_000, 4)
    assert abs(x.mean() - 0.5) < 0.002
    assert x.min() >= 0.0 and x.max() < 1.0


def test_scalar_stream_matches_block():
    block = _backend.python.uniform_block(2**63 + 17, 40, 3, 5)
    for t in range(3):
        assert block[t].tolist() == RandomStream(2**63 + 17, 40 + t).uniforms(5)


@pytest.mark.skipif(_backend.compiled is None, reason="compiled kernels not built")
def test_compiled_stream_matches_numpy():
    a = _backend.compiled.uniform_block(7, 1000, 500, 6)
    b = _backend.python.uniform_block(7, 1000, 500, 6)
    assert np.array_equal(a, b)
