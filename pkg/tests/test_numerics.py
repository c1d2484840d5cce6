import math

import mpmath as mp
import pytest
from hypothesis import given, strategies as st

from ultralola.errors import NoConvergence, NoSignChange
from ultralola.numerics import (
    RootBracket,
    bisect,
    ceil_tol,
    floor_tol,
    log_q_function,
    log_sigmoid,
    q_function,
    q_sigmoid_approx,
    safe_exp,
    sigmoid,
)

mp.mp.dps = 40


def mp_q(x):
    return mp.erfc(mp.mpf(x) / mp.sqrt(2)) / 2


@pytest.mark.parametrize("x, expected", [
    (0.0, 0.5),
    (-3.0, 0.99865010196836991),
    (4.264890794, 1e-5),
])
def test_q_function_spot_values(x, expected):
    assert q_function(x) == pytest.approx(expected, rel=1e-9)


@given(st.floats(-37, 37))
def test_q_function_matches_mpmath(x):
    ref = float(mp_q(x))
    assert q_function(x) == pytest.approx(ref, rel=1e-12, abs=1e-300)


@given(st.floats(-8, 8))
def test_q_symmetry(x):
    assert q_function(x) + q_function(-x) == pytest.approx(1.0, abs=1e-15)


@given(st.floats(-10, 10), st.floats(-10, 10))
def test_q_monotone(a, b):
    if a < b:
        assert q_function(a) >= q_function(b)


def test_log_q_far_tail():
    # Q(40) underflows nothing in log space
    assert log_q_function(40.0) == pytest.approx(-804.60844201375379, rel=1e-12)
    assert math.isfinite(log_q_function(1e3))


@given(st.floats(-30, 30))
def test_log_q_matches_mpmath(x):
    assert log_q_function(x) == pytest.approx(float(mp.log(mp_q(x))), rel=1e-10, abs=1e-14)


@given(st.floats(-700, 700))
def test_sigmoid_range_and_log(x):
    s = sigmoid(x)
    assert 0.0 <= s <= 1.0
    ref = float(-mp.log1p(mp.exp(-mp.mpf(x))))
    assert log_sigmoid(x) == pytest.approx(ref, rel=1e-12, abs=1e-300)


def test_sigmoid_saturates_without_overflow():
    assert sigmoid(1e4) == 1.0
    assert sigmoid(-1e4) == 0.0


def test_q_sigmoid_approx_is_close():
    for x in (-3, -1, 0, 0.5, 2):
        assert abs(q_sigmoid_approx(x) - q_function(x)) < 0.01
    assert q_sigmoid_approx(0.0) == 0.5


def test_safe_exp():
    assert safe_exp(1.0) == math.e
    assert safe_exp(1000.0) == math.inf


@pytest.mark.parametrize("x, f, c", [(3.0, 3, 3), (3.0000000000001, 3, 3), (2.9999999999999, 3, 3), (2.5, 2, 3)])
def test_tolerant_rounding(x, f, c):
    assert floor_tol(x) == f
    assert ceil_tol(x) == c


def test_bisect_finds_sqrt2():
    root = bisect(lambda x: x * x - 2, RootBracket(0.0, 2.0, tol=1e-12))
    assert root == pytest.approx(math.sqrt(2), abs=1e-12)


def test_bisect_exact_zero_at_endpoint():
    assert bisect(lambda x: x - 1.0, RootBracket(1.0, 3.0)) == 1.0


def test_bisect_no_sign_change():
    with pytest.raises(NoSignChange):
        bisect(lambda x: x * x + 1, RootBracket(-1.0, 1.0))


def test_bisect_nan_endpoint():
    with pytest.raises(NoSignChange):
        bisect(lambda x: math.nan, RootBracket(0.0, 1.0))


def test_bisect_no_convergence():
    with pytest.raises(NoConvergence):
        bisect(lambda x: x - 0.3, RootBracket(0.0, 1.0, tol=1e-15, max_iter=5))


@pytest.mark.parametrize("kw", [dict(lo=1.0, hi=0.0), dict(lo=0.0, hi=1.0, tol=0.0), dict(lo=0.0, hi=1.0, max_iter=0)])
def test_bracket_validation(kw):
    with pytest.raises(ValueError):
        RootBracket(**kw)


@given(st.floats(-50, 50))
def test_bisect_linear_roots(r):
    root = bisect(lambda x: x - r, RootBracket(-100.0, 100.0, tol=1e-9))
    assert abs(root - r) <= 1e-9
