import math
import cmath

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jrl.specfun import (
    QLaurentSeries,
    Truncation,
    bernoulli,
    default_truncation,
    phase,
    stable_sum,
)

TR = Truncation(n_q=12, n_mode=48, tol=1e-12)


def test_phase_values():
    assert abs(phase(0.0) - 1.0) < 1e-15
    assert abs(phase(1.0) - 1.0) < 1e-15
    assert abs(phase(0.25) - 1j) < 1e-15
    assert abs(phase(0.5) + 1.0) < 1e-15
    # complex argument: phase(x) = e^{2 pi i x}
    x = 0.3 - 0.2j
    assert abs(phase(x) - cmath.exp(2j * math.pi * x)) < 1e-14


def test_phase_periodicity():
    for x in (0.1, 0.7, 2.3, -1.4):
        assert abs(phase(x + 1.0) - phase(x)) < 1e-12


def test_bernoulli_values():
    from fractions import Fraction

    assert bernoulli(0) == Fraction(1)
    assert bernoulli(1) == Fraction(-1, 2)
    assert bernoulli(2) == Fraction(1, 6)
    assert bernoulli(3) == Fraction(0)
    assert bernoulli(4) == Fraction(-1, 30)
    assert bernoulli(12) == Fraction(-691, 2730)


def test_stable_sum_cancellation():
    # naive summation loses ~7 digits here, compensated summation must not
    terms = [1e16, 1.0, -1e16, 3.0]
    assert abs(stable_sum(terms) - 4.0) < 1e-12


def test_series_monomial_and_eval():
    s = QLaurentSeries.monomial(-1, TR).add(QLaurentSeries.monomial(2, TR, 3.0))
    x = 0.3 + 0.1j
    assert abs(s.eval(x) - (1.0 / x + 3.0 * x**2)) < 1e-14
    assert abs(s.coefficient(-1) - 1.0) < 1e-15
    assert abs(s.coefficient(2) - 3.0) < 1e-15
    assert abs(s.coefficient(0)) < 1e-15


def test_series_mul_truncates():
    s = QLaurentSeries.monomial(TR.n_q, TR)
    prod = s.mul(s)
    # exponent 2*n_q exceeds the window, product must be empty
    assert prod.is_zero()


def test_series_invert_unit():
    one = QLaurentSeries.constant(1.0, TR)
    s = one.add(QLaurentSeries.monomial(1, TR, -0.7))
    inv = s.invert_unit()
    check = s.mul(inv)
    assert abs(check.coefficient(0) - 1.0) < 1e-13
    for k in range(1, TR.n_q):
        assert abs(check.coefficient(k)) < 1e-13


def test_series_em1_over_z():
    # (e^z - 1)/z = sum z^k/(k+1)!
    s = QLaurentSeries.em1_over_z(TR)
    for k in range(6):
        assert abs(s.coefficient(k) - 1.0 / math.factorial(k + 1)) < 1e-15


def test_series_exp():
    h = 0.37
    s = QLaurentSeries.exp_series(h, TR)
    for k in range(6):
        assert abs(s.coefficient(k) - h**k / math.factorial(k)) < 1e-13


def test_series_substitute():
    # f(x) = 1 + x, g(x) = 2x + x^2, f(g) = 1 + 2x + x^2
    f = QLaurentSeries.constant(1.0, TR).add(QLaurentSeries.monomial(1, TR))
    g = QLaurentSeries.monomial(1, TR, 2.0).add(QLaurentSeries.monomial(2, TR))
    fg = f.substitute(g)
    assert abs(fg.coefficient(0) - 1.0) < 1e-15
    assert abs(fg.coefficient(1) - 2.0) < 1e-15
    assert abs(fg.coefficient(2) - 1.0) < 1e-15


coeff = st.complex_numbers(
    min_magnitude=0.0, max_magnitude=4.0, allow_nan=False, allow_infinity=False
)


@given(st.lists(coeff, min_size=1, max_size=6), st.integers(-3, 3))
@settings(max_examples=60, deadline=None)
def test_series_eval_matches_horner(coeffs, kmin):
    s = QLaurentSeries(kmin, tuple(coeffs), TR)
    x = 0.4 + 0.2j
    direct = sum(c * x ** (kmin + i) for i, c in enumerate(coeffs))
    assert abs(s.eval(x) - direct) < 1e-11 * max(1.0, abs(direct))


@given(
    st.lists(coeff, min_size=1, max_size=5),
    st.lists(coeff, min_size=1, max_size=5),
)
@settings(max_examples=60, deadline=None)
def test_series_mul_commutes(a, b):
    sa = QLaurentSeries(0, tuple(a), TR)
    sb = QLaurentSeries(0, tuple(b), TR)
    ab = sa.mul(sb)
    ba = sb.mul(sa)
    for k in range(len(a) + len(b)):
        assert abs(ab.coefficient(k) - ba.coefficient(k)) < 1e-11


@given(st.lists(coeff, min_size=1, max_size=5))
@settings(max_examples=60, deadline=None)
def test_series_add_sub_roundtrip(a):
    sa = QLaurentSeries(-1, tuple(a), TR)
    zero = sa.sub(sa)
    assert zero.is_zero() or all(
        abs(zero.coefficient(k)) < 1e-12 for k in range(-1, len(a))
    )


def test_default_truncation_env(monkeypatch):
    monkeypatch.setenv("JRL_DEFAULT_NQ", "17")
    monkeypatch.setenv("JRL_DEFAULT_TOL", "1e-7")
    tr = default_truncation()
    assert tr.n_q == 17
    assert abs(tr.tol - 1e-7) < 1e-20
    monkeypatch.delenv("JRL_DEFAULT_NQ")
    monkeypatch.delenv("JRL_DEFAULT_TOL")
    tr2 = default_truncation()
    assert tr2.n_q == 12
    monkeypatch.setenv("JRL_DEFAULT_NQ", "not-a-number")
    with pytest.raises(ValueError):
        default_truncation()
