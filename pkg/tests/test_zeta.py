import math

import mpmath
import pytest
from hypothesis import given, strategies as st

from weightedtrace.zeta import (EULER_GAMMA, bernoulli_even, digamma, hurwitz_zeta, hurwitz_zeta_deriv,
                                riemann_zeta)

mpmath.mp.dps = 30


def test_bernoulli_numbers_match_mpmath():
    values = bernoulli_even(12)
    for k, b in enumerate(values):
        assert b == pytest.approx(float(mpmath.bernoulli(2 * k + 2)), rel=1e-15)


@pytest.mark.parametrize("s", [-3.0, -2.0, -1.0, -0.5, 0.0, 0.5, 2.0, math.pi, 7.25])
@pytest.mark.parametrize("a", [33.0, 49.0, 257.0])
def test_hurwitz_against_mpmath_at_trace_split_offsets(s, a):
    ref = float(mpmath.zeta(s, a))
    assert hurwitz_zeta(s, a) == pytest.approx(ref, rel=1e-13, abs=1e-13 * max(1.0, abs(ref)))


@pytest.mark.parametrize("s", [-2.0, -1.0, 0.0, 0.5, 2.0, 3.5])
@pytest.mark.parametrize("a", [33.0, 49.0])
def test_hurwitz_derivative_against_mpmath(s, a):
    ref = float(mpmath.zeta(s, a, 1))
    assert hurwitz_zeta_deriv(s, a) == pytest.approx(ref, rel=1e-12, abs=1e-12 * max(1.0, abs(ref)))


@pytest.mark.parametrize("a", [1.0, 2.5, 33.0, 200.0])
def test_digamma_against_mpmath(a):
    assert digamma(a) == pytest.approx(float(mpmath.digamma(a)), rel=1e-14, abs=1e-14)


def test_riemann_special_values():
    assert riemann_zeta(0.0) == pytest.approx(-0.5, abs=1e-15)
    assert riemann_zeta(-1.0) == pytest.approx(-1.0 / 12, abs=1e-15)
    assert riemann_zeta(2.0) == pytest.approx(math.pi ** 2 / 6, rel=1e-15)
    assert digamma(1.0) == pytest.approx(-EULER_GAMMA, rel=1e-15)


@given(st.floats(min_value=-4.0, max_value=6.0).filter(lambda s: abs(s - 1) > 1e-3),
       st.floats(min_value=20.0, max_value=500.0))
def test_hurwitz_recurrence(s, a):
    # zeta(s, a) - zeta(s, a + 1) = a^-s
    lhs = hurwitz_zeta(s, a) - hurwitz_zeta(s, a + 1)
    assert lhs == pytest.approx(a ** -s, rel=1e-9, abs=1e-9 * max(1.0, abs(hurwitz_zeta(s, a))))
