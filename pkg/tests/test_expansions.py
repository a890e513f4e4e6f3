import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from weightedtrace.expansions import RayExpansion, binom_general, series_exp, series_log1p

XS = np.array([200.0, 400.0, 800.0])


def test_power_evaluates():
    e = RayExpansion.power(-1.5, [2.0, 3.0])
    np.testing.assert_allclose(e.evaluate(XS)[:, 0, 0], 2 * XS ** -1.5 + 3 * XS ** -2.5)
    assert e.order == -1.5
    assert e.coefficient(-2.5)[0, 0] == 3.0
    assert e.coefficient(-3.5)[0, 0] == 0.0


def test_log_power_term():
    e = RayExpansion.power(0.0, 2.0, log_power=1)
    np.testing.assert_allclose(e.evaluate(XS)[:, 0, 0], 2 * np.log(XS))
    assert e.max_log_power == 1


def test_zero_and_arithmetic():
    a = RayExpansion.power(1.0, 1.0)
    assert (a - a).is_zero
    assert RayExpansion.zero(1).order == -math.inf
    np.testing.assert_allclose((a + a).evaluate(XS), 2 * a.evaluate(XS))


def test_binom_general_matches_math_comb():
    for n in range(8):
        for i in range(n + 1):
            assert binom_general(n, i) == pytest.approx(math.comb(n, i))
    assert binom_general(-1.0, 3) == pytest.approx(-1.0)


def test_series_exp_log_inverse():
    a = np.array([0.0, 0.3, -0.2, 0.1, 0.0, 0.05])
    back = series_log1p(series_exp(a) - np.eye(1, a.size)[0])
    np.testing.assert_allclose(back, a, atol=1e-14)


@given(st.floats(-3.0, 2.0), st.integers(-4, 4))
def test_shift_matches_direct(beta, s):
    e = RayExpansion.power(beta, 1.0)
    shifted = e.shift(s, 30)
    np.testing.assert_allclose(shifted.evaluate(XS)[:, 0, 0], (XS + s) ** beta, rtol=1e-12)


@given(st.integers(-3, 3))
def test_shift_with_log(s):
    e = RayExpansion.power(-1.0, 1.0, log_power=1)
    shifted = e.shift(s, 30)
    np.testing.assert_allclose(shifted.evaluate(XS)[:, 0, 0], np.log(XS + s) / (XS + s), rtol=1e-12)


def test_polynomial_shift_is_exact():
    e = RayExpansion.power(2.0, [1.0, 0.0, 0.0])
    shifted = e.shift(3, 5)
    assert shifted.rem == -math.inf
    np.testing.assert_allclose(shifted.evaluate([1.0, 2.0])[:, 0, 0], [16.0, 25.0])


@given(st.floats(-2.0, 1.0), st.floats(-2.0, 1.0))
def test_mul_matches_product(a, b):
    ea = RayExpansion.power(a, [1.0, 0.5]).shift(1, 20)
    eb = RayExpansion.power(b, [2.0, -1.0]).shift(-2, 20)
    prod = ea.mul(eb, 20)
    np.testing.assert_allclose(prod.evaluate(XS), ea.evaluate(XS) * eb.evaluate(XS), rtol=1e-12)


def test_matrix_coefficients_and_trace():
    m = np.array([[1.0, 2.0], [3.0, 4.0]])
    e = RayExpansion.power(-1.0, 1.0).kron(m)
    assert e.d == 2
    np.testing.assert_allclose(e.fibre_trace().evaluate(XS)[:, 0, 0], 5 / XS)
    np.testing.assert_allclose(e.conj_transpose().coefficient(-1.0), m.T)
    np.testing.assert_allclose(e.scale(m).coefficient(-1.0), m @ m)
