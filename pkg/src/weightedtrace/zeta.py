"""Hurwitz zeta, its s-derivative and the digamma function.

All three are evaluated with the Euler-Maclaurin formula after shifting the
argument ``a`` upward so the asymptotic correction series converges quickly.
Only real or complex ``s`` and real ``a > 0`` are supported, which is all the
trace engine needs: it continues sums of the form ``sum_{n >= a} n^{-s}``
and ``sum_{n >= a} n^{-s} log n`` to arbitrary real exponents.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

EULER_GAMMA = 0.57721566490153286061

_MAX_CORRECTIONS = 40
_REL_EPS = 1e-18


@lru_cache(maxsize=None)
def bernoulli_even(count: int) -> tuple[float, ...]:
    """Return ``(B_2, B_4, ..., B_{2 count})`` as floats.

    Uses the Akiyama-Tanigawa recurrence in exact rational arithmetic.
    """
    size = 2 * count + 1
    a = [Fraction(0)] * (size + 1)
    numbers = []
    for m in range(size + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        numbers.append(a[0])
    return tuple(float(numbers[2 * j]) for j in range(1, count + 1))


def _is_nonpositive_integer(s) -> bool:
    return isinstance(s, (int, float)) and float(s).is_integer() and s <= 0


def _shift_count(s, a: float, derivative: bool = False) -> int:
    # At non-positive integers the correction series terminates, so no shift is
    # needed for zeta itself; the derivative series never terminates.
    if not derivative and _is_nonpositive_integer(s):
        return 0
    target = 12.0 + 0.5 * abs(s)
    return max(0, int(math.ceil(target - a)))


def _poch_and_derivative(s, m: int):
    """Rising factorial ``s (s+1) ... (s+m-1)`` and its derivative in ``s``."""
    value = 1.0
    deriv = 0.0
    for i in range(m):
        deriv = deriv * (s + i) + value
        value = value * (s + i)
    return value, deriv


def hurwitz_zeta(s, a: float) -> complex | float:
    """Hurwitz zeta ``sum_{k >= 0} (a + k)^{-s}`` continued to ``s != 1``."""
    if a <= 0:
        raise ValueError("hurwitz_zeta requires a > 0")
    if s == 1:
        raise ValueError("hurwitz_zeta has a pole at s = 1")
    shift = _shift_count(s, a)
    head = math.fsum((a + k) ** (-s) for k in range(shift)) if not isinstance(s, complex) \
        else sum((a + k) ** (-s) for k in range(shift))
    x = a + shift
    total = x ** (1 - s) / (s - 1) + 0.5 * x ** (-s)
    bern = bernoulli_even(_MAX_CORRECTIONS)
    factorial = 1.0
    for j in range(1, _MAX_CORRECTIONS + 1):
        factorial *= (2 * j - 1) * (2 * j)
        poch, _ = _poch_and_derivative(s, 2 * j - 1)
        term = bern[j - 1] / factorial * poch * x ** (-s - 2 * j + 1)
        total += term
        if poch == 0 or abs(term) <= _REL_EPS * abs(total):
            break
    return head + total


def hurwitz_zeta_deriv(s, a: float) -> complex | float:
    """Derivative in ``s`` of the Hurwitz zeta function.

    Equals ``-sum_{k >= 0} log(a + k) (a + k)^{-s}`` after continuation.
    """
    if a <= 0:
        raise ValueError("hurwitz_zeta_deriv requires a > 0")
    if s == 1:
        raise ValueError("hurwitz_zeta_deriv has a pole at s = 1")
    shift = _shift_count(s, a, derivative=True)
    head = -sum(math.log(a + k) * (a + k) ** (-s) for k in range(shift))
    x = a + shift
    lx = math.log(x)
    total = -lx * x ** (1 - s) / (s - 1) - x ** (1 - s) / (s - 1) ** 2
    total += -0.5 * lx * x ** (-s)
    bern = bernoulli_even(_MAX_CORRECTIONS)
    factorial = 1.0
    for j in range(1, _MAX_CORRECTIONS + 1):
        factorial *= (2 * j - 1) * (2 * j)
        poch, dpoch = _poch_and_derivative(s, 2 * j - 1)
        power = x ** (-s - 2 * j + 1)
        term = bern[j - 1] / factorial * (dpoch - lx * poch) * power
        total += term
        if abs(term) <= _REL_EPS * abs(total):
            break
    return head + total


def digamma(a: float) -> float:
    """Digamma function for real ``a > 0``."""
    if a <= 0:
        raise ValueError("digamma requires a > 0")
    shift = max(0, int(math.ceil(16.0 - a)))
    head = -math.fsum(1.0 / (a + k) for k in range(shift))
    x = a + shift
    total = math.log(x) - 0.5 / x
    bern = bernoulli_even(12)
    for j in range(1, 13):
        total -= bern[j - 1] / (2 * j * x ** (2 * j))
    return head + total


def riemann_zeta(s) -> complex | float:
    """Riemann zeta function, ``hurwitz_zeta(s, 1)``."""
    return hurwitz_zeta(s, 1.0)
