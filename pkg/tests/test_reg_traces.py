import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from weightedtrace.corpus import covariance_cases, random_banded, weight_triples
from weightedtrace.expansions import RayExpansion
from weightedtrace.mode_ops import (ModeError, abs_dirac_power, abs_dirac_weight, commutator, compose, dirac,
                                    identity, laplacian_plus_one_weight, laplacian_weight, quartic_weight,
                                    shift_operator, shifted_square_weight, weight_power)
from weightedtrace.reg_traces import (DiagonalTraceData, canonical_trace_TR, covariance_check, finite_part_sum,
                                      ordinary_trace, residue, scalar_identity_trace, weight_dependence,
                                      weighted_trace, weighted_trace_data, wres_from_modes)

GAMMA = float(mpmath.euler)
seeds = st.integers(0, 10 ** 6)


def test_identity_traces_vanish():
    for d in (1, 3):
        assert abs(scalar_identity_trace(laplacian_weight(), d)) < 1e-12
        assert abs(scalar_identity_trace(quartic_weight(), d)) < 1e-12


def test_identity_under_shifted_weight():
    # 1 + 2 sum_{n >= 1} (n + 1)^{-2z} at z = 0
    expected = 1 + 2 * float(mpmath.zeta(0, 2))
    assert weighted_trace(identity(1), shifted_square_weight()) == pytest.approx(expected, abs=1e-12)


def test_inverse_abs_dirac_laurent_data():
    a = abs_dirac_power(-1.0, 1)
    for weight, pole in ((laplacian_weight(), 1.0), (abs_dirac_weight(), 2.0)):
        value = weighted_trace_data(a, weight)
        assert value.finite_part == pytest.approx(1 + 2 * GAMMA, abs=1e-12)
        assert value.pole_residue == pytest.approx(pole, abs=1e-12)
        assert wres_from_modes(a, weight) == pytest.approx(2.0, abs=1e-12)
    assert residue(a) == pytest.approx(2.0)


def test_trace_class_is_ordinary_sum():
    a = weight_power(laplacian_plus_one_weight(), -1.0, 1)
    expected = float(mpmath.pi * mpmath.coth(mpmath.pi))
    assert weighted_trace(a, laplacian_weight()) == pytest.approx(expected, abs=1e-12)
    assert ordinary_trace(a, 20000) == pytest.approx(expected, abs=2e-4)


@given(st.floats(0.1, 2.9).filter(lambda b: abs(b - round(b)) > 0.05))
def test_canonical_power_matches_zeta(beta):
    expected = 1 + 2 * float(mpmath.zeta(beta))
    assert canonical_trace_TR(abs_dirac_power(-beta, 1)) == pytest.approx(expected, rel=1e-10, abs=1e-10)


def test_log_diagonal():
    # c_n = log|n| / n^2, sum = -2 zeta'(2)
    ray = RayExpansion.power(-2.0, 1.0, log_power=1)
    head = np.array([math.log(abs(n)) / n ** 2 if n else 0.0 for n in range(-48, 49)])
    data = DiagonalTraceData(head, ray, ray)
    assert finite_part_sum(data, None).finite_part == pytest.approx(-2 * float(mpmath.zeta(2, derivative=1)))


@given(seeds)
def test_noninteger_weighted_equals_canonical(seed):
    rng = np.random.default_rng(seed)
    a = compose(random_banded(rng, 1, 1, names=("Id",)), abs_dirac_power(-0.5, 1))
    tr = canonical_trace_TR(a)
    for w in (laplacian_weight(), shifted_square_weight(), abs_dirac_weight()):
        assert weighted_trace(a, w) == pytest.approx(tr, abs=1e-9)


@given(seeds)
def test_canonical_trace_kills_noninteger_commutators(seed):
    rng = np.random.default_rng(seed)
    a = compose(random_banded(rng, 1, 1, names=("Id", "D")), abs_dirac_power(-math.pi, 1))
    b = compose(shift_operator(int(rng.integers(-2, 3)), 1), abs_dirac_power(0.5, 1))
    assert abs(canonical_trace_TR(commutator(a, b))) < 1e-9


@given(seeds)
def test_residue_is_a_trace(seed):
    rng = np.random.default_rng(seed)
    a, b = random_banded(rng, 1, 2), random_banded(rng, 1, 2)
    assert abs(residue(commutator(a, b))) < 1e-9


def test_canonical_trace_rejects_integer_order():
    with pytest.raises(ModeError):
        canonical_trace_TR(dirac(1))


def test_nonsummable_remainder_rejected():
    data = DiagonalTraceData.from_function(lambda ns: np.ones(ns.size), RayExpansion.power(0.0, 1.0, d=1),
                                           RayExpansion.zero(1, rem=0.0))
    with pytest.raises(ModeError):
        finite_part_sum(data, laplacian_weight())


@pytest.mark.parametrize("triple", weight_triples(), ids=lambda t: t.label)
def test_weight_dependence_corpus(triple):
    lhs, rhs = weight_dependence(triple.a, triple.weight1, triple.weight2)
    assert abs(lhs - rhs) < 1e-8


def test_weight_dependence_needs_equal_orders():
    with pytest.raises(ModeError):
        weight_dependence(identity(1), laplacian_weight(), abs_dirac_weight())


@pytest.mark.parametrize("case", covariance_cases(), ids=lambda c: c.label)
def test_covariance_corpus(case):
    lhs, rhs = covariance_check(case.a, case.weight, case.c, case.c_inv, case.shift)
    assert abs(lhs - rhs) < 1e-9


def test_covariance_rejects_non_inverse():
    with pytest.raises(ModeError):
        covariance_check(identity(1), laplacian_weight(), shift_operator(1, 1), shift_operator(1, 1), 1)
