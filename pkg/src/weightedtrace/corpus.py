"""Seeded operator and loop corpora shared by the tests, suites and scripts.

Coefficients are small integers or dyadic rationals so that exact identities
are not blurred by input rounding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lie_core import LieAlgebraData, LoopElement, random_loop
from .mode_ops import (BlockBandOperator, DiagonalWeight, abs_dirac_power, abs_dirac_weight, compose,
                       dirac, epsilon_sign, identity, laplacian_plus_one_weight, laplacian_weight,
                       multiplication_operator, quartic_weight, shift_operator, shifted_square_weight,
                       weight_power)

DEFAULT_SEED = 20240607


def generators(d: int = 1) -> dict[str, BlockBandOperator]:
    """Diagonal building blocks of orders -1..2."""
    dd = dirac(d)
    return {
        "Id": identity(d),
        "D": dd,
        "|D|": abs_dirac_power(1.0, d),
        "|D|^-1": abs_dirac_power(-1.0, d),
        "D^2": compose(dd, dd),
        "eps": epsilon_sign(d),
        "eps D": compose(epsilon_sign(d), dd),
        "(D^2+1)^-1/2": weight_power(laplacian_plus_one_weight(), -0.5, d),
    }


GENERATOR_ORDERS = {"Id": 0, "D": 1, "|D|": 1, "|D|^-1": -1, "D^2": 2, "eps": 0, "eps D": 1,
                    "(D^2+1)^-1/2": -1}


def _dyadic(rng: np.random.Generator, size=None):
    return rng.integers(-8, 9, size=size) / 4.0


def random_multiplication(rng: np.random.Generator, d: int = 1, bandwidth: int = 2) -> BlockBandOperator:
    """Multiplication by a random trigonometric matrix polynomial."""
    coeffs = {}
    for k in range(-bandwidth, bandwidth + 1):
        if rng.random() < 0.7:
            coeffs[k] = _dyadic(rng, (d, d)) + 1j * _dyadic(rng, (d, d))
    if not coeffs:
        coeffs[1] = np.eye(d)
    return multiplication_operator(coeffs, d)


def random_banded(rng: np.random.Generator, d: int = 1, terms: int = 2, bandwidth: int = 2,
                  names: tuple[str, ...] | None = None) -> BlockBandOperator:
    """``sum_i M_{f_i} G_i`` with random trigonometric ``f_i`` and generators ``G_i``."""
    table = generators(d)
    pool = names or tuple(table)
    total = None
    for _ in range(terms):
        g = table[pool[int(rng.integers(len(pool)))]]
        term = compose(random_multiplication(rng, d, bandwidth), g)
        total = term if total is None else total + term
    return total


@dataclass(frozen=True)
class OperatorPair:
    label: str
    a: BlockBandOperator
    b: BlockBandOperator


def banded_pairs(count: int = 24, seed: int = DEFAULT_SEED, d: int = 1) -> list[OperatorPair]:
    """Pairs spanning orders -1..2 (one generator per factor, cycling through the table)."""
    rng = np.random.default_rng(seed)
    names = list(generators(d))
    out = []
    for i in range(count):
        na = names[i % len(names)]
        nb = names[(3 * i + 1) % len(names)]
        a = random_banded(rng, d, terms=1, names=(na,))
        b = random_banded(rng, d, terms=1, names=(nb,))
        out.append(OperatorPair(f"M*{na} , M*{nb}", a, b))
    return out


def multiplication_pairs(count: int = 12, seed: int = DEFAULT_SEED, d: int = 1) -> list[OperatorPair]:
    rng = np.random.default_rng(seed + 1)
    return [OperatorPair(f"mult{i}", random_multiplication(rng, d), random_multiplication(rng, d))
            for i in range(count)]


def weight_corpus() -> list[DiagonalWeight]:
    return [laplacian_weight(), laplacian_plus_one_weight(), shifted_square_weight()]


@dataclass(frozen=True)
class WeightTriple:
    label: str
    a: BlockBandOperator
    weight1: DiagonalWeight
    weight2: DiagonalWeight


def weight_triples(seed: int = DEFAULT_SEED) -> list[WeightTriple]:
    """Operators against pairs of equal-order weights."""
    rng = np.random.default_rng(seed + 2)
    table = generators(1)
    ops = [("|D|^-1", table["|D|^-1"]), ("Id", table["Id"]), ("eps", table["eps"]), ("D", table["D"]),
           ("|D|", table["|D|"]), ("M*|D|^-1", random_banded(rng, 1, 1, names=("|D|^-1",))),
           ("M*D", random_banded(rng, 1, 1, names=("D",)))]
    order2 = weight_corpus()
    out = []
    for name, a in ops:
        for i in range(len(order2)):
            for j in range(i + 1, len(order2)):
                out.append(WeightTriple(f"{name}: {order2[i].name} vs {order2[j].name}", a, order2[i], order2[j]))
    return out


@dataclass(frozen=True)
class CovarianceCase:
    label: str
    a: BlockBandOperator
    weight: DiagonalWeight
    c: BlockBandOperator
    c_inv: BlockBandOperator
    shift: int


def covariance_cases(seed: int = DEFAULT_SEED) -> list[CovarianceCase]:
    """Conjugations by mode shifts and by constant invertible matrices."""
    rng = np.random.default_rng(seed + 3)
    out = []
    ops1 = generators(1)
    for shift in (1, -1, 2):
        for name in ("eps", "D", "|D|^-1", "D^2"):
            for weight in (laplacian_weight(), abs_dirac_weight()):
                out.append(CovarianceCase(f"shift {shift}: {name}, {weight.name}", ops1[name], weight,
                                          shift_operator(shift, 1), shift_operator(-shift, 1), shift))
    d = 2
    mat = np.array([[2.0, 1.0], [1.0, 1.0]])
    inv = np.linalg.inv(mat)
    for name in ("eps", "D", "M"):
        a = random_banded(rng, d, 1, names=("eps",)) if name == "M" else generators(d)[name]
        out.append(CovarianceCase(f"matrix: {name}", a, laplacian_weight(),
                                  multiplication_operator({0: mat}, d), multiplication_operator({0: inv}, d), 0))
    return out


def order_two_weights() -> list[DiagonalWeight]:
    return [laplacian_weight(), laplacian_plus_one_weight()]


def higher_order_weight() -> DiagonalWeight:
    return quartic_weight()


def monomial_pairs(algebra: LieAlgebraData, max_mode: int = 5) -> list[tuple[LoopElement, LoopElement, int, int, int]]:
    """``(z^n e_i, z^-p e_j, n, i, j)`` for ``n, p = 1..max_mode`` with ``p = n``."""
    out = []
    for n in range(1, max_mode + 1):
        for i in range(algebra.dim):
            for j in range(algebra.dim):
                out.append((LoopElement.monomial(algebra, n, i), LoopElement.monomial(algebra, -n, j), n, i, j))
    return out


def random_loops(algebra: LieAlgebraData, count: int, degree: int, seed: int = DEFAULT_SEED,
                 real: bool = False) -> list[LoopElement]:
    rng = np.random.default_rng(seed + 4)
    return [random_loop(algebra, int(rng.integers(1, degree + 1)), rng, real=real, integer=True)
            for _ in range(count)]
