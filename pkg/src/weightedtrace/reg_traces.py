"""Zeta-regularized traces of banded operators.

The engine works on the diagonal ``c_n = tr entry(0, n)`` of an operator.
Modes with ``|n| <= T`` (the trace split point) are summed exactly; beyond
``T`` each ray expansion term ``a |n|^beta (log|n|)^p`` is continued through
the Hurwitz zeta function.  For a weight ``mu_n = |n|^q exp(L_n)`` with
``L_n`` a pure power series in ``1/|n|``,

    sum_{|n| > T} c_n mu_n^{-z}
        = sum_terms a * [zeta or -zeta' or pole](T + 1)
          - z * sum_{|n| > T} c_n L_n |n|^{-qz} + O(z)

and only the pole of the second sum survives at ``z = 0``, contributing
``-(1/q)`` times the ``|n|^{-1}`` coefficient of ``c * L``.  Terms with
``beta = -1`` produce the pole ``a / (q z)`` and the finite part
``-a psi(T + 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .expansions import EXP_TOL, RayExpansion
from .mode_ops import (BlockBandOperator, DiagonalWeight, ModeError, compose, current_settings,
                       fibre_trace, identity, log_ratio)
from .zeta import digamma, hurwitz_zeta, hurwitz_zeta_deriv

POLE_TOL = 1e-10


@dataclass(frozen=True)
class RegularizedValue:
    """Laurent data at ``z = 0``: finite part and residue of a simple pole."""

    finite_part: complex
    pole_residue: complex

    @property
    def is_entire(self) -> bool:
        return abs(self.pole_residue) < POLE_TOL


@dataclass(frozen=True, eq=False)
class DiagonalTraceData:
    """Exact ``c_n`` for ``|n| <= split`` and scalar ray expansions beyond."""

    head: np.ndarray  # c_n for n = -split..split
    plus: RayExpansion
    minus: RayExpansion

    @property
    def split(self) -> int:
        return (self.head.size - 1) // 2

    @property
    def remainder_order(self) -> float:
        return max(self.plus.rem, self.minus.rem)

    @classmethod
    def from_operator(cls, a: BlockBandOperator, split: int | None = None) -> "DiagonalTraceData":
        split = current_settings().trace_split if split is None else split
        traced = fibre_trace(a)
        band = traced.band(0)
        ns = np.arange(-split, split + 1)
        return cls(band.values(ns)[:, 0, 0], band.plus, band.minus)

    @classmethod
    def from_function(cls, fn, plus: RayExpansion, minus: RayExpansion, split: int | None = None):
        split = current_settings().trace_split if split is None else split
        ns = np.arange(-split, split + 1)
        return cls(np.asarray(fn(ns), dtype=complex), plus, minus)


def _head_sum(values: np.ndarray) -> complex:
    return complex(math.fsum(values.real), math.fsum(values.imag))


def _is_int(x: float) -> bool:
    return abs(x - round(x)) < EXP_TOL


def finite_part_sum(data: DiagonalTraceData, weight: DiagonalWeight | None) -> RegularizedValue:
    """Laurent data at ``z = 0`` of ``sum_n c_n mu_n^{-z}``.

    ``weight=None`` regularizes with ``|n|^{-z}`` and no correction term,
    which is the canonical continuation used for non-integer orders.
    """
    if data.remainder_order >= -1:
        raise ModeError(
            f"expansion remainder O(|n|^{data.remainder_order:g}) is not summable; increase the depth")
    start = data.split + 1
    q = 1.0 if weight is None else weight.order
    finite = _head_sum(data.head)
    pole = 0j
    for ray, expansion in ((1, data.plus), (-1, data.minus)):
        if expansion.max_log_power > 1:
            raise ModeError("log power above one is not supported")
        for expo, p, coef in expansion.terms():
            a = complex(coef[0, 0])
            if abs(expo + 1) < EXP_TOL:
                if p:
                    raise ModeError("log|n| / |n| term gives a double pole")
                pole += a / q
                finite += -a * digamma(start)
            elif p == 0:
                finite += a * hurwitz_zeta(-expo, start)
            else:
                finite += -a * hurwitz_zeta_deriv(-expo, start)
        if weight is not None:
            corr = weight.log_correction(ray)
            if not corr.is_zero:
                product = expansion.mul(corr, _depth_to_minus_one(expansion))
                if abs(product.coefficient(-1.0, 1)[0, 0]) > 0:
                    raise ModeError("log terms meet the weight correction at |n|^-1 (double pole)")
                finite -= complex(product.coefficient(-1.0, 0)[0, 0]) / q
    return RegularizedValue(finite, pole)


def _depth_to_minus_one(expansion: RayExpansion) -> int:
    order = expansion.order
    if not np.isfinite(order):
        return 0
    return max(0, int(math.ceil(order + 1 + EXP_TOL)) + 1)


def weighted_trace(a: BlockBandOperator, weight: DiagonalWeight) -> complex:
    """``tr^Q(A)``: finite part at ``z = 0`` of ``TR(A Q^{-z})``."""
    return finite_part_sum(DiagonalTraceData.from_operator(a), weight).finite_part


def weighted_trace_data(a: BlockBandOperator, weight: DiagonalWeight) -> RegularizedValue:
    return finite_part_sum(DiagonalTraceData.from_operator(a), weight)


def wres_from_modes(a: BlockBandOperator, weight: DiagonalWeight) -> complex:
    """Wodzicki residue ``ord(Q) * Res_{z=0} TR(A Q^{-z})``."""
    value = weighted_trace_data(a, weight)
    return weight.order * value.pole_residue


def residue(a: BlockBandOperator) -> complex:
    """Weight-free residue: the total ``|n|^{-1}`` coefficient of the fibre-traced diagonal."""
    band = fibre_trace(a).band(0)
    total = 0j
    for ray in (band.plus, band.minus):
        if abs(ray.coefficient(-1.0, 1)[0, 0]) > 0:
            raise ModeError("log|n| / |n| diagonal term: residue undefined")
        total += complex(ray.coefficient(-1.0, 0)[0, 0])
    return total


def canonical_trace_TR(a: BlockBandOperator) -> complex:
    """Kontsevich-Vishik canonical trace for operators of non-integer order."""
    order = a.order
    if np.isfinite(order) and _is_int(order):
        raise ModeError("canonical trace is only defined for non-integer order")
    data = DiagonalTraceData.from_operator(a)
    value = finite_part_sum(data, None)
    if not value.is_entire:
        raise ModeError("operator has a |n|^-1 diagonal term; canonical trace undefined")
    return value.finite_part


def ordinary_trace(a: BlockBandOperator, cutoff: int) -> complex:
    """Partial trace ``sum_{|n| <= cutoff} c_n`` from exact diagonal values."""
    ns = np.arange(-cutoff, cutoff + 1)
    vals = fibre_trace(a).values(0, ns)[:, 0, 0]
    return _head_sum(vals)


def weight_dependence(a: BlockBandOperator, weight1: DiagonalWeight,
                      weight2: DiagonalWeight) -> tuple[complex, complex]:
    """``(tr^{Q1}(A) - tr^{Q2}(A), -(1/q) res(A (log Q1 - log Q2)))``."""
    if abs(weight1.order - weight2.order) > 1e-12:
        raise ModeError("weight_dependence needs weights of equal order")
    lhs = weighted_trace(a, weight1) - weighted_trace(a, weight2)
    rhs = -residue(compose(a, log_ratio(weight1, weight2, a.d))) / weight1.order
    return lhs, rhs


def covariance_check(a: BlockBandOperator, weight: DiagonalWeight, c: BlockBandOperator,
                     c_inv: BlockBandOperator, shift: int = 0) -> tuple[complex, complex]:
    """``(tr^{C^-1 Q C}(A), tr^Q(C A C^-1))``.

    ``C`` must be a mode shift by ``shift`` tensored with an invertible
    constant matrix (``shift = 0`` for constant matrices), so that the
    conjugated weight is the diagonal weight with eigenvalues ``mu_{n+shift}``.
    """
    check = compose(c, c_inv)
    if max(abs(np.max(np.abs(check.values(0, np.arange(-5, 6)) - np.eye(a.d)))), 0) > 1e-12 or \
            set(check.bands) != {0}:
        raise ModeError("C_inv is not an inverse of C in the supported family")
    conj_weight = weight.shifted(shift) if shift else weight
    lhs = weighted_trace(a, conj_weight)
    rhs = weighted_trace(compose(compose(c, a), c_inv), weight)
    return lhs, rhs


def scalar_identity_trace(weight: DiagonalWeight, d: int = 1) -> complex:
    return weighted_trace(identity(d), weight)
