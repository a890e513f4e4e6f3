"""Bilinear functionals built from weighted traces, and the cochain algebra.

Sign convention for the coboundary (trivial coefficients):

    (delta c)(x_1, ..., x_{n+1}) = sum_{i<j} (-1)^{i+j+1} c([x_i, x_j], x_1, ..^i..^j.., x_{n+1})

so that ``delta c(A, B) = c([A, B])`` for a 1-cochain and, for a 2-cochain,
``delta c(X, Y, Z) = c([X,Y], Z) + c([Y,Z], X) + c([Z,X], Y)``.  This is the
standard Chevalley-Eilenberg operator times ``-1``; it squares to zero all
the same.

The polarizing operator is ``D = D_0`` (order one); its weight ``|D| + P``
has eigenvalues ``max(|n|, 1)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .mode_ops import (BlockBandOperator, DiagonalWeight, ModeError, abs_dirac_weight, adjoint,
                       block, commutator, compose, epsilon_sign, log_commutator, log_ratio)
from .reg_traces import residue, weighted_trace

DIRAC_ORDER = 1.0


@dataclass(frozen=True)
class Cochain:
    """Antisymmetric multilinear functional of ``degree`` arguments.

    ``bracket`` is the Lie bracket of the argument algebra (operator
    commutator by default; loop bracket for cochains on loop algebras).
    """

    degree: int
    evaluator: Callable[..., complex]
    label: str = ""
    bracket: Callable = commutator

    def __call__(self, *args) -> complex:
        if len(args) != self.degree:
            raise ModeError(f"cochain {self.label!r} takes {self.degree} arguments, got {len(args)}")
        return self.evaluator(*args)


def coboundary(c: Cochain) -> Cochain:
    """Chevalley-Eilenberg coboundary with trivial coefficients (sign as in the module docstring)."""
    n = c.degree

    def evaluate(*xs):
        if n == 0:
            return 0j
        total = 0j
        for i in range(n + 1):
            for j in range(i + 1, n + 1):
                rest = [x for m, x in enumerate(xs) if m not in (i, j)]
                sign = (-1) ** (i + j + 1)  # 0-based i, j: (i+1)+(j+1)+1 has the same parity
                total += sign * c(c.bracket(xs[i], xs[j]), *rest)
        return total

    return Cochain(n + 1, evaluate, f"delta({c.label})", c.bracket)


def antisymmetry_defect(c: Cochain, args: Sequence) -> float:
    """Largest ``|c(..x..y..) + c(..y..x..)|`` over adjacent transpositions."""
    worst = 0.0
    for i in range(len(args) - 1):
        swapped = list(args)
        swapped[i], swapped[i + 1] = swapped[i + 1], swapped[i]
        worst = max(worst, abs(c(*args) + c(*swapped)))
    return worst


# ---------------------------------------------------------------------------
# Radul cocycle


def radul(a: BlockBandOperator, b: BlockBandOperator, weight: DiagonalWeight) -> complex:
    """``c_R^Q(A, B) = tr^Q([A, B])``."""
    return weighted_trace(commutator(a, b), weight)


def radul_residue_form(a: BlockBandOperator, b: BlockBandOperator, weight: DiagonalWeight) -> complex:
    """``-(1/ord Q) res([log Q, A] B)``."""
    return -residue(compose(log_commutator(weight, a), b)) / weight.order


def weighted_trace_cochain(weight: DiagonalWeight) -> Cochain:
    return Cochain(1, lambda a: weighted_trace(a, weight), f"tr^{weight.name}")


def radul_cochain(weight: DiagonalWeight) -> Cochain:
    return Cochain(2, lambda a, b: radul(a, b, weight), f"c_R^{weight.name}")


def log_ratio_cochain(weight1: DiagonalWeight, weight2: DiagonalWeight) -> Cochain:
    """``A -> -(1/q) res(A (log Q1 - log Q2))``; its coboundary is ``c_R^{Q1} - c_R^{Q2}``."""
    def evaluate(a):
        return -residue(compose(a, log_ratio(weight1, weight2, a.d))) / weight1.order
    return Cochain(1, evaluate, f"res log({weight1.name}/{weight2.name})")


# ---------------------------------------------------------------------------
# Schwinger-type functionals for the polarization eps = sign(D_0)


def _eps(d: int) -> BlockBandOperator:
    return epsilon_sign(d)


def schwinger(a: BlockBandOperator, b: BlockBandOperator) -> complex:
    """``c_S(A, B) = 1/2 tr^{|D|}(eps [eps, A] [eps, B])``."""
    eps = _eps(a.d)
    prod = compose(compose(eps, commutator(eps, a)), commutator(eps, b))
    return 0.5 * weighted_trace(prod, abs_dirac_weight())


def signed_trace(a: BlockBandOperator) -> complex:
    """``tr_eps(A) = tr^{|D|}(eps A)``."""
    return weighted_trace(compose(_eps(a.d), a), abs_dirac_weight())


def signed_trace_cochain() -> Cochain:
    return Cochain(1, signed_trace, "tr_eps")


def c_TR(a: BlockBandOperator, b: BlockBandOperator) -> complex:
    """``tr^{|D|}([eps A, B])``."""
    return weighted_trace(commutator(compose(_eps(a.d), a), b), abs_dirac_weight())


def c_TR_tilde(a: BlockBandOperator, b: BlockBandOperator) -> complex:
    """``tr^{|D|}([A eps, B])``."""
    return weighted_trace(commutator(compose(a, _eps(a.d)), b), abs_dirac_weight())


def c_TR_bar(a: BlockBandOperator, b: BlockBandOperator) -> complex:
    return 0.5 * (c_TR(a, b) + c_TR_tilde(a, b))


def obstruction_residue(a: BlockBandOperator, b: BlockBandOperator) -> complex:
    """``res(eps [A, [log|D|, B]])``; vanishes exactly when ``c_TR`` is antisymmetric."""
    inner = log_commutator(abs_dirac_weight(), b)
    return residue(compose(_eps(a.d), commutator(a, inner)))


def mean_schwinger(a: BlockBandOperator, b: BlockBandOperator) -> complex:
    """Antisymmetrized Schwinger functional ``(c_S(A, B) - c_S(B, A)) / 2``."""
    return 0.5 * (schwinger(a, b) - schwinger(b, a))


# ---------------------------------------------------------------------------
# Restricted-algebra cocycle and the symplectic side


def lambda_D_operator(a: BlockBandOperator, b: BlockBandOperator) -> BlockBandOperator:
    """``[A_{++}, B_{++}] - [A, B]_{++}``."""
    return commutator(block(a, "++"), block(b, "++")) - block(commutator(a, b), "++")


def lambda_D(a: BlockBandOperator, b: BlockBandOperator) -> complex:
    """``tr^{|D|}([A_{++}, B_{++}] - [A, B]_{++})``."""
    return weighted_trace(lambda_D_operator(a, b), abs_dirac_weight())


def lambda_D_finite_rank(a: BlockBandOperator, b: BlockBandOperator) -> complex:
    """The same quantity as the ordinary trace ``tr(B_{+-} A_{-+} - A_{+-} B_{-+})``."""
    from .reg_traces import ordinary_trace

    op = compose(block(b, "+-"), block(a, "-+")) - compose(block(a, "+-"), block(b, "-+"))
    if not op.is_finite_rank:
        raise ModeError("off-diagonal blocks are not finite rank")
    return ordinary_trace(op, op_radius(op))


def op_radius(op: BlockBandOperator) -> int:
    return max((b.radius for b in op.bands.values()), default=0)


def j_embed(c: BlockBandOperator) -> BlockBandOperator:
    """``j(C) = C - C*`` for ``C`` mapping ``H+`` into ``H-``."""
    lower = block(c, "-+")
    diff = c - lower
    if any(not band.plus.is_zero or not band.minus.is_zero or np.any(band.head) for band in diff.bands.values()):
        raise ModeError("j_embed expects an operator supported in the (-+) quadrant")
    return c - adjoint(c)


def omega_D(a: BlockBandOperator, b: BlockBandOperator) -> complex:
    """``-i tr^{|D|}(A* B - B* A)``."""
    op = compose(adjoint(a), b) - compose(adjoint(b), a)
    return -1j * weighted_trace(op, abs_dirac_weight())


def hilbert_schmidt_pairing(a: BlockBandOperator, b: BlockBandOperator) -> complex:
    """Ordinary trace ``tr(A* B - B* A)`` for finite-rank arguments."""
    from .reg_traces import ordinary_trace

    op = compose(adjoint(a), b) - compose(adjoint(b), a)
    if not op.is_finite_rank:
        raise ModeError("hilbert_schmidt_pairing expects finite-rank arguments")
    return ordinary_trace(op, op_radius(op))
