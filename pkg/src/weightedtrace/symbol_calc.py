"""Classical symbols on the circle and the Wodzicki residue.

A symbol of order ``alpha`` is stored through its homogeneous components
``sigma_{alpha - j}(t, +1)`` and ``sigma_{alpha - j}(t, -1)``, i.e. its values
on the two rays ``xi > 0`` and ``xi < 0`` at ``|xi| = 1``.  The ``t``
dependence is a trigonometric polynomial with ``d x d`` matrix coefficients,
so integrals over the circle are exact (only the constant mode survives).

Composition follows the left-quantization rule

    sigma_AB ~ sum_m (1/m!) d_xi^m sigma_A * (-i d_t)^m sigma_B,

which on the mode side is ``entry_AB(k, n) = sum A(k1, n + k2) B(k2, n)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .expansions import EXP_TOL, NEG_INF, Family, RayExpansion
from .mode_ops import (BandEntryExpansion, BlockBandOperator, DiagonalWeight, ModeError,
                       current_settings)

EXACT = 10 ** 9


class SymbolError(ValueError):
    """Raised when a symbol lacks the depth or structure an operation needs."""


def falling(beta: complex, m: int) -> complex:
    out = 1.0
    for i in range(m):
        out *= beta - i
    return out


@dataclass(frozen=True, eq=False)
class ClassicalSymbol1D:
    """Components ``plus[j]``, ``minus[j]`` of shape ``(2K + 1, d, d)`` (Fourier modes ``-K..K``).

    ``depth`` is the number of leading components that are valid; stored
    arrays may be shorter, in which case the missing valid components are
    zero.  ``EXACT`` marks a symbol whose expansion terminates.
    """

    order: complex
    plus: np.ndarray  # (J, 2K+1, d, d)
    minus: np.ndarray
    depth: int = EXACT

    @property
    def d(self) -> int:
        return self.plus.shape[2]

    @property
    def modes(self) -> int:
        return (self.plus.shape[1] - 1) // 2

    @property
    def stored(self) -> int:
        return self.plus.shape[0]

    def component(self, j: int, ray: int) -> np.ndarray:
        if j >= self.depth:
            raise SymbolError(f"component {j} requested beyond valid depth {self.depth}")
        arr = self.plus if ray > 0 else self.minus
        if j >= arr.shape[0]:
            return np.zeros(arr.shape[1:], dtype=complex)
        return arr[j]

    def __add__(self, other: "ClassicalSymbol1D") -> "ClassicalSymbol1D":
        diff = self.order - other.order
        if abs(diff - round(diff.real)) > EXP_TOL:
            raise SymbolError("cannot add symbols whose orders differ by a non-integer")
        shift = int(round(diff.real))
        hi, lo, off = (self, other, shift) if shift >= 0 else (other, self, -shift)
        depth = min(hi.depth, lo.depth + off)
        k = max(hi.modes, lo.modes)
        length = max(hi.stored, lo.stored + off)
        if depth < EXACT:
            length = min(length, depth)
        out = {}
        for name in ("plus", "minus"):
            arr = np.zeros((length, 2 * k + 1, self.d, self.d), dtype=complex)
            for sym, o in ((hi, 0), (lo, off)):
                src = getattr(sym, name)
                n = min(src.shape[0], max(length - o, 0))
                arr[o:o + n, k - sym.modes:k + sym.modes + 1] += src[:n]
            out[name] = arr
        return ClassicalSymbol1D(hi.order, out["plus"], out["minus"], depth)

    def scale(self, c) -> "ClassicalSymbol1D":
        return ClassicalSymbol1D(self.order, c * self.plus, c * self.minus, self.depth)

    def __sub__(self, other):
        return self + other.scale(-1.0)


def _arr(comps, d: int, modes: int = 0) -> np.ndarray:
    arr = np.zeros((len(comps), 2 * modes + 1, d, d), dtype=complex)
    for j, c in enumerate(comps):
        c = np.asarray(c, dtype=complex)
        arr[j, modes] = c * np.eye(d) if c.ndim == 0 else c
    return arr


def symbol_multiplier(order: float, plus_comps, minus_comps, d: int, depth: int = EXACT) -> ClassicalSymbol1D:
    """Fourier multiplier with ray components ``plus_comps[j]``, ``minus_comps[j]``."""
    return ClassicalSymbol1D(order, _arr(plus_comps, d), _arr(minus_comps, d), depth)


def symbol_identity(d: int) -> ClassicalSymbol1D:
    return symbol_multiplier(0, [1], [1], d)


def symbol_dirac(d: int) -> ClassicalSymbol1D:
    """``xi``: ``+|xi|`` on the positive ray, ``-|xi|`` on the negative one."""
    return symbol_multiplier(1, [1], [-1], d)


def symbol_laplacian(d: int) -> ClassicalSymbol1D:
    return symbol_multiplier(2, [1], [1], d)


def symbol_abs_power(beta: float, d: int) -> ClassicalSymbol1D:
    """``|xi|^beta``."""
    return symbol_multiplier(beta, [1], [1], d)


def symbol_epsilon(d: int) -> ClassicalSymbol1D:
    return symbol_multiplier(0, [1], [-1], d)


def symbol_weight_power(weight: DiagonalWeight, s: float, d: int, depth: int) -> ClassicalSymbol1D:
    """Symbol of the diagonal ``mu_n^s`` read from the weight's ray expansions."""
    comps = []
    for ray in (1, -1):
        exp = weight.power_expansion(s, ray, depth)
        comps.append([exp.coefficient(weight.order * s - j)[0, 0] for j in range(depth)])
    exact = all(weight.power_expansion(s, r, depth).rem == NEG_INF for r in (1, -1))
    return symbol_multiplier(weight.order * s, comps[0], comps[1], d, EXACT if exact else depth)


def symbol_multiplication(coeffs: dict, d: int) -> ClassicalSymbol1D:
    """Multiplication by ``sum_k C_k e^{ikt}``."""
    modes = max((abs(k) for k in coeffs), default=0)
    arr = np.zeros((1, 2 * modes + 1, d, d), dtype=complex)
    for k, c in coeffs.items():
        c = np.asarray(c, dtype=complex)
        arr[0, modes + k] = c * np.eye(d) if c.ndim == 0 else c
    return ClassicalSymbol1D(0, arr, arr.copy(), EXACT)


def _trig_conv(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ka = (a.shape[0] - 1) // 2
    kb = (b.shape[0] - 1) // 2
    out = np.zeros((2 * (ka + kb) + 1,) + a.shape[1:], dtype=complex)
    for i in range(a.shape[0]):
        if np.any(a[i]):
            out[i:i + b.shape[0]] += a[i] @ b
    return out


def star_compose(a: ClassicalSymbol1D, b: ClassicalSymbol1D, depth: int | None = None) -> ClassicalSymbol1D:
    """Symbol of the operator product ``AB``."""
    if a.d != b.d:
        raise SymbolError("symbols act on different fibres")
    valid = min(a.depth, b.depth)
    b_const = not (np.any(b.plus[:, :b.modes]) or np.any(b.plus[:, b.modes + 1:])
                   or np.any(b.minus[:, :b.modes]) or np.any(b.minus[:, b.modes + 1:]))
    alpha = complex(a.order)
    a_poly = (alpha.imag == 0 and float(alpha.real).is_integer() and alpha.real >= 0
              and a.stored <= alpha.real + 1)
    out_depth = None
    if depth is None:
        if valid >= EXACT and (b_const or a_poly):
            depth = a.stored + b.stored - 1 + (0 if b_const else int(alpha.real))
            out_depth = EXACT
        else:
            depth = min(valid, current_settings().depth)
    elif depth > valid:
        raise SymbolError(f"requested depth {depth} exceeds available depth {valid}")
    out_depth = depth if out_depth is None else out_depth
    kb = b.modes
    kvec = np.arange(-kb, kb + 1)
    length = depth
    modes = a.modes + b.modes
    out = {}
    for ray, name in ((1, "plus"), (-1, "minus")):
        arr = np.zeros((length, 2 * modes + 1, a.d, a.d), dtype=complex)
        for j1 in range(min(a.stored, length)):
            comp_a = getattr(a, name)[j1]
            if not np.any(comp_a):
                continue
            beta = a.order - j1
            for m in range(length - j1):
                coef = ray ** m * falling(beta, m) / math.factorial(m)
                if coef == 0:
                    break
                weights = (kvec.astype(float) ** m)[:, None, None]
                for j2 in range(min(b.stored, length - j1 - m)):
                    comp_b = getattr(b, name)[j2]
                    if not np.any(comp_b):
                        continue
                    arr[j1 + m + j2] += coef * _trig_conv(comp_a, weights * comp_b)
        out[name] = arr
    return ClassicalSymbol1D(a.order + b.order, out["plus"], out["minus"], out_depth)


def wodzicki_residue(sigma: ClassicalSymbol1D) -> complex:
    """``(1/2pi) int tr[sigma_{-1}(t, +1) + sigma_{-1}(t, -1)] dt``."""
    alpha = complex(sigma.order)
    if abs(alpha.imag) > EXP_TOL or abs(alpha.real - round(alpha.real)) > EXP_TOL:
        return 0j
    j = int(round(alpha.real)) + 1
    if j < 0:
        return 0j
    if j >= sigma.depth:
        raise SymbolError(f"residue needs component {j} but the symbol is valid to depth {sigma.depth}")
    k = sigma.modes
    return complex(np.trace(sigma.component(j, 1)[k] + sigma.component(j, -1)[k]))


def is_odd_class(sigma: ClassicalSymbol1D, tol: float = 1e-12) -> bool:
    alpha = complex(sigma.order)
    if abs(alpha.imag) > EXP_TOL or abs(alpha.real - round(alpha.real)) > EXP_TOL:
        raise SymbolError("odd class is defined for integer order only")
    a = int(round(alpha.real))
    for j in range(min(max(sigma.stored, 1), sigma.depth)):
        sign = (-1) ** ((a - j) % 2)
        if np.max(np.abs(sigma.component(j, -1) - sign * sigma.component(j, 1)), initial=0.0) > tol:
            return False
    return True


def symbol_to_modes(sigma: ClassicalSymbol1D) -> BlockBandOperator:
    """Band operator whose ray expansions are the symbol components.

    Head blocks are the expansion evaluated at ``|n|``; at ``n = 0`` the
    positive ray is used with ``|0|^beta`` read as ``1`` for ``beta <= 0`` and
    ``0`` for ``beta > 0`` (the kernel-projector convention).
    """
    alpha = complex(sigma.order)
    if abs(alpha.imag) > EXP_TOL:
        raise SymbolError("complex-order symbols have no mode representation here")
    alpha = alpha.real
    radius = current_settings().head_radius
    ns = np.arange(-radius, radius + 1)
    rem = NEG_INF if sigma.depth >= EXACT else alpha - sigma.depth
    length = sigma.stored if sigma.depth >= EXACT else min(sigma.stored, sigma.depth)
    k0 = sigma.modes
    bands = {}
    for idx in range(2 * k0 + 1):
        k = idx - k0
        rays = []
        for name in ("plus", "minus"):
            coef = getattr(sigma, name)[:length, idx]
            rays.append(RayExpansion.from_families([Family(alpha, 0, coef)], rem, sigma.d))
        head = np.zeros((ns.size, sigma.d, sigma.d), dtype=complex)
        pos, neg = ns > 0, ns < 0
        head[pos] = rays[0].evaluate(ns[pos])
        head[neg] = rays[1].evaluate(-ns[neg])
        zero_val = np.zeros((sigma.d, sigma.d), dtype=complex)
        for expo, _, c in rays[0].terms():
            if expo <= EXP_TOL:
                zero_val = zero_val + c
        head[radius] = zero_val
        bands[k] = BandEntryExpansion(head, rays[0], rays[1])
    return BlockBandOperator(sigma.d, bands, "Op(sigma)")


def modes_to_symbol(a: BlockBandOperator) -> ClassicalSymbol1D:
    """Inverse bridge: read symbol components off the band ray expansions."""
    alpha = a.order
    if not np.isfinite(alpha):
        raise SymbolError("finite-rank operators have no classical symbol")
    k0 = a.bandwidth
    depth = EXACT
    comps = {}
    for k, band in a.bands.items():
        for name, ray in (("plus", band.plus), ("minus", band.minus)):
            for fam in ray.families:
                off = alpha - fam.top
                if fam.log_power or abs(off - round(off)) > EXP_TOL:
                    raise SymbolError("operator is not representable by a single classical symbol")
                for j in range(fam.length):
                    comps[(name, int(round(off)) + j, k)] = fam.coef[j]
            if np.isfinite(ray.rem):
                depth = min(depth, int(math.floor(alpha - ray.rem + EXP_TOL)))
    stored = 1 + max((j for (_, j, _) in comps), default=0)
    if depth < EXACT:
        stored = min(stored, depth)
    arrs = {name: np.zeros((stored, 2 * k0 + 1, a.d, a.d), dtype=complex) for name in ("plus", "minus")}
    for (name, j, k), c in comps.items():
        if j < stored:
            arrs[name][j, k + k0] = c
    return ClassicalSymbol1D(alpha, arrs["plus"], arrs["minus"], depth)


def symbol_residue_matches_modes(a: BlockBandOperator, weight: DiagonalWeight) -> tuple[complex, complex]:
    """Residue from the symbol bridge versus the spectral pole of ``TR(A Q^{-z})``."""
    from .reg_traces import wres_from_modes

    try:
        sym = modes_to_symbol(a)
    except SymbolError as exc:
        raise ModeError(str(exc)) from exc
    return wodzicki_residue(sym), wres_from_modes(a, weight)
