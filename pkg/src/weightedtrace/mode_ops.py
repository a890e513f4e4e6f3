"""Banded operators on the Fourier modes of ``L^2(S^1, C^d)``.

An operator is stored band by band: the block ``entry(k, n)`` maps mode ``n``
to mode ``n + k``.  Each band carries an exact table of its blocks for
``|n| <= N`` (the head) and a two-sided asymptotic expansion in ``|n|`` for
``n -> +inf`` and ``n -> -inf``.  Blocks outside the head are evaluated from
the expansion.  Composition re-expands shifted entries ``|n + k|^beta`` and
``log|n + k|`` in powers of ``|n|`` so the product stays in the same format.

Global knobs (head radius, expansion depth, trace split point and the
kernel convention) live in a :class:`ModeSettings` context variable so that
worker threads can run with independent settings.
"""

from __future__ import annotations

import contextvars
import csv
import math
from contextlib import contextmanager
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Mapping

import numpy as np

from .expansions import NEG_INF, RayExpansion, series_exp, series_log1p
from .zeta import hurwitz_zeta, hurwitz_zeta_deriv

LOG_SERIES_TERMS = 64


class Convention(str, Enum):
    """Where the kernel mode ``n = 0`` sits in the polarization."""

    KERNEL_PLUS = "kernel-plus"          # H+ = {n >= 0}, eps(0) = +1
    KERNEL_EXCLUDED = "kernel-excluded"  # H+ = {n > 0}, eps(0) = 0


@dataclass(frozen=True)
class ModeSettings:
    head_radius: int = 256
    depth: int = 24
    trace_split: int = 48
    convention: Convention = Convention.KERNEL_PLUS


_SETTINGS: contextvars.ContextVar[ModeSettings] = contextvars.ContextVar(
    "weightedtrace_mode_settings", default=ModeSettings())


def current_settings() -> ModeSettings:
    return _SETTINGS.get()


@contextmanager
def mode_settings(**overrides):
    """Temporarily override fields of the active :class:`ModeSettings`."""
    if "convention" in overrides:
        overrides["convention"] = Convention(overrides["convention"])
    token = _SETTINGS.set(replace(_SETTINGS.get(), **overrides))
    try:
        yield _SETTINGS.get()
    finally:
        _SETTINGS.reset(token)


class ModeError(ValueError):
    """Raised for invalid operator constructions or insufficient expansion depth."""


# ---------------------------------------------------------------------------
# Diagonal weights


def _poly_log_series(coeffs: np.ndarray) -> tuple[float, RayExpansion]:
    """``log(sum_i p_i x^i) = q log x + L(1/x)``; returns ``(q, L)`` with ``L`` scalar."""
    coeffs = np.trim_zeros(np.asarray(coeffs, dtype=float), "b")
    q = coeffs.size - 1
    lead = coeffs[-1]
    if lead <= 0:
        raise ModeError("leading coefficient of a weight polynomial must be positive")
    lower = coeffs[:-1][::-1] / lead  # lower[m-1] multiplies u^m
    if not np.any(lower):
        return float(q), RayExpansion.power(0.0, math.log(lead))
    u = np.zeros(LOG_SERIES_TERMS + 1)
    u[1:lower.size + 1] = lower
    series = series_log1p(u)
    series[0] = math.log(lead)
    return float(q), RayExpansion.from_families(
        [RayExpansion.power(0.0, series).families[0]], -(LOG_SERIES_TERMS + 1.0), 1)


@dataclass(frozen=True, eq=False)
class DiagonalWeight:
    """Positive diagonal weight ``mu_n ~ |n|^q (1 + o(1))``.

    ``log_plus``/``log_minus`` are scalar expansions of ``log mu_n - q log|n|``
    along the two rays; they contain only non-positive integer powers of
    ``|n|``.  ``mu`` gives the exact eigenvalues including the kernel value
    at ``n = 0`` (the weight plus kernel projector device).
    """

    name: str
    order: float
    mu: Callable[[np.ndarray], np.ndarray]
    log_plus: RayExpansion
    log_minus: RayExpansion

    def __post_init__(self):
        if not self.order > 0:
            raise ModeError("weights must have positive order")
        sample = np.asarray(self.mu(np.arange(-2000, 2001)), dtype=float)
        if np.any(~np.isfinite(sample)) or np.any(sample <= 0):
            raise ModeError(f"weight {self.name!r} has a non-positive eigenvalue")

    def eigenvalues(self, ns) -> np.ndarray:
        return np.asarray(self.mu(np.asarray(ns)), dtype=float)

    def log_correction(self, ray: int) -> RayExpansion:
        return self.log_plus if ray > 0 else self.log_minus

    def log_expansion(self, ray: int) -> RayExpansion:
        """Expansion of ``log mu_n`` along a ray (one log term plus pure powers)."""
        return RayExpansion.power(0.0, self.order, log_power=1) + self.log_correction(ray)

    def power_expansion(self, s: float, ray: int, depth: int) -> RayExpansion:
        """Expansion of ``mu_n^s`` along a ray."""
        corr = self.log_correction(ray)
        const = corr.coefficient(0.0)[0, 0]
        top = self.order * s
        rest = corr - RayExpansion.power(0.0, const)
        if rest.is_zero:
            return RayExpansion.power(top, np.exp(s * const))
        length = depth + 2
        u = np.zeros(length, dtype=complex)
        for expo, _, c in rest.terms():
            m = int(round(-expo))
            if m < length:
                u[m] = c[0, 0]
        series = np.exp(s * const) * series_exp(s * u)
        rem = max(top - length, top + rest.rem)
        return RayExpansion.from_families(RayExpansion.power(top, series).families, rem, 1)

    def shifted(self, shift: int) -> "DiagonalWeight":
        """The weight with eigenvalues ``mu_{n + shift}`` (conjugation by a mode shift)."""
        logs = []
        for ray in (1, -1):
            full = self.log_expansion(ray).shift(ray * shift, LOG_SERIES_TERMS)
            logs.append(full - RayExpansion.power(0.0, self.order, log_power=1))
        base = self.mu
        return DiagonalWeight(f"{self.name}[shift {shift}]", self.order,
                              lambda ns: base(np.asarray(ns) + shift), logs[0], logs[1])

    @classmethod
    def ray_polynomial(cls, name: str, plus_coeffs, minus_coeffs=None,
                       kernel_value: float = 1.0) -> "DiagonalWeight":
        """``mu_n = sum_i p_i |n|^i`` on each ray (ascending coefficients), ``mu_0 = kernel_value``."""
        plus = np.asarray(plus_coeffs, dtype=float)
        minus = plus if minus_coeffs is None else np.asarray(minus_coeffs, dtype=float)
        qp, lp = _poly_log_series(plus)
        qm, lm = _poly_log_series(minus)
        if qp != qm:
            raise ModeError("both rays of a weight must have the same order")

        def mu(ns):
            ns = np.asarray(ns)
            x = np.abs(ns).astype(float)
            vp = np.polynomial.polynomial.polyval(x, plus)
            vm = np.polynomial.polynomial.polyval(x, minus)
            return np.where(ns > 0, vp, np.where(ns < 0, vm, kernel_value))

        return cls(name, qp, mu, lp, lm)


def laplacian_weight() -> DiagonalWeight:
    """``Delta + P``: ``mu_n = max(n^2, 1)``, order 2."""
    return DiagonalWeight.ray_polynomial("Delta+P", [0, 0, 1])


def laplacian_plus_one_weight() -> DiagonalWeight:
    """``Delta + 1``: ``mu_n = n^2 + 1``, order 2 (odd class)."""
    return DiagonalWeight.ray_polynomial("Delta+1", [1, 0, 1])


def shifted_square_weight() -> DiagonalWeight:
    """``(|D| + 1)^2``: ``mu_n = (|n| + 1)^2``, order 2 (not odd class)."""
    return DiagonalWeight.ray_polynomial("(|D|+1)^2", [1, 2, 1])


def abs_dirac_weight() -> DiagonalWeight:
    """``|D| + P``: ``mu_n = max(|n|, 1)``, order 1."""
    return DiagonalWeight.ray_polynomial("|D|+P", [0, 1])


def quartic_weight() -> DiagonalWeight:
    """``Delta^2 + P``: ``mu_n = max(n^4, 1)``, order 4."""
    return DiagonalWeight.ray_polynomial("Delta^2+P", [0, 0, 0, 0, 1])


# ---------------------------------------------------------------------------
# Band entries and operators


def _ns(radius: int) -> np.ndarray:
    return np.arange(-radius, radius + 1)


@dataclass(frozen=True, eq=False)
class BandEntryExpansion:
    """Blocks of one band: exact head for ``|n| <= radius`` plus two ray expansions."""

    head: np.ndarray  # shape (2 radius + 1, d, d)
    plus: RayExpansion
    minus: RayExpansion

    @property
    def radius(self) -> int:
        return (self.head.shape[0] - 1) // 2

    @property
    def d(self) -> int:
        return self.head.shape[1]

    @property
    def order(self) -> float:
        return max(self.plus.order, self.minus.order)

    @property
    def remainder_order(self) -> float:
        return max(self.plus.rem, self.minus.rem)

    def values(self, ns) -> np.ndarray:
        ns = np.asarray(ns, dtype=np.int64)
        r = self.radius
        out = np.empty((ns.size, self.d, self.d), dtype=complex)
        inside = np.abs(ns) <= r
        out[inside] = self.head[ns[inside] + r]
        hi = ns > r
        if np.any(hi):
            out[hi] = self.plus.evaluate(ns[hi])
        lo = ns < -r
        if np.any(lo):
            out[lo] = self.minus.evaluate(-ns[lo])
        return out

    def is_zero(self) -> bool:
        return self.plus.is_zero and self.minus.is_zero and not np.any(self.head)

    def consistency(self) -> float:
        """Max deviation between the head and the expansions at ``|n| = radius``."""
        r = self.radius
        dev_p = np.max(np.abs(self.head[2 * r] - self.plus.evaluate([r])[0]))
        dev_m = np.max(np.abs(self.head[0] - self.minus.evaluate([r])[0]))
        return float(max(dev_p, dev_m))


@dataclass(frozen=True, eq=False)
class BlockBandOperator:
    """Banded operator; ``bands[k]`` holds the blocks mapping mode ``n`` to ``n + k``."""

    d: int
    bands: Mapping[int, BandEntryExpansion]
    label: str = ""

    def __post_init__(self):
        clean = {int(k): b for k, b in sorted(self.bands.items()) if not b.is_zero()}
        for b in clean.values():
            if b.d != self.d:
                raise ModeError("band block size does not match operator block size")
        object.__setattr__(self, "bands", clean)

    @property
    def bandwidth(self) -> int:
        return max((abs(k) for k in self.bands), default=0)

    @property
    def order(self) -> float:
        return max((b.order for b in self.bands.values()), default=NEG_INF)

    @property
    def remainder_order(self) -> float:
        return max((b.remainder_order for b in self.bands.values()), default=NEG_INF)

    @property
    def is_trace_class(self) -> bool:
        return self.order < -1

    @property
    def is_finite_rank(self) -> bool:
        return all(b.plus.is_zero and b.minus.is_zero for b in self.bands.values())

    def band(self, k: int) -> BandEntryExpansion:
        if k in self.bands:
            return self.bands[k]
        return _zero_band(self.d, current_settings().head_radius)

    def values(self, k: int, ns) -> np.ndarray:
        ns = np.asarray(ns, dtype=np.int64)
        if k not in self.bands:
            return np.zeros((ns.size, self.d, self.d), dtype=complex)
        return self.bands[k].values(ns)

    def entry(self, k: int, n: int) -> np.ndarray:
        return self.values(k, [n])[0]

    def with_label(self, label: str) -> "BlockBandOperator":
        return BlockBandOperator(self.d, self.bands, label)

    def __add__(self, other: "BlockBandOperator") -> "BlockBandOperator":
        return add(self, other)

    def __sub__(self, other: "BlockBandOperator") -> "BlockBandOperator":
        return add(self, scale(other, -1.0))

    def __neg__(self) -> "BlockBandOperator":
        return scale(self, -1.0)

    def __rmul__(self, c) -> "BlockBandOperator":
        return scale(self, c)

    def __matmul__(self, other: "BlockBandOperator") -> "BlockBandOperator":
        return compose(self, other)

    def __repr__(self) -> str:
        name = self.label or "BlockBandOperator"
        return f"<{name}: d={self.d}, bands={list(self.bands)}, order={self.order}>"


def _zero_band(d: int, radius: int) -> BandEntryExpansion:
    return BandEntryExpansion(np.zeros((2 * radius + 1, d, d), dtype=complex),
                              RayExpansion.zero(d), RayExpansion.zero(d))


def _eye_stack(values: np.ndarray, d: int) -> np.ndarray:
    return np.asarray(values, dtype=complex)[:, None, None] * np.eye(d)[None]


def zero_operator(d: int) -> BlockBandOperator:
    return BlockBandOperator(d, {}, "0")


def diagonal_operator(head_fn: Callable[[np.ndarray], np.ndarray], plus: RayExpansion,
                      minus: RayExpansion, d: int, label: str = "") -> BlockBandOperator:
    """Diagonal operator from a scalar eigenvalue function and its ray expansions."""
    ns = _ns(current_settings().head_radius)
    head = _eye_stack(head_fn(ns), d)
    band = BandEntryExpansion(head, plus.kron(np.eye(d)) if plus.d == 1 else plus,
                              minus.kron(np.eye(d)) if minus.d == 1 else minus)
    return BlockBandOperator(d, {0: band}, label)


def identity(d: int) -> BlockBandOperator:
    one = RayExpansion.power(0.0, 1.0)
    return diagonal_operator(lambda ns: np.ones(ns.size), one, one, d, "Id")


def dirac(d: int) -> BlockBandOperator:
    """``D_0 = -i d/dt``: diagonal entry ``n``."""
    return diagonal_operator(lambda ns: ns.astype(float), RayExpansion.power(1.0, 1.0),
                             RayExpansion.power(1.0, -1.0), d, "D0")


def in_plus(ns, convention: Convention | None = None) -> np.ndarray:
    conv = Convention(convention or current_settings().convention)
    ns = np.asarray(ns)
    return ns >= 0 if conv is Convention.KERNEL_PLUS else ns > 0


def in_minus(ns) -> np.ndarray:
    return np.asarray(ns) < 0


def epsilon_sign(d: int, convention: Convention | None = None) -> BlockBandOperator:
    """Sign of ``D_0``: ``+1`` on ``H+``, ``-1`` on ``H-`` (kernel handled by the convention)."""
    conv = Convention(convention or current_settings().convention)
    return diagonal_operator(
        lambda ns: in_plus(ns, conv).astype(float) - in_minus(ns).astype(float),
        RayExpansion.power(0.0, 1.0), RayExpansion.power(0.0, -1.0), d, "eps")


def shift_operator(s: int, d: int, matrix=None) -> BlockBandOperator:
    """Multiplication by ``e^{i s t}`` (tensored with ``matrix``, default identity)."""
    return multiplication_operator({s: np.eye(d) if matrix is None else matrix}, d)


def multiplication_operator(coeffs: Mapping[int, object], d: int, label: str = "") -> BlockBandOperator:
    """Multiplication by ``sum_k C_k e^{ikt}``; scalars are promoted to ``C_k Id``."""
    radius = current_settings().head_radius
    bands = {}
    for k, c in coeffs.items():
        c = np.asarray(c, dtype=complex)
        mat = c * np.eye(d) if c.ndim == 0 else c
        if mat.shape != (d, d):
            raise ModeError(f"coefficient for band {k} has shape {mat.shape}, expected {(d, d)}")
        ray = RayExpansion.power(0.0, mat)
        head = np.broadcast_to(mat, (2 * radius + 1, d, d)).copy()
        bands[int(k)] = BandEntryExpansion(head, ray, ray)
    return BlockBandOperator(d, bands, label or "M")


def weight_power(weight: DiagonalWeight, s: float, d: int) -> BlockBandOperator:
    """Diagonal ``mu_n^s``."""
    depth = current_settings().depth
    return diagonal_operator(lambda ns: weight.eigenvalues(ns) ** s,
                             weight.power_expansion(s, 1, depth), weight.power_expansion(s, -1, depth),
                             d, f"({weight.name})^{s:g}")


def abs_dirac_power(beta: float, d: int) -> BlockBandOperator:
    """``|D_0 + P|^beta``: ``|n|^beta`` off the kernel and ``1`` at ``n = 0``."""
    return weight_power(abs_dirac_weight(), beta, d).with_label(f"|D+P|^{beta:g}")


def log_weight(weight: DiagonalWeight, d: int) -> BlockBandOperator:
    """Diagonal ``log mu_n`` (carries one log power on each ray)."""
    return diagonal_operator(lambda ns: np.log(weight.eigenvalues(ns)),
                             weight.log_expansion(1), weight.log_expansion(-1), d, f"log({weight.name})")


def log_ratio(weight1: DiagonalWeight, weight2: DiagonalWeight, d: int) -> BlockBandOperator:
    """Diagonal ``log(mu1_n / mu2_n)``; log-free when the orders agree."""
    if abs(weight1.order - weight2.order) > 1e-12:
        raise ModeError("log_ratio needs weights of equal order")
    return diagonal_operator(
        lambda ns: np.log(weight1.eigenvalues(ns)) - np.log(weight2.eigenvalues(ns)),
        weight1.log_plus - weight2.log_plus, weight1.log_minus - weight2.log_minus, d,
        f"log({weight1.name}/{weight2.name})")


def band_multiplier(weight: DiagonalWeight, k: int) -> tuple[Callable, RayExpansion, RayExpansion]:
    """``g_k(n) = log mu_{n+k} - log mu_n`` as exact function plus pure-power ray expansions."""
    rays = []
    for ray in (1, -1):
        full = weight.log_expansion(ray)
        rays.append(full.shift(ray * k, LOG_SERIES_TERMS) - full)
    if any(r.max_log_power for r in rays):
        raise ModeError("log differences failed to cancel")

    def head(ns):
        return np.log(weight.eigenvalues(ns + k)) - np.log(weight.eigenvalues(ns))

    return head, rays[0], rays[1]


def log_commutator(weight: DiagonalWeight, a: BlockBandOperator) -> BlockBandOperator:
    """``[log Q, A]`` with entries ``(log mu_{n+k} - log mu_n) A(k, n)`` in pure powers."""
    settings = current_settings()
    ns = _ns(settings.head_radius)
    bands = {}
    for k, band in a.bands.items():
        if k == 0:
            continue
        head_fn, gp, gm = band_multiplier(weight, k)
        head = head_fn(ns)[:, None, None] * band.values(ns)
        bands[k] = BandEntryExpansion(head, gp.mul(band.plus, settings.depth), gm.mul(band.minus, settings.depth))
    return BlockBandOperator(a.d, bands, f"[log {weight.name}, {a.label}]")


# ---------------------------------------------------------------------------
# Algebra


def _combine(bands_list, d: int) -> dict[int, BandEntryExpansion]:
    """Sum several ``{k: (head, plus, minus)}`` contributions band-wise."""
    out: dict[int, list] = {}
    for k, (head, plus, minus) in bands_list:
        if k in out:
            h, p, m = out[k]
            out[k] = [h + head, p + plus, m + minus]
        else:
            out[k] = [head, plus, minus]
    return {k: BandEntryExpansion(h, p, m) for k, (h, p, m) in out.items()}


def add(a: BlockBandOperator, b: BlockBandOperator) -> BlockBandOperator:
    if a.d != b.d:
        raise ModeError("cannot add operators with different block sizes")
    radius = max([current_settings().head_radius] + [band.radius for band in a.bands.values()]
                 + [band.radius for band in b.bands.values()])
    ns = _ns(radius)
    depth = current_settings().depth
    contribs = []
    for op in (a, b):
        for k, band in op.bands.items():
            contribs.append((k, (band.values(ns), band.plus, band.minus)))
    bands = _combine(contribs, a.d)
    # cap expansion length relative to the larger operand order
    order = max(a.order, b.order)
    if np.isfinite(order):
        cap = order - depth - 1
        bands = {k: BandEntryExpansion(bd.head, _cap(bd.plus, cap), _cap(bd.minus, cap))
                 for k, bd in bands.items()}
    return BlockBandOperator(a.d, bands)


def _cap(ray: RayExpansion, cap: float) -> RayExpansion:
    lowest = min((f.top - f.length + 1 for f in ray.families), default=math.inf)
    return ray.truncated(cap) if lowest <= cap else ray


def scale(a: BlockBandOperator, c) -> BlockBandOperator:
    c = complex(c)
    bands = {k: BandEntryExpansion(c * b.head, b.plus.scale(c), b.minus.scale(c)) for k, b in a.bands.items()}
    return BlockBandOperator(a.d, bands, a.label)


def compose(a: BlockBandOperator, b: BlockBandOperator) -> BlockBandOperator:
    """Operator product: ``entry_AB(k, n) = sum_{k1 + k2 = k} A(k1, n + k2) B(k2, n)``."""
    if a.d != b.d:
        raise ModeError("cannot compose operators with different block sizes")
    settings = current_settings()
    ns = _ns(settings.head_radius)
    depth = settings.depth
    contribs = []
    shifted: dict[tuple[int, int], tuple[RayExpansion, RayExpansion]] = {}
    for k2, bb in b.bands.items():
        b_vals = bb.values(ns)
        for k1, ab in a.bands.items():
            head = np.matmul(ab.values(ns + k2), b_vals)
            key = (k1, k2)
            if key not in shifted:
                shifted[key] = (ab.plus.shift(k2, depth), ab.minus.shift(-k2, depth))
            sp, sm = shifted[key]
            contribs.append((k1 + k2, (head, sp.mul(bb.plus, depth), sm.mul(bb.minus, depth))))
    return BlockBandOperator(a.d, _combine(contribs, a.d))


def commutator(a: BlockBandOperator, b: BlockBandOperator) -> BlockBandOperator:
    return compose(a, b) - compose(b, a)


def anticommutator(a: BlockBandOperator, b: BlockBandOperator) -> BlockBandOperator:
    return compose(a, b) + compose(b, a)


def adjoint(a: BlockBandOperator) -> BlockBandOperator:
    """Hilbert adjoint: ``entry_{A*}(-k, n + k) = entry_A(k, n)^H``."""
    settings = current_settings()
    ns = _ns(settings.head_radius)
    bands = {}
    for k, band in a.bands.items():
        head = np.conj(band.values(ns - k).transpose(0, 2, 1))
        plus = band.plus.shift(-k, settings.depth).conj_transpose()
        minus = band.minus.shift(k, settings.depth).conj_transpose()
        bands[-k] = BandEntryExpansion(head, plus, minus)
    return BlockBandOperator(a.d, bands, f"{a.label}*" if a.label else "")


QUADRANTS = ("++", "+-", "-+", "--")


def block(a: BlockBandOperator, quadrant: str, convention: Convention | None = None) -> BlockBandOperator:
    """Polarization block ``A_{xy}`` mapping ``H_y`` into ``H_x``.

    ``A_{+-}(k, n) = A(k, n)`` when ``n`` lies in ``H-`` and ``n + k`` in ``H+``.
    Off-diagonal blocks of banded operators are finite rank, so their ray
    expansions vanish identically.
    """
    if quadrant not in QUADRANTS:
        raise ModeError(f"unknown quadrant {quadrant!r}")
    conv = Convention(convention or current_settings().convention)
    target, source = quadrant
    member = {"+": lambda ns: in_plus(ns, conv), "-": in_minus}
    bands = {}
    for k, band in a.bands.items():
        ns = _ns(band.radius)
        mask = member[source](ns) & member[target](ns + k)
        head = band.head * mask[:, None, None]
        zero = RayExpansion.zero(a.d)
        plus = band.plus if quadrant == "++" else zero
        minus = band.minus if quadrant == "--" else zero
        bands[k] = BandEntryExpansion(head, plus, minus)
    return BlockBandOperator(a.d, bands, f"({a.label}){quadrant}")


def fibre_trace(a: BlockBandOperator) -> BlockBandOperator:
    """Blockwise trace over ``C^d``; returns a scalar (``d = 1``) operator."""
    bands = {k: BandEntryExpansion(np.trace(b.head, axis1=1, axis2=2)[:, None, None],
                                   b.plus.fibre_trace(), b.minus.fibre_trace())
             for k, b in a.bands.items()}
    return BlockBandOperator(1, bands, f"tr_fibre({a.label})")


def tensor(a: BlockBandOperator, matrix) -> BlockBandOperator:
    """Scalar operator tensored with a constant ``d x d`` matrix."""
    if a.d != 1:
        raise ModeError("tensor expects a scalar operator")
    m = np.asarray(matrix, dtype=complex)
    bands = {k: BandEntryExpansion(b.head[:, 0, 0][:, None, None] * m[None], b.plus.kron(m), b.minus.kron(m))
             for k, b in a.bands.items()}
    return BlockBandOperator(m.shape[0], bands, a.label)


def max_entry_difference(a: BlockBandOperator, b: BlockBandOperator, radius: int | None = None) -> float:
    """Max blockwise difference over bands and ``|n| <= radius`` (head region by default)."""
    radius = current_settings().head_radius if radius is None else radius
    ns = _ns(radius)
    diff = 0.0
    for k in set(a.bands) | set(b.bands):
        diff = max(diff, float(np.max(np.abs(a.values(k, ns) - b.values(k, ns)))))
    return diff


def max_expansion_difference(a: BlockBandOperator, b: BlockBandOperator) -> float:
    diff = 0.0
    for k in set(a.bands) | set(b.bands):
        ba, bb = a.band(k), b.band(k)
        diff = max(diff, ba.plus.max_abs_diff(bb.plus), ba.minus.max_abs_diff(bb.minus))
    return diff


def consistency_check(a: BlockBandOperator) -> float:
    """Largest head-versus-expansion mismatch at the head boundary, over all bands."""
    return max((b.consistency() for b in a.bands.values()), default=0.0)


def truncate(a: BlockBandOperator, cutoff: int) -> np.ndarray:
    """Dense matrix on modes ``|n| <= cutoff``; row/column index ``(n + cutoff) d + i``."""
    if cutoff < 0:
        raise ModeError("truncation cutoff must be non-negative")
    size = 2 * cutoff + 1
    d = a.d
    out = np.zeros((size, d, size, d), dtype=complex)
    ns = _ns(cutoff)
    for k in a.bands:
        valid = np.abs(ns + k) <= cutoff
        cols = ns[valid]
        out[cols + k + cutoff, :, cols + cutoff, :] = a.values(k, cols)
    return out.reshape(size * d, size * d)


def export_truncation_csv(a: BlockBandOperator, cutoff: int, path) -> None:
    """Write the truncated matrix as CSV with ``re+imj`` complex entries."""
    mat = truncate(a, cutoff)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in mat:
            writer.writerow([repr(complex(x)) for x in row])


def _tail_sum(ray: RayExpansion, start: int) -> complex:
    """``sum_{x >= start} f(x)`` for a convergent pure-power expansion, via Hurwitz zeta."""
    total = 0j
    for expo, p, c in ray.terms():
        if expo >= -1:
            raise ModeError("tail sum diverges")
        val = c[0, 0]
        total += val * (hurwitz_zeta(-expo, start) if p == 0 else -hurwitz_zeta_deriv(-expo, start))
    return total


def hs_norm_squared(a: BlockBandOperator, metric: np.ndarray | None = None) -> float:
    """Squared Hilbert-Schmidt norm; ``math.inf`` when the entries are not square-summable.

    Finite-rank operators are summed exactly.  ``metric`` is the Gram matrix
    of the fibre inner product (Frobenius norm when omitted).
    """
    g = np.eye(a.d) if metric is None else np.asarray(metric, dtype=float)
    ginv = np.linalg.inv(g)

    def sq(blocks):
        return np.einsum("nij,jk,nkl,li->n", np.conj(blocks.transpose(0, 2, 1)), g, blocks, ginv).real

    if a.is_finite_rank:
        return float(math.fsum(float(np.sum(sq(b.head))) for b in a.bands.values()))
    if a.order >= -0.5:
        return math.inf
    split = current_settings().trace_split
    depth = current_settings().depth
    total = 0.0
    ns = _ns(split)
    for band in a.bands.values():
        total += float(np.sum(sq(band.values(ns))))
        for ray in (band.plus, band.minus):
            h = ray.conj_transpose().scale(g).mul(ray.scale(ginv), depth)
            total += _tail_sum(h.fibre_trace(), split + 1).real
    return total
