"""One-sided asymptotic expansions in ``x = |n|`` with matrix coefficients.

A :class:`RayExpansion` represents

    f(x) = sum_families sum_j C_j x^(top - j) (log x)^p  +  O(x^rem)

as ``x -> +inf``.  Families whose leading exponents differ by a non-integer
are kept apart, so operators mixing e.g. orders ``0`` and ``-2s`` are exact
bookkeeping rather than approximations.  ``rem = -inf`` marks an expansion
that is exact (no neglected tail).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EXP_TOL = 1e-9
NEG_INF = -math.inf


def _frac_key(top: float) -> float:
    return round(top - math.floor(top + EXP_TOL), 8) % 1.0


@dataclass(frozen=True, eq=False)
class Family:
    """Coefficients ``coef[j]`` of ``x^(top - j) (log x)^log_power``."""

    top: float
    log_power: int
    coef: np.ndarray  # shape (L, d, d), complex

    @property
    def length(self) -> int:
        return self.coef.shape[0]

    def exponents(self) -> np.ndarray:
        return self.top - np.arange(self.length)


def binom_general(x: float, i: int) -> float:
    out = 1.0
    for l in range(i):
        out *= (x - l) / (l + 1)
    return out


def _trim(top: float, p: int, coef: np.ndarray, rem: float) -> Family | None:
    if np.isfinite(rem):
        keep = int(math.floor(top - rem - EXP_TOL)) + 1
        if keep <= 0:
            return None
        coef = coef[:keep]
    nz = np.flatnonzero(np.any(coef.reshape(coef.shape[0], -1) != 0, axis=1))
    if nz.size == 0:
        return None
    first, last = nz[0], nz[-1]
    return Family(top - first, p, np.ascontiguousarray(coef[first:last + 1]))


def _merge(families, rem: float, d: int) -> tuple[Family, ...]:
    groups: dict[tuple[int, float], list[Family]] = {}
    for fam in families:
        if fam is None:
            continue
        groups.setdefault((fam.log_power, _frac_key(fam.top)), []).append(fam)
    out = []
    for (p, _), fams in groups.items():
        top = max(f.top for f in fams)
        length = max(int(round(top - f.top)) + f.length for f in fams)
        coef = np.zeros((length, d, d), dtype=complex)
        for f in fams:
            off = int(round(top - f.top))
            coef[off:off + f.length] += f.coef
        fam = _trim(top, p, coef, rem)
        if fam is not None:
            out.append(fam)
    out.sort(key=lambda f: (-f.top, -f.log_power))
    return tuple(out)


def _conv(a: np.ndarray, b: np.ndarray, length: int) -> np.ndarray:
    d = max(a.shape[1], b.shape[1])
    out = np.zeros((length, d, d), dtype=complex)
    matmul = a.shape[1] == b.shape[1]
    for i in range(min(a.shape[0], length)):
        jmax = min(b.shape[0], length - i)
        if jmax <= 0:
            break
        if matmul:
            out[i:i + jmax] += a[i] @ b[:jmax]
        else:
            out[i:i + jmax] += a[i] * b[:jmax]
    return out


def _log_shift_series(s: float, length: int) -> np.ndarray:
    """Coefficients of ``log(1 + s/x) = sum_{l>=1} (-1)^{l+1} s^l / (l x^l)``, index = power of 1/x."""
    series = np.zeros(length)
    for l in range(1, length):
        series[l] = (-1) ** (l + 1) * s ** l / l
    return series


@dataclass(frozen=True, eq=False)
class RayExpansion:
    """Sum of families plus a remainder exponent; see the module docstring."""

    families: tuple[Family, ...]
    rem: float
    d: int

    @staticmethod
    def zero(d: int, rem: float = NEG_INF) -> "RayExpansion":
        return RayExpansion((), rem, d)

    @staticmethod
    def power(top: float, coef, log_power: int = 0, d: int | None = None) -> "RayExpansion":
        """Exact single-term expansion ``coef x^top (log x)^p``; ``coef`` may be a list of terms."""
        c = np.asarray(coef, dtype=complex)
        if c.ndim == 0:
            c = c.reshape(1, 1, 1)
        elif c.ndim == 2:
            c = c[None]
        elif c.ndim == 1:
            c = c.reshape(-1, 1, 1)
        dd = c.shape[1] if d is None else d
        if c.shape[1] != dd:
            c = c * np.eye(dd)
        return RayExpansion(_merge([Family(float(top), log_power, c)], NEG_INF, dd), NEG_INF, dd)

    @staticmethod
    def from_families(families, rem: float, d: int) -> "RayExpansion":
        return RayExpansion(_merge(families, rem, d), rem, d)

    @property
    def is_zero(self) -> bool:
        return not self.families

    @property
    def order(self) -> float:
        return max((f.top for f in self.families), default=NEG_INF)

    @property
    def max_log_power(self) -> int:
        return max((f.log_power for f in self.families), default=0)

    def truncated(self, rem: float) -> "RayExpansion":
        rem = max(rem, self.rem)
        return RayExpansion(_merge(self.families, rem, self.d), rem, self.d)

    def __add__(self, other: "RayExpansion") -> "RayExpansion":
        d = max(self.d, other.d)
        rem = max(self.rem, other.rem)
        fams = [self._lift(f, d) for f in self.families] + [other._lift(f, d) for f in other.families]
        return RayExpansion(_merge(fams, rem, d), rem, d)

    def _lift(self, fam: Family, d: int) -> Family:
        if fam.coef.shape[1] == d:
            return fam
        return Family(fam.top, fam.log_power, fam.coef * np.eye(d))

    def scale(self, c) -> "RayExpansion":
        c = np.asarray(c, dtype=complex)
        if c.ndim == 0:
            fams = [Family(f.top, f.log_power, c * f.coef) for f in self.families]
            return RayExpansion(_merge(fams, self.rem, self.d), self.rem, self.d)
        fams = [Family(f.top, f.log_power, f.coef @ c if self.d == c.shape[0] else f.coef * c)
                for f in self.families]
        d = c.shape[0]
        return RayExpansion(_merge(fams, self.rem, d), self.rem, d)

    def left_scale(self, c) -> "RayExpansion":
        c = np.asarray(c, dtype=complex)
        fams = [Family(f.top, f.log_power, c @ f.coef if self.d == c.shape[0] else c * f.coef)
                for f in self.families]
        d = c.shape[0]
        return RayExpansion(_merge(fams, self.rem, d), self.rem, d)

    def __neg__(self) -> "RayExpansion":
        return self.scale(-1.0)

    def __sub__(self, other: "RayExpansion") -> "RayExpansion":
        return self + (-other)

    def conj_transpose(self) -> "RayExpansion":
        fams = [Family(f.top, f.log_power, np.conj(f.coef.transpose(0, 2, 1))) for f in self.families]
        return RayExpansion(tuple(fams), self.rem, self.d)

    def fibre_trace(self) -> "RayExpansion":
        fams = [Family(f.top, f.log_power, np.trace(f.coef, axis1=1, axis2=2).reshape(-1, 1, 1))
                for f in self.families]
        return RayExpansion(_merge(fams, self.rem, 1), self.rem, 1)

    def kron(self, c: np.ndarray) -> "RayExpansion":
        """Tensor a scalar expansion with a fixed matrix."""
        if self.d != 1:
            raise ValueError("kron expects a scalar expansion")
        c = np.asarray(c, dtype=complex)
        fams = [Family(f.top, f.log_power, f.coef[:, 0, 0][:, None, None] * c[None]) for f in self.families]
        return RayExpansion(_merge(fams, self.rem, c.shape[0]), self.rem, c.shape[0])

    def mul(self, other: "RayExpansion", depth: int) -> "RayExpansion":
        """Product of expansions, truncated ``depth`` powers below the leading order."""
        d = max(self.d, other.d)
        oa, ob = self.order, other.order
        rem = max(_add(oa, other.rem), _add(ob, self.rem))
        cap = _add(_add(oa, ob), -depth - 1)
        lowest = min((fa.top + fb.top - fa.length - fb.length + 2
                      for fa in self.families for fb in other.families), default=math.inf)
        if lowest <= cap + EXP_TOL:
            rem = max(rem, cap)
        fams = []
        for fa in self.families:
            for fb in other.families:
                top = fa.top + fb.top
                if np.isfinite(rem):
                    length = int(math.floor(top - rem - EXP_TOL)) + 1
                    if length <= 0:
                        continue
                    length = min(length, fa.length + fb.length - 1)
                else:
                    length = fa.length + fb.length - 1
                fams.append(Family(top, fa.log_power + fb.log_power, _conv(fa.coef, fb.coef, length)))
        return RayExpansion(_merge(fams, rem, d), rem, d)

    def shift(self, s: float, depth: int) -> "RayExpansion":
        """Re-expand ``f(x + s)`` in powers of ``x``."""
        if s == 0 or self.is_zero:
            return self
        exact = self.rem == NEG_INF and all(
            fam.log_power == 0 and all(float(e).is_integer() and e >= 0 for e in fam.exponents())
            for fam in self.families)
        rem = NEG_INF if exact else max(self.rem, self.order - depth - 1)
        fams = []
        for fam in self.families:
            if exact:
                length = int(fam.top) + 1
            else:
                length = int(math.floor(fam.top - rem - EXP_TOL)) + 1
                if length <= 0:
                    continue
            tmat = np.zeros((length, fam.length))
            for j in range(min(fam.length, length)):
                beta = fam.top - j
                for i in range(length - j):
                    tmat[j + i, j] = binom_general(beta, i) * s ** i
            base = np.einsum("mj,jab->mab", tmat, fam.coef)
            p = fam.log_power
            if p == 0:
                fams.append(Family(fam.top, 0, base))
                continue
            log_series = _log_shift_series(s, length)
            power = np.zeros(length)
            power[0] = 1.0
            for r in range(p + 1):
                if r > 0:
                    power = np.convolve(power, log_series)[:length]
                coef = math.comb(p, r) * _conv(power.reshape(-1, 1, 1), base, length)
                fams.append(Family(fam.top, p - r, coef))
        return RayExpansion(_merge(fams, rem, self.d), rem, self.d)

    def evaluate(self, x) -> np.ndarray:
        """Evaluate at positive ``x`` (array); returns shape ``(len(x), d, d)``."""
        x = np.asarray(x, dtype=float)
        out = np.zeros((x.size, self.d, self.d), dtype=complex)
        if x.size == 0:
            return out
        lx = np.log(x)
        for fam in self.families:
            powers = x[:, None] ** fam.exponents()[None, :]
            if fam.log_power:
                powers = powers * lx[:, None] ** fam.log_power
            out += np.einsum("nj,jab->nab", powers, fam.coef)
        return out

    def coefficient(self, exponent: float, log_power: int = 0) -> np.ndarray:
        """Coefficient matrix of ``x^exponent (log x)^log_power`` (zero if absent)."""
        for fam in self.families:
            if fam.log_power != log_power:
                continue
            j = fam.top - exponent
            jr = round(j)
            if abs(j - jr) < EXP_TOL and 0 <= jr < fam.length:
                return fam.coef[jr]
        return np.zeros((self.d, self.d), dtype=complex)

    def terms(self):
        """Iterate ``(exponent, log_power, coefficient)`` over stored nonzero terms."""
        for fam in self.families:
            for j in range(fam.length):
                if np.any(fam.coef[j] != 0):
                    yield fam.top - j, fam.log_power, fam.coef[j]

    def max_abs_diff(self, other: "RayExpansion") -> float:
        diff = self - other
        return max((float(np.max(np.abs(f.coef))) for f in diff.families), default=0.0)


def _add(a: float, b: float) -> float:
    if a == NEG_INF or b == NEG_INF:
        return NEG_INF
    return a + b


def series_log1p(a: np.ndarray) -> np.ndarray:
    """Power series of ``log(1 + a(u))`` for a series with ``a[0] == 0``."""
    n = a.size
    out = np.zeros(n, dtype=a.dtype)
    power = np.zeros(n, dtype=a.dtype)
    power[0] = 1.0
    for m in range(1, n):
        power = np.convolve(power, a)[:n]
        if not np.any(power):
            break
        out += (-1) ** (m + 1) * power / m
    return out


def series_exp(a: np.ndarray) -> np.ndarray:
    """Power series of ``exp(a(u))`` for a series with ``a[0] == 0``."""
    n = a.size
    out = np.zeros(n, dtype=a.dtype)
    out[0] = 1.0
    term = out.copy()
    for m in range(1, n):
        term = np.convolve(term, a)[:n] / m
        if not np.any(term):
            break
        out += term
    return out
