"""Finite-dimensional Lie algebras and loop algebras of Fourier polynomials.

A loop ``X = sum_n a_n z^n`` with ``z = e^{it}`` is stored as a map from the
mode ``n`` to a complex coefficient vector in the basis of the algebra.  The
circle average is normalized by ``1/2pi`` so that ``z^n`` is orthonormal.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

_JACOBI_TOL = 1e-10


class AlgebraError(ValueError):
    """Raised for malformed structure constants or mismatched operands."""


@dataclass(frozen=True, eq=False)
class LieAlgebraData:
    """Structure constants ``[e_i, e_j] = sum_k c[i, j, k] e_k``.

    The constructor validates antisymmetry, the Jacobi identity and that the
    Killing form is negative semi-definite (compact type, with abelian
    summands allowed so that abelian test algebras are admissible).
    """

    structure_constants: np.ndarray
    basis_labels: tuple[str, ...] = ()
    name: str = "custom"
    ad_matrices: np.ndarray = field(init=False, repr=False)
    killing: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        c = np.asarray(self.structure_constants, dtype=float)
        if c.ndim != 3 or not (c.shape[0] == c.shape[1] == c.shape[2]) or c.shape[0] == 0:
            raise AlgebraError(f"structure constants must have shape (d, d, d), got {c.shape}")
        d = c.shape[0]
        if not np.allclose(c, -c.transpose(1, 0, 2), atol=_JACOBI_TOL):
            raise AlgebraError("structure constants are not antisymmetric in (i, j)")
        # ad_{e_i} has matrix entries (ad_i)[k, j] = c[i, j, k]
        ad = np.ascontiguousarray(c.transpose(0, 2, 1))
        # Jacobi: [ad_i, ad_j] = sum_k c[i,j,k] ad_k
        lhs = np.einsum("iab,jbc->ijac", ad, ad) - np.einsum("jab,ibc->ijac", ad, ad)
        rhs = np.einsum("ijk,kac->ijac", c, ad)
        if np.max(np.abs(lhs - rhs), initial=0.0) > _JACOBI_TOL:
            raise AlgebraError("structure constants violate the Jacobi identity")
        killing = np.einsum("iab,jba->ij", ad, ad)
        eig = np.linalg.eigvalsh(0.5 * (killing + killing.T))
        if np.max(eig) > _JACOBI_TOL * max(1.0, np.max(np.abs(eig))):
            raise AlgebraError("Killing form is not negative semi-definite (non-compact type)")
        labels = tuple(self.basis_labels) or tuple(f"e{i + 1}" for i in range(d))
        if len(labels) != d:
            raise AlgebraError("basis_labels length does not match the dimension")
        object.__setattr__(self, "structure_constants", c)
        object.__setattr__(self, "basis_labels", labels)
        object.__setattr__(self, "ad_matrices", ad)
        object.__setattr__(self, "killing", killing)

    @property
    def dim(self) -> int:
        return self.structure_constants.shape[0]

    @property
    def metric(self) -> np.ndarray:
        """Gram matrix of the minus-Killing inner product."""
        return -self.killing

    def basis_vector(self, label: str | int) -> np.ndarray:
        idx = label if isinstance(label, int) else self.basis_labels.index(label)
        v = np.zeros(self.dim, dtype=complex)
        v[idx] = 1.0
        return v

    def ad(self, a: Sequence[complex]) -> np.ndarray:
        """Matrix of ``ad_a`` acting on coefficient vectors."""
        a = self._vector(a)
        return np.tensordot(a, self.ad_matrices, axes=1)

    def bracket(self, a, b) -> np.ndarray:
        return self.ad(a) @ self._vector(b)

    def _vector(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=complex)
        if a.shape != (self.dim,):
            raise AlgebraError(f"expected a coefficient vector of length {self.dim}, got shape {a.shape}")
        return a

    @classmethod
    def from_entries(cls, dim: int, entries, name: str = "custom", labels=()) -> "LieAlgebraData":
        """Build from sparse ``(i, j, k, value)`` tuples, 0-based, unlisted entries zero."""
        if not isinstance(dim, int) or dim <= 0:
            raise AlgebraError("dim must be a positive integer")
        c = np.zeros((dim, dim, dim))
        for entry in entries:
            if len(entry) != 4:
                raise AlgebraError(f"entry {entry!r} is not of the form (i, j, k, value)")
            i, j, k, value = entry
            for idx in (i, j, k):
                if not isinstance(idx, int) or not 0 <= idx < dim:
                    raise AlgebraError(f"index {idx!r} out of range in entry {entry!r}")
            c[i, j, k] = float(value)
        return cls(c, tuple(labels), name)

    @classmethod
    def from_file(cls, path: str | Path) -> "LieAlgebraData":
        """Load a JSON structure-constant file ``{"dim": d, "entries": [[i, j, k, v], ...]}``."""
        path = Path(path)
        try:
            payload = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise AlgebraError(f"cannot read structure-constant file {path}: {exc}") from exc
        if not isinstance(payload, dict) or "dim" not in payload or "entries" not in payload:
            raise AlgebraError("structure-constant file needs 'dim' and 'entries' fields")
        return cls.from_entries(payload["dim"], payload["entries"], name=payload.get("name", path.stem),
                                labels=payload.get("labels", ()))

    def to_json(self) -> str:
        d = self.dim
        entries = [[i, j, k, float(self.structure_constants[i, j, k])]
                   for i in range(d) for j in range(d) for k in range(d)
                   if self.structure_constants[i, j, k] != 0]
        return json.dumps({"dim": d, "name": self.name, "entries": entries})


def su2() -> LieAlgebraData:
    """su(2) in the basis with ``[e_i, e_j] = sum_k eps_{ijk} e_k``."""
    c = np.zeros((3, 3, 3))
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        c[i, j, k] = 1.0
        c[j, i, k] = -1.0
    return LieAlgebraData(c, ("e1", "e2", "e3"), "su2")


def so_n(n: int) -> LieAlgebraData:
    """so(n) in the basis ``E_ab = e_a e_b^T - e_b e_a^T`` for ``a < b``."""
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    mats = []
    for a, b in pairs:
        m = np.zeros((n, n))
        m[a, b], m[b, a] = 1.0, -1.0
        mats.append(m)
    basis = np.array([m.ravel() for m in mats]).T
    d = len(pairs)
    c = np.zeros((d, d, d))
    for i in range(d):
        for j in range(d):
            br = mats[i] @ mats[j] - mats[j] @ mats[i]
            coeffs, *_ = np.linalg.lstsq(basis, br.ravel(), rcond=None)
            c[i, j] = np.round(coeffs, 12)
    labels = tuple(f"E{a + 1}{b + 1}" for a, b in pairs)
    return LieAlgebraData(c, labels, f"so{n}")


def abelian(d: int) -> LieAlgebraData:
    """The abelian Lie algebra of dimension ``d`` (all brackets zero)."""
    return LieAlgebraData(np.zeros((d, d, d)), name=f"abelian{d}")


def killing_inner(algebra: LieAlgebraData, a, b) -> complex:
    """Minus-Killing inner product ``<a, b> = -trace(ad_a ad_b)`` (bilinear)."""
    a = algebra._vector(a)
    b = algebra._vector(b)
    return complex(-(a @ algebra.killing @ b))


@dataclass(frozen=True, eq=False)
class LoopElement:
    """Finite Fourier series ``sum_n a_n z^n`` with Lie-algebra coefficients."""

    algebra: LieAlgebraData
    coeffs: Mapping[int, np.ndarray]

    def __post_init__(self):
        clean = {}
        for n, a in self.coeffs.items():
            if not isinstance(n, (int, np.integer)):
                raise AlgebraError(f"loop modes must be integers, got {n!r}")
            vec = self.algebra._vector(a).copy()
            vec.setflags(write=False)
            if np.any(vec != 0):
                clean[int(n)] = vec
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    @classmethod
    def monomial(cls, algebra: LieAlgebraData, n: int, a, scale: complex = 1.0) -> "LoopElement":
        vec = algebra.basis_vector(a) if isinstance(a, (str, int)) else np.asarray(a, dtype=complex)
        return cls(algebra, {n: scale * vec})

    @classmethod
    def zero(cls, algebra: LieAlgebraData) -> "LoopElement":
        return cls(algebra, {})

    @property
    def degree(self) -> int:
        return max((abs(n) for n in self.coeffs), default=0)

    @property
    def modes(self) -> list[int]:
        return list(self.coeffs)

    def coefficient(self, n: int) -> np.ndarray:
        return self.coeffs.get(n, np.zeros(self.algebra.dim, dtype=complex))

    def _check(self, other: "LoopElement"):
        if other.algebra is not self.algebra:
            raise AlgebraError("loop elements belong to different algebras")

    def __add__(self, other: "LoopElement") -> "LoopElement":
        self._check(other)
        out = {n: a.copy() for n, a in self.coeffs.items()}
        for n, b in other.coeffs.items():
            out[n] = out.get(n, 0) + b
        return LoopElement(self.algebra, out)

    def __sub__(self, other: "LoopElement") -> "LoopElement":
        return self + (-1.0) * other

    def __rmul__(self, scalar: complex) -> "LoopElement":
        return LoopElement(self.algebra, {n: scalar * a for n, a in self.coeffs.items()})

    def __neg__(self) -> "LoopElement":
        return (-1.0) * self

    def conj(self) -> "LoopElement":
        """Pointwise complex conjugate: ``sum conj(a_n) z^{-n}``."""
        return LoopElement(self.algebra, {-n: np.conj(a) for n, a in self.coeffs.items()})

    def map_modes(self, factor) -> "LoopElement":
        """Scale each coefficient ``a_n`` by ``factor(n)``."""
        return LoopElement(self.algebra, {n: factor(n) * a for n, a in self.coeffs.items()})

    def project(self, positive: bool, include_zero: bool = True) -> "LoopElement":
        keep = (lambda n: n > 0 or (include_zero and n == 0)) if positive else (lambda n: n < 0)
        return LoopElement(self.algebra, {n: a for n, a in self.coeffs.items() if keep(n)})

    def is_close(self, other: "LoopElement", tol: float = 1e-12) -> bool:
        diff = self - other
        return all(np.max(np.abs(a)) <= tol for a in diff.coeffs.values())

    def __repr__(self) -> str:
        terms = []
        for n, a in self.coeffs.items():
            terms.append(f"z^{n}*{np.array2string(a, precision=4)}")
        return f"LoopElement({' + '.join(terms) or '0'})"


def loop_bracket(x: LoopElement, y: LoopElement) -> LoopElement:
    """Pointwise bracket: ``([X, Y])_n = sum_{p + q = n} [a_p, b_q]``."""
    x._check(y)
    alg = x.algebra
    out: dict[int, np.ndarray] = {}
    for p, a in x.coeffs.items():
        ad_a = alg.ad(a)
        for q, b in y.coeffs.items():
            out[p + q] = out.get(p + q, 0) + ad_a @ b
    return LoopElement(alg, out)


def symplectic_form(x: LoopElement, y: LoopElement) -> complex:
    """``omega(X, Y) = (1/2pi) int <X'(t), Y(t)> dt = sum_n (i n) <a_n, b_{-n}>``."""
    x._check(y)
    total = 0j
    for n, a in x.coeffs.items():
        if n != 0 and -n in y.coeffs:
            total += 1j * n * killing_inner(x.algebra, a, y.coeffs[-n])
    return total


def loop_inner(x: LoopElement, y: LoopElement) -> complex:
    """Hermitian ``L^2`` pairing ``sum_n <conj(a_n), b_n>``."""
    x._check(y)
    return sum((killing_inner(x.algebra, np.conj(a), y.coefficient(n)) for n, a in x.coeffs.items()), 0j)


def random_loop(algebra: LieAlgebraData, degree: int, rng: np.random.Generator,
                real: bool = False, integer: bool = False) -> LoopElement:
    """Random Fourier polynomial of the given degree.

    ``integer=True`` draws small integer coefficients so that brackets are
    exact in floating point; ``real=True`` imposes ``a_{-n} = conj(a_n)``.
    """
    coeffs: dict[int, np.ndarray] = {}
    for n in range(-degree, degree + 1):
        if real and n < 0:
            continue
        if integer:
            vec = rng.integers(-3, 4, size=algebra.dim) + 1j * rng.integers(-3, 4, size=algebra.dim)
        else:
            vec = rng.normal(size=algebra.dim) + 1j * rng.normal(size=algebra.dim)
        if real and n == 0:
            vec = vec.real.astype(complex)
        coeffs[n] = vec
        if real and n > 0:
            coeffs[-n] = np.conj(vec)
    return LoopElement(algebra, coeffs)


def ad_operator(x: LoopElement):
    """Band operator of ``ad_X`` on loops: band ``k`` carries the constant block ``ad_{a_k}``."""
    from .mode_ops import multiplication_operator

    alg = x.algebra
    return multiplication_operator({n: alg.ad(a) for n, a in x.coeffs.items()}, alg.dim, "ad")
