"""Left-invariant geometry of current groups and of the based loop group.

Everything is evaluated at the identity on Lie-algebra data.  A loop
``U = sum_k a_k z^k`` acts on loops through band operators whose band ``k``
carries ``ad_{a_k}`` times a scalar function of the source mode ``n``.

Two independent routes are provided:

* the band-expansion route (``theta_s``, ``curvature_s`` ... built from
  :mod:`mode_ops` compositions and traced with the zeta engine), and
* the closed-form route (:class:`ExactBands`), which evaluates the same
  operators entry by entry from explicit formulas in ``mu_n`` and sums their
  diagonals up to a mode cutoff, followed by Richardson extrapolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .cocycles import Cochain, coboundary, lambda_D, lambda_D_finite_rank, radul
from .lie_core import (AlgebraError, LieAlgebraData, LoopElement, ad_operator, loop_bracket,
                       su2, symplectic_form)
from .mode_ops import (BlockBandOperator, Convention, DiagonalWeight, ModeError, block, commutator,
                       compose, current_settings, fibre_trace, in_plus, laplacian_weight,
                       log_commutator, weight_power)
from .reg_traces import residue, weighted_trace

RICHARDSON_CUTOFFS = (128, 192, 256, 384, 512)


@dataclass(frozen=True)
class GeometryConfig:
    """Sobolev index ``s``, the weight ``Q0 + P`` defining the metric, and numerics."""

    algebra: LieAlgebraData = field(default_factory=su2)
    s: float = 0.5
    weight: DiagonalWeight = field(default_factory=laplacian_weight)
    truncation: int = 512
    tol: float = 1e-6

    def __post_init__(self):
        if not self.s > 0:
            raise ModeError("the Sobolev index s must be positive")

    @property
    def d(self) -> int:
        return self.algebra.dim

    def mu(self, ns) -> np.ndarray:
        return self.weight.eigenvalues(np.asarray(ns))


def _kahler(cfg: GeometryConfig):
    if abs(cfg.s - 0.5) > 1e-15:
        raise ModeError("the Kahler structure requires s = 1/2")


# ---------------------------------------------------------------------------
# Band-expansion route


def _scaled_loop(u: LoopElement, cfg: GeometryConfig, power: float) -> LoopElement:
    return u.map_modes(lambda k: float(cfg.mu([k])[0]) ** power)


def theta_s(u: LoopElement, cfg: GeometryConfig) -> BlockBandOperator:
    """Connection operator ``1/2 (ad_U + P^-s ad_U P^s - P^-s ad_{P^s U})`` with ``P = Q0 + P_ker``."""
    d = cfg.d
    p_plus = weight_power(cfg.weight, cfg.s, d)
    p_minus = weight_power(cfg.weight, -cfg.s, d)
    ad_u = ad_operator(u)
    ad_su = ad_operator(_scaled_loop(u, cfg, cfg.s))
    total = ad_u + compose(compose(p_minus, ad_u), p_plus) - compose(p_minus, ad_su)
    return (0.5 * total).with_label(f"theta^{cfg.s:g}")


def theta_prime(w: LoopElement, cfg: GeometryConfig) -> BlockBandOperator:
    """``Z -> theta_s(Z) W`` as a band operator: ``1/2 (-ad_W - P^-s ad_{P^s W} + P^-s ad_W P^s)``."""
    d = cfg.d
    p_plus = weight_power(cfg.weight, cfg.s, d)
    p_minus = weight_power(cfg.weight, -cfg.s, d)
    ad_w = ad_operator(w)
    ad_sw = ad_operator(_scaled_loop(w, cfg, cfg.s))
    total = -1.0 * ad_w - compose(p_minus, ad_sw) + compose(compose(p_minus, ad_w), p_plus)
    return (0.5 * total).with_label(f"theta'^{cfg.s:g}")


def theta_factor(cfg: GeometryConfig, k: int, ns) -> np.ndarray:
    """Scalar multiplier ``1/2 [1 + (mu_n / mu_{n+k})^s - (mu_k / mu_{n+k})^s]`` of ``ad_{a_k}``."""
    ns = np.asarray(ns)
    s = cfg.s
    mu_t = cfg.mu(ns + k)
    return 0.5 * (1.0 + (cfg.mu(ns) / mu_t) ** s - (float(cfg.mu([k])[0]) / mu_t) ** s)


def apply_theta(u: LoopElement, y: LoopElement, cfg: GeometryConfig) -> LoopElement:
    """``theta_s(U) Y`` evaluated mode by mode from the closed-form multiplier."""
    alg = cfg.algebra
    out: dict[int, np.ndarray] = {}
    for k, a in u.coeffs.items():
        ad_a = alg.ad(a)
        for m, b in y.coeffs.items():
            out[k + m] = out.get(k + m, 0) + theta_factor(cfg, k, [m])[0] * (ad_a @ b)
    return LoopElement(alg, out)


def curvature_s(u: LoopElement, v: LoopElement, cfg: GeometryConfig) -> BlockBandOperator:
    """``[theta(U), theta(V)] - theta([U, V])``."""
    return commutator(theta_s(u, cfg), theta_s(v, cfg)) - theta_s(loop_bracket(u, v), cfg)


def riemann_operator(x: LoopElement, y: LoopElement, cfg: GeometryConfig) -> BlockBandOperator:
    """``R(X, Y): Z -> Omega(Z, X) Y``.

    Expanding ``Omega(Z, X) Y = theta(Z) theta(X) Y - theta(X) theta(Z) Y - theta([Z, X]) Y``
    gives ``Theta'_{theta(X) Y} - theta(X) Theta'_Y + Theta'_Y ad_X``.
    """
    ty = theta_prime(y, cfg)
    first = theta_prime(apply_theta(x, y, cfg), cfg)
    return first - compose(theta_s(x, cfg), ty) + compose(ty, ad_operator(x))


def ricci(x: LoopElement, y: LoopElement, cfg: GeometryConfig,
          trace_weight: DiagonalWeight | None = None) -> complex:
    """Weighted Ricci ``tr^Q(tr_Lie R(X, Y))`` (weighted trace with ``Q = cfg.weight`` by default)."""
    return weighted_trace(riemann_operator(x, y, cfg), trace_weight or cfg.weight)


def riemann_residue(x: LoopElement, y: LoopElement, cfg: GeometryConfig) -> complex:
    return residue(riemann_operator(x, y, cfg))


def kahler_connection_phi(z: LoopElement, cfg: GeometryConfig) -> BlockBandOperator:
    """``phi(Z) = theta_{1/2}(Z)_{++}``."""
    _kahler(cfg)
    return block(theta_s(z, cfg), "++").with_label("phi")


def toeplitz(x: LoopElement) -> BlockBandOperator:
    """``T_X = (ad_X)_{++}``."""
    return block(ad_operator(x), "++").with_label("T")


def _is_polarized(x: LoopElement, positive: bool) -> bool:
    return all((n >= 0) if positive else (n <= 0) for n in x.coeffs)


def complex_curvature(x: LoopElement, ybar: LoopElement, cfg: GeometryConfig) -> BlockBandOperator:
    """``[phi(X), phi(Ybar)] - phi([X, Ybar])`` for ``X`` in ``H+`` and ``Ybar`` in ``H-``."""
    _kahler(cfg)
    if not _is_polarized(x, True) or not _is_polarized(ybar, False):
        raise ModeError("complex_curvature expects X with modes >= 0 and Ybar with modes <= 0")
    return (commutator(kahler_connection_phi(x, cfg), kahler_connection_phi(ybar, cfg))
            - kahler_connection_phi(loop_bracket(x, ybar), cfg))


def first_chern(x: LoopElement, ybar: LoopElement, cfg: GeometryConfig,
                trace_weight: DiagonalWeight | None = None) -> complex:
    """``r_1 = tr^Q(Omega(X, Ybar))`` through the zeta engine."""
    return weighted_trace(complex_curvature(x, ybar, cfg), trace_weight or cfg.weight)


def kahler_radul(x: LoopElement, ybar: LoopElement, cfg: GeometryConfig) -> complex:
    """``c_R^{Q0}(phi(X), phi(Ybar))``."""
    return radul(kahler_connection_phi(x, cfg), kahler_connection_phi(ybar, cfg), cfg.weight)


def loop_lambda(x: LoopElement, y: LoopElement) -> complex:
    """``ad* lambda^D(X, Y) = lambda^D(ad_X, ad_Y)`` as an exact finite-rank trace."""
    return lambda_D_finite_rank(ad_operator(x), ad_operator(y))


@dataclass(frozen=True)
class ChernRecord:
    first_chern: complex
    radul_phi: complex
    lambda_weighted: complex
    lambda_finite_rank: complex
    minus_i_omega: complex
    trace_phi_bracket: complex

    def max_spread(self) -> float:
        vals = [self.first_chern, self.radul_phi, self.lambda_weighted, self.lambda_finite_rank,
                self.minus_i_omega]
        return max(abs(a - b) for a in vals for b in vals)


def chern_identities(x: LoopElement, ybar: LoopElement, cfg: GeometryConfig) -> ChernRecord:
    """The first Chern form next to the Radul, restricted-cocycle and Kahler-form values."""
    ad_x, ad_y = ad_operator(x), ad_operator(ybar)
    return ChernRecord(
        first_chern=first_chern(x, ybar, cfg),
        radul_phi=kahler_radul(x, ybar, cfg),
        lambda_weighted=lambda_D(ad_x, ad_y),
        lambda_finite_rank=lambda_D_finite_rank(ad_x, ad_y),
        minus_i_omega=-1j * symplectic_form(x, ybar),
        trace_phi_bracket=weighted_trace(kahler_connection_phi(loop_bracket(x, ybar), cfg), cfg.weight),
    )


def lambda_cochain(algebra: LieAlgebraData) -> Cochain:
    """``ad* lambda^D`` as a 2-cochain on the loop algebra."""
    return Cochain(2, loop_lambda, "ad*lambda^D", loop_bracket)


def closedness_lambda(x: LoopElement, y: LoopElement, z: LoopElement) -> complex:
    """``delta(ad* lambda^D)(X, Y, Z)``; vanishes for a cocycle."""
    return coboundary(lambda_cochain(x.algebra))(x, y, z)


def covariant_trace_variation(theta0: BlockBandOperator, omega0: BlockBandOperator,
                              weight: DiagonalWeight) -> tuple[complex, complex]:
    """``(-tr^Q([theta, omega]), (1/q) res([log Q, theta] omega))``."""
    lhs = -weighted_trace(commutator(theta0, omega0), weight)
    rhs = residue(compose(log_commutator(weight, theta0), omega0)) / weight.order
    return lhs, rhs


def dirac_conjugated_toeplitz(u: LoopElement, cfg: GeometryConfig) -> BlockBandOperator:
    """``|D|^{-1} T_U |D|`` on ``H+`` with ``|D| = (Q0 + P)^{1/2}``."""
    _kahler(cfg)
    d = cfg.d
    root = weight_power(cfg.weight, 0.5, d)
    inv_root = weight_power(cfg.weight, -0.5, d)
    return block(compose(compose(inv_root, block(ad_operator(u), "++")), root), "++")


# ---------------------------------------------------------------------------
# Closed-form route


BandFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ExactBands:
    """Operator given by exact entry functions ``band k -> (n -> d x d blocks)``."""

    d: int
    bands: dict[int, BandFn]

    def entries(self, k: int, ns) -> np.ndarray:
        ns = np.asarray(ns)
        fn = self.bands.get(k)
        if fn is None:
            return np.zeros((ns.size, self.d, self.d), dtype=complex)
        return fn(ns)

    def __add__(self, other: "ExactBands") -> "ExactBands":
        keys = set(self.bands) | set(other.bands)
        return ExactBands(self.d, {k: (lambda ns, k=k: self.entries(k, ns) + other.entries(k, ns))
                                   for k in keys})

    def scale(self, c: complex) -> "ExactBands":
        return ExactBands(self.d, {k: (lambda ns, f=f: c * f(ns)) for k, f in self.bands.items()})

    def __sub__(self, other: "ExactBands") -> "ExactBands":
        return self + other.scale(-1.0)

    def __matmul__(self, other: "ExactBands") -> "ExactBands":
        """``(AB)(k, n) = sum_{k1 + k2 = k} A(k1, n + k2) B(k2, n)``."""
        pairs: dict[int, list[tuple[int, int]]] = {}
        for k1 in self.bands:
            for k2 in other.bands:
                pairs.setdefault(k1 + k2, []).append((k1, k2))

        def make(plist):
            def fn(ns):
                ns = np.asarray(ns)
                out = np.zeros((ns.size, self.d, self.d), dtype=complex)
                for k1, k2 in plist:
                    out += np.matmul(self.entries(k1, ns + k2), other.entries(k2, ns))
                return out
            return fn

        return ExactBands(self.d, {k: make(p) for k, p in pairs.items()})

    def commutator(self, other: "ExactBands") -> "ExactBands":
        return self @ other - other @ self

    def restrict(self, quadrant: str, convention: Convention | None = None) -> "ExactBands":
        conv = Convention(convention or current_settings().convention)
        member = {"+": lambda ns: in_plus(ns, conv), "-": lambda ns: np.asarray(ns) < 0}
        target, source = quadrant

        def make(k, f):
            return lambda ns: f(ns) * (member[source](ns) & member[target](ns + k))[:, None, None]

        return ExactBands(self.d, {k: make(k, f) for k, f in self.bands.items()})

    def diagonal_trace(self, ns) -> np.ndarray:
        """``tr_fibre A(0, n)`` on the given modes."""
        return np.trace(self.entries(0, ns), axis1=1, axis2=2)


def exact_ad(x: LoopElement) -> ExactBands:
    alg = x.algebra

    def make(mat):
        return lambda ns: np.broadcast_to(mat, (np.asarray(ns).size,) + mat.shape).astype(complex)

    return ExactBands(alg.dim, {k: make(alg.ad(a)) for k, a in x.coeffs.items()})


def exact_theta(u: LoopElement, cfg: GeometryConfig) -> ExactBands:
    alg = cfg.algebra

    def make(k, mat):
        return lambda ns: theta_factor(cfg, k, ns)[:, None, None] * mat[None]

    return ExactBands(alg.dim, {k: make(k, alg.ad(a)) for k, a in u.coeffs.items()})


def exact_theta_prime(w: LoopElement, cfg: GeometryConfig) -> ExactBands:
    """Entries ``-1/2 ad_{w_k} [1 + (mu_k / mu_{n+k})^s - (mu_n / mu_{n+k})^s]``."""
    alg = cfg.algebra
    s = cfg.s

    def make(k, mat):
        mk = float(cfg.mu([k])[0])

        def fn(ns):
            ns = np.asarray(ns)
            mt = cfg.mu(ns + k)
            f = -0.5 * (1.0 + (mk / mt) ** s - (cfg.mu(ns) / mt) ** s)
            return f[:, None, None] * mat[None]
        return fn

    return ExactBands(alg.dim, {k: make(k, alg.ad(a)) for k, a in w.coeffs.items()})


def exact_riemann(x: LoopElement, y: LoopElement, cfg: GeometryConfig) -> ExactBands:
    ty = exact_theta_prime(y, cfg)
    return exact_theta_prime(apply_theta(x, y, cfg), cfg) - exact_theta(x, cfg) @ ty + ty @ exact_ad(x)


def exact_complex_curvature(x: LoopElement, ybar: LoopElement, cfg: GeometryConfig) -> ExactBands:
    _kahler(cfg)
    phi_x = exact_theta(x, cfg).restrict("++")
    phi_y = exact_theta(ybar, cfg).restrict("++")
    return phi_x.commutator(phi_y) - exact_theta(loop_bracket(x, ybar), cfg).restrict("++")


def partial_trace(op: ExactBands, cutoff: int) -> complex:
    """``sum_{|n| <= cutoff} tr_fibre A(0, n)`` with compensated summation."""
    vals = op.diagonal_trace(np.arange(-cutoff, cutoff + 1))
    return complex(math.fsum(vals.real), math.fsum(vals.imag))


def tail_exponents(s: float, count: int = 4) -> tuple[float, ...]:
    """Powers ``1/M^e`` expected in the tail of a diagonal built from ``(mu ratio)^s`` factors.

    Diagonal entries expand in ``n^-j`` together with ``n^{-2s-j}`` and
    ``n^{-4s-j}`` (one or two factors ``(mu_k / mu_{n+k})^s``); summing from
    ``M`` lowers each power by one.
    """
    cands = set(range(1, count + 1))
    for j in range(count + 1):
        cands.update((2 * s + j, 4 * s + j - 1))
    vals = sorted({round(c, 12) for c in cands if c > 1e-12})
    return tuple(vals[:count])


def richardson(cutoffs, values, exponents=None) -> complex:
    """Limit of ``S(M) = S + sum_e c_e M^-e`` (least squares when over-determined).

    ``exponents`` defaults to ``1, 2, ..., len(cutoffs) - 1``.
    """
    cutoffs = np.asarray(cutoffs, dtype=float)
    values = np.asarray(values, dtype=complex)
    if exponents is None:
        exponents = np.arange(1, len(cutoffs))
    exponents = np.asarray(exponents, dtype=float)
    if exponents.size >= cutoffs.size:
        raise ModeError("Richardson extrapolation needs more cutoffs than correction terms")
    mat = np.column_stack([np.ones_like(cutoffs)] + [cutoffs ** -e for e in exponents])
    return complex(np.linalg.lstsq(mat, values, rcond=None)[0][0])


def extrapolated_trace(op: ExactBands, cutoffs=RICHARDSON_CUTOFFS, s: float = 0.5) -> complex:
    exps = tail_exponents(s, min(4, len(cutoffs) - 1))
    return richardson(cutoffs, [partial_trace(op, m) for m in cutoffs], exps)


def ricci_truncated(x: LoopElement, y: LoopElement, cfg: GeometryConfig,
                    cutoffs=RICHARDSON_CUTOFFS) -> complex:
    """Ordinary trace of ``tr_Lie R(X, Y)`` from exact entries, extrapolated in the cutoff."""
    return extrapolated_trace(exact_riemann(x, y, cfg), cutoffs, cfg.s)


def first_chern_truncated(x: LoopElement, ybar: LoopElement, cfg: GeometryConfig,
                          cutoffs=RICHARDSON_CUTOFFS) -> complex:
    return extrapolated_trace(exact_complex_curvature(x, ybar, cfg), cutoffs, cfg.s)


# ---------------------------------------------------------------------------
# Order fits


def _band_norms(op: BlockBandOperator | ExactBands, ns: np.ndarray, traced: bool) -> np.ndarray:
    total = np.zeros(ns.size)
    if isinstance(op, BlockBandOperator):
        src = fibre_trace(op) if traced else op
        keys = list(src.bands)
        get = src.values
    else:
        keys = list(op.bands)
        get = op.entries
    for k in keys:
        vals = get(k, ns)
        if traced and isinstance(op, ExactBands):
            vals = np.trace(vals, axis1=1, axis2=2)[:, None, None]
        total = np.maximum(total, np.linalg.norm(vals.reshape(ns.size, -1), axis=1))
    return total


def fit_order(op: BlockBandOperator | ExactBands, cutoff: int = 512, traced: bool = False,
              corrections: tuple[float, ...] = (0.5, 1.0)) -> float:
    """Leading exponent of the largest band entry over ``n`` in ``[M/4, M]`` on both rays.

    Fits ``log|c_n| = alpha log n + b_0 + sum_j b_j n^-delta_j`` by least
    squares; the correction powers absorb subleading terms (half-integer
    spacing appears for non-integer ``2s``).
    """
    ns = np.arange(max(cutoff // 4, 2), cutoff + 1)
    x = ns.astype(float)
    design = np.column_stack([np.log(x), np.ones_like(x)] + [x ** -c for c in corrections])
    slopes = []
    for sign in (1, -1):
        norms = _band_norms(op, sign * ns, traced)
        if np.all(norms == 0):
            continue
        if np.any(norms == 0):
            raise ModeError("entries vanish inside the fitting window; order fit undefined")
        coef = np.linalg.lstsq(design, np.log(norms), rcond=None)[0]
        slopes.append(float(coef[0]))
    if not slopes:
        return -math.inf
    return max(slopes)


def validate_loop(x: LoopElement, cfg: GeometryConfig) -> None:
    if x.algebra is not cfg.algebra:
        raise AlgebraError("loop element and configuration use different algebras")
