"""Named verification suites producing :class:`CheckReport` records."""

from __future__ import annotations

import contextvars
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import cocycles as cc
from . import loop_geometry as lg
from .corpus import (banded_pairs, covariance_cases, generators, monomial_pairs, multiplication_pairs,
                     random_banded, random_loops, weight_triples)
from .expansions import RayExpansion
from .lie_core import LieAlgebraData, LoopElement, ad_operator, su2, symplectic_form
from .mode_ops import (Convention, ModeError, abs_dirac_power, abs_dirac_weight, block, commutator, compose,
                       dirac, epsilon_sign, hs_norm_squared, identity, laplacian_plus_one_weight,
                       laplacian_weight, max_entry_difference, mode_settings, multiplication_operator,
                       quartic_weight, shift_operator, shifted_square_weight, truncate)
from .reg_traces import (DiagonalTraceData, canonical_trace_TR, finite_part_sum, residue, weight_dependence,
                         covariance_check, wres_from_modes, weighted_trace)
from .symbol_calc import symbol_residue_matches_modes
from .zeta import EULER_GAMMA, riemann_zeta

SUITES = ("traces", "radul", "schwinger", "lambda", "loopgeom", "chern")


class ConfigError(ValueError):
    """Raised for invalid run configurations."""


@dataclass(frozen=True)
class RunConfig:
    algebra: LieAlgebraData = field(default_factory=su2)
    truncation: int = 256
    depth: int | None = None
    tol: float | None = None
    convention: Convention = Convention.KERNEL_PLUS
    jobs: int = 1
    timing: bool = True
    max_mode: int = 5

    def __post_init__(self):
        if self.truncation < 8:
            raise ConfigError("truncation must be at least 8")
        if self.depth is not None and self.depth < 4:
            raise ConfigError("depth must be at least 4")
        if self.jobs < 1:
            raise ConfigError("jobs must be positive")

    def tolerance(self, default: float) -> float:
        return default if self.tol is None else self.tol

    @property
    def cutoffs(self) -> tuple[int, ...]:
        """Richardson sample cutoffs; ``truncation = 256`` gives 128..512."""
        m = self.truncation
        return (m // 2, 3 * m // 4, m, 3 * m // 2, 2 * m)

    def settings(self) -> dict:
        out = {"convention": self.convention}
        if self.depth is not None:
            out["depth"] = self.depth
        return out


@dataclass(frozen=True)
class CheckReport:
    check_id: str
    paper_anchor: str
    lhs: complex
    rhs: complex
    abs_err: float
    tol: float
    status: str
    runtime_ms: int

    def to_json(self) -> dict:
        return {"check_id": self.check_id, "paper_anchor": self.paper_anchor,
                "lhs": {"re": self.lhs.real, "im": self.lhs.imag},
                "rhs": {"re": self.rhs.real, "im": self.rhs.imag},
                "abs_err": self.abs_err, "tol": self.tol, "status": self.status,
                "runtime_ms": self.runtime_ms}


CSV_HEADER = ("check_id", "paper_anchor", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "abs_err", "tol",
              "status", "runtime_ms")


def report_row(r: CheckReport) -> list:
    return [r.check_id, r.paper_anchor, repr(r.lhs.real), repr(r.lhs.imag), repr(r.rhs.real),
            repr(r.rhs.imag), repr(r.abs_err), repr(r.tol), r.status, r.runtime_ms]


@dataclass(frozen=True)
class Check:
    check_id: str
    anchor: str
    tol: float
    compute: Callable[[], tuple[complex, complex]]
    settings: dict = field(default_factory=dict)


def run_check(check: Check, cfg: RunConfig) -> CheckReport:
    start = time.perf_counter()
    with mode_settings(**{**cfg.settings(), **check.settings}):
        try:
            lhs, rhs = check.compute()
            lhs, rhs = complex(lhs), complex(rhs)
            err = abs(lhs - rhs)
        except (ModeError, ValueError, ArithmeticError) as exc:
            lhs = rhs = complex("nan")
            err = math.inf
            anchor = f"{check.anchor} [error: {exc}]"
        else:
            anchor = check.anchor
    elapsed = int(round((time.perf_counter() - start) * 1000)) if cfg.timing else 0
    status = "pass" if err <= check.tol else "fail"
    return CheckReport(check.check_id, anchor, lhs, rhs, float(err), check.tol, status, elapsed)


def run_checks(checks: list[Check], cfg: RunConfig) -> list[CheckReport]:
    if cfg.jobs == 1:
        return [run_check(c, cfg) for c in checks]
    with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
        futures = [pool.submit(contextvars.copy_context().run, run_check, c, cfg) for c in checks]
        return [f.result() for f in futures]


def run_suite(name: str, cfg: RunConfig | None = None) -> list[CheckReport]:
    cfg = cfg or RunConfig()
    return run_checks(build_suite(name, cfg), cfg)


def build_suite(name: str, cfg: RunConfig) -> list[Check]:
    if name == "all":
        return [c for s in SUITES for c in build_suite(s, cfg)]
    builders = {"traces": trace_checks, "radul": radul_checks, "schwinger": schwinger_checks,
                "lambda": lambda_checks, "loopgeom": loopgeom_checks, "chern": chern_checks}
    if name not in builders:
        raise ConfigError(f"unknown suite {name!r}; choose from {', '.join(SUITES + ('all',))}")
    return builders[name](cfg)


# ---------------------------------------------------------------------------
# Dense oracles


def dense_schwinger(a, b, cutoff: int) -> complex:
    """``1/2 tr(eps [eps, A] [eps, B])`` on truncated matrices (exact for finite-rank commutators)."""
    eps = truncate(epsilon_sign(a.d), cutoff)
    ma, mb = truncate(a, cutoff), truncate(b, cutoff)
    ca, cb = eps @ ma - ma @ eps, eps @ mb - mb @ eps
    return 0.5 * complex(np.trace(eps @ ca @ cb))


def hs_formula(x: LoopElement) -> float:
    """``sum_{k > 0} k <a_k, a_k>`` with the Hermitian minus-Killing norm."""
    g = x.algebra.metric
    return float(sum(k * np.real(np.conj(a) @ g @ a) for k, a in x.coeffs.items() if k > 0))


# ---------------------------------------------------------------------------
# Suites


def trace_checks(cfg: RunConfig) -> list[Check]:
    tol = cfg.tolerance(1e-9)
    tight = cfg.tolerance(1e-12)
    checks = []
    q = laplacian_weight()
    for c in (1.0, -2.5, 3j):
        checks.append(Check(f"traces/identity-constant/{c}", "zeta(0) = -1/2 kills constant diagonals", tight,
                            lambda c=c: (weighted_trace(c * identity(1), q), 0.0)))

    def inverse_abs():
        data = DiagonalTraceData.from_function(
            lambda ns: np.where(ns == 0, 0.0, 1.0 / np.maximum(np.abs(ns), 1)),
            RayExpansion.power(-1.0, 1.0), RayExpansion.power(-1.0, 1.0))
        val = finite_part_sum(data, q)
        return complex(val.finite_part, 0) + 1j * val.pole_residue, 2 * EULER_GAMMA + 1j

    checks.append(Check("traces/finite-part-1/|n|", "finite part 2 gamma, pole 1", tol, inverse_abs))
    checks.append(Check("traces/ordinary-n^-2", "order -2 weighted trace is the ordinary sum", tol,
                        lambda: (weighted_trace(abs_dirac_power(-2.0, 1), q), 1 + math.pi ** 2 / 3)))
    checks.append(Check("traces/canonical-|D+P|^-pi", "canonical trace by zeta continuation", tol,
                        lambda: (canonical_trace_TR(abs_dirac_power(-math.pi, 1)), 1 + 2 * riemann_zeta(math.pi))))
    for d in (1, 2, cfg.algebra.dim):
        checks.append(Check(f"traces/residue-normalization/d={d}", "symbol residue = ord Q times pole residue",
                            tol, lambda d=d: symbol_residue_matches_modes(abs_dirac_power(-1.0, d), q)))
        checks.append(Check(f"traces/residue-value/d={d}", "res(|D+P|^-1 Id_d) = 2d", tol,
                            lambda d=d: (residue(abs_dirac_power(-1.0, d)), 2 * d)))
    for w2 in (abs_dirac_weight(), quartic_weight()):
        checks.append(Check(f"traces/residue-weight-free/{w2.name}", "residue independent of the weight", tol,
                            lambda w2=w2: (wres_from_modes(abs_dirac_power(-1.0, 1), q),
                                           wres_from_modes(abs_dirac_power(-1.0, 1), w2))))
    for name, op in generators(1).items():
        checks.append(Check(f"traces/residue-bridge/{name}", "symbol residue = ord Q times pole residue", tol,
                            lambda op=op: symbol_residue_matches_modes(op, q)))
    for t in weight_triples():
        checks.append(Check(f"traces/weight-dependence/{t.label}", "weight change = log-ratio residue",
                            cfg.tolerance(1e-8), lambda t=t: weight_dependence(t.a, t.weight1, t.weight2)))
    for c in covariance_cases():
        checks.append(Check(f"traces/covariance/{c.label}", "conjugated weight equals conjugated operator",
                            tol, lambda c=c: covariance_check(c.a, c.weight, c.c, c.c_inv, c.shift)))
    checks.append(Check("traces/signed-epsilon", "tr^Q(eps) from the kernel mode", tol,
                        lambda: (weighted_trace(epsilon_sign(1), q), 1.0)))

    def tr_commutator_nonint():
        a = abs_dirac_power(-math.pi, 1)
        b = compose(shift_operator(1, 1), abs_dirac_power(0.5, 1))
        return canonical_trace_TR(commutator(a, b)), 0.0

    checks.append(Check("traces/TR-commutator", "canonical trace vanishes on commutators", tol,
                        tr_commutator_nonint))
    odd = {"D^2": compose(dirac(1), dirac(1)), "M D^3": compose(multiplication_operator({1: 1.0, -2: 0.5}, 1),
                                                                compose(dirac(1), compose(dirac(1), dirac(1)))),
           "D": dirac(1)}
    for name, op in odd.items():
        checks.append(Check(f"traces/odd-class-weights/{name}", "odd-class traces independent of odd-class weight",
                            cfg.tolerance(1e-8),
                            lambda op=op: (weighted_trace(op, q), weighted_trace(op, laplacian_plus_one_weight()))))
    return checks


def radul_checks(cfg: RunConfig) -> list[Check]:
    tol = cfg.tolerance(1e-8)
    checks = []
    weights = (laplacian_weight(), abs_dirac_weight())
    for i, p in enumerate(banded_pairs()):
        w = weights[i % 2]
        checks.append(Check(f"radul/residue-form/{i}:{p.label}/{w.name}", "Radul cocycle as a residue", tol,
                            lambda p=p, w=w: (cc.radul(p.a, p.b, w), cc.radul_residue_form(p.a, p.b, w))))
    low = ("Id", "D", "|D|^-1", "eps")
    rng = np.random.default_rng(11)
    pairs = [random_banded(rng, 1, 1, names=low) for _ in range(6)]
    q1, q2 = laplacian_weight(), shifted_square_weight()
    log_c = cc.log_ratio_cochain(q1, q2)
    for i in range(3):
        a, b = pairs[i], pairs[i + 3]
        checks.append(Check(f"radul/weight-coboundary/{i}", "Radul cocycles differ by a coboundary", tol,
                            lambda a=a, b=b: (cc.radul(a, b, q1) - cc.radul(a, b, q2),
                                              cc.coboundary(log_c)(a, b))))
    for i in range(3):
        a, b, c = pairs[i], pairs[i + 1], pairs[i + 2]
        checks.append(Check(f"radul/cocycle/{i}", "Radul cocycle is closed", tol,
                            lambda a=a, b=b, c=c: (cc.coboundary(cc.radul_cochain(q1))(a, b, c), 0.0)))
    for degree in (1, 2):
        for seed in range(3):
            checks.append(Check(f"radul/delta-squared/degree={degree}/{seed}", "coboundary squares to zero",
                                cfg.tolerance(1e-12),
                                lambda degree=degree, seed=seed: (delta_squared_random(degree, seed), 0.0)))
    return checks


def delta_squared_random(degree: int, seed: int, size: int = 4) -> complex:
    """``delta^2 c`` for a random antisymmetric matrix cochain on ``gl(size)``."""
    rng = np.random.default_rng(seed)
    mats = [rng.normal(size=(size, size)) / size for _ in range(degree)]

    def raw(*xs):
        prod = np.eye(size)
        for m, x in zip(mats, xs):
            prod = prod @ m @ x
        return complex(np.trace(prod))

    def evaluate(*xs):
        if degree == 1:
            return raw(*xs)
        return raw(xs[0], xs[1]) - raw(xs[1], xs[0])

    cochain = cc.Cochain(degree, evaluate, "random", lambda a, b: a @ b - b @ a)
    args = [rng.normal(size=(size, size)) for _ in range(degree + 2)]
    return cc.coboundary(cc.coboundary(cochain))(*args)


def schwinger_checks(cfg: RunConfig) -> list[Check]:
    tol = cfg.tolerance(1e-9)
    checks = []
    for p in multiplication_pairs(8):
        checks.append(Check(f"schwinger/finite-rank/{p.label}", "Schwinger functional as a finite trace", tol,
                            lambda p=p: (cc.schwinger(p.a, p.b), dense_schwinger(p.a, p.b, 16))))
        checks.append(Check(f"schwinger/equals-c_TR/{p.label}", "Schwinger equals c_TR on the restricted algebra",
                            tol, lambda p=p: (cc.schwinger(p.a, p.b), cc.c_TR(p.a, p.b))))
        checks.append(Check(f"schwinger/c_TR-antisymmetric/{p.label}", "c_TR antisymmetric", tol,
                            lambda p=p: (cc.c_TR(p.a, p.b), -cc.c_TR(p.b, p.a))))
        checks.append(Check(f"schwinger/obstruction/{p.label}", "obstruction residue vanishes", tol,
                            lambda p=p: (cc.obstruction_residue(p.a, p.b), 0.0)))
        checks.append(Check(f"schwinger/barred-difference/{p.label}", "c_TR_bar - c_S = delta tr_eps", tol,
                            lambda p=p: (cc.c_TR_bar(p.a, p.b) - cc.schwinger(p.a, p.b),
                                         cc.coboundary(cc.signed_trace_cochain())(p.a, p.b))))
    for i, p in enumerate(banded_pairs(10, seed=5)):
        checks.append(Check(f"schwinger/exchange/{i}", "c_TR(B, A) = -c_TR~(A, B)", tol,
                            lambda p=p: (cc.c_TR(p.b, p.a), -cc.c_TR_tilde(p.a, p.b))))
        checks.append(Check(f"schwinger/defect-identity/{i}", "c_TR symmetric part = -res(eps[A,[log|D|,B]])",
                            cfg.tolerance(1e-8),
                            lambda p=p: (cc.c_TR(p.a, p.b) + cc.c_TR(p.b, p.a), -cc.obstruction_residue(p.a, p.b))))

    def engineered():
        a = compose(epsilon_sign(1), compose(shift_operator(1, 1), dirac(1)))
        b = compose(shift_operator(-1, 1), dirac(1))
        return cc.c_TR(a, b) + cc.c_TR(b, a), -cc.obstruction_residue(a, b)

    checks.append(Check("schwinger/defect-identity/eps-M-D", "c_TR symmetric part = -res(eps[A,[log|D|,B]])",
                        cfg.tolerance(1e-8), engineered))
    return checks


def lambda_checks(cfg: RunConfig) -> list[Check]:
    alg = cfg.algebra
    tol = cfg.tolerance(1e-12)
    checks = []
    plus = {"convention": Convention.KERNEL_PLUS}
    for x, y, n, i, j in monomial_pairs(alg, cfg.max_mode):
        li, lj = alg.basis_labels[i], alg.basis_labels[j]
        checks.append(Check(f"lambda/monomial/n={n}/{li},{lj}", "lambda^D(ad z^n a, ad z^-n b) = n<a,b>", tol,
                            lambda x=x, y=y: (lg.loop_lambda(x, y), -1j * symplectic_form(x, y)), plus))
    for n in range(1, cfg.max_mode + 1):
        for p in range(1, cfg.max_mode + 1):
            if n != p:
                x = LoopElement.monomial(alg, n, 0)
                y = LoopElement.monomial(alg, -p, 0)
                checks.append(Check(f"lambda/off-diagonal/n={n},p={p}", "only matching modes pair", tol,
                                    lambda x=x, y=y: (lg.loop_lambda(x, y), 0.0), plus))
    loops = random_loops(alg, 30, 3)
    for t in range(10):
        x, y, z = loops[3 * t:3 * t + 3]
        checks.append(Check(f"lambda/closed/{t}", "ad* lambda^D is closed", tol,
                            lambda x=x, y=y, z=z: (lg.closedness_lambda(x, y, z), 0.0), plus))
    for t, x in enumerate(random_loops(alg, 20, 6, seed=7)):
        checks.append(Check(f"lambda/hs-norm/{t}", "Hilbert-Schmidt norm of (ad_X)+-", tol,
                            lambda x=x: (hs_norm_squared(block(ad_operator(x), "+-"), alg.metric),
                                         hs_formula(x)), plus))
    return checks


def loopgeom_checks(cfg: RunConfig) -> list[Check]:
    alg = cfg.algebra
    checks = []
    e = [LoopElement.monomial(alg, k, 0) + LoopElement.monomial(alg, -k, 0) for k in (1, 2)]
    f = LoopElement.monomial(alg, 1, min(1, alg.dim - 1)) + LoopElement.monomial(alg, -1, min(1, alg.dim - 1))
    pairs = [(e[0], e[0]), (e[0], e[1] + f), (e[1] + f, e[1] + f)]
    for s in (0.5, 0.75, 1.0):
        geo = lg.GeometryConfig(alg, s)
        for i, (x, y) in enumerate(pairs):
            checks.append(Check(f"loopgeom/ricci-paths/s={s}/{i}", "weighted Ricci = ordinary-trace Ricci",
                                cfg.tolerance(1e-5),
                                lambda x=x, y=y, geo=geo: (lg.ricci(x, y, geo),
                                                           lg.ricci_truncated(x, y, geo, cfg.cutoffs))))
            checks.append(Check(f"loopgeom/riemann-residue/s={s}/{i}", "residue of the Riemann operator vanishes",
                                cfg.tolerance(1e-8),
                                lambda x=x, y=y, geo=geo: (lg.riemann_residue(x, y, geo), 0.0)))
    geo1 = lg.GeometryConfig(alg, 1.0)
    for i, (x, y) in enumerate(pairs):
        checks.append(Check(f"loopgeom/ricci-weights/{i}", "Ricci independent of the odd-class weight",
                            cfg.tolerance(1e-8),
                            lambda x=x, y=y: (lg.ricci(x, y, geo1, laplacian_weight()),
                                              lg.ricci(x, y, geo1, laplacian_plus_one_weight()))))
    x, y = pairs[1]
    for s in (0.25, 0.5, 0.75):
        geo = lg.GeometryConfig(alg, s)
        checks.append(Check(f"loopgeom/order-trLie-R/s={s}", "order of tr_Lie R is -2 min(1, 2s)",
                            cfg.tolerance(0.05),
                            lambda geo=geo, s=s: (lg.fit_order(lg.riemann_operator(x, y, geo), 512, traced=True),
                                                  -2 * min(1.0, 2 * s))))
    geo_h = lg.GeometryConfig(alg, 0.5)
    checks.append(Check("loopgeom/order-R/s=0.5", "order of the Riemann operator", cfg.tolerance(0.05),
                        lambda: (lg.fit_order(lg.riemann_operator(x, y, geo_h), 512), -1.0)))
    excl = {"convention": Convention.KERNEL_EXCLUDED}
    for n in range(1, 5):
        u = LoopElement.monomial(alg, n, 0)
        v = LoopElement.monomial(alg, -n, min(1, alg.dim - 1))
        checks.append(Check(f"loopgeom/phi-positive/n={n}", "phi(U) = |D|^-1 T_U |D|", cfg.tolerance(1e-12),
                            lambda u=u: (_entry_gap(lg.kahler_connection_phi(u, geo_h),
                                                    lg.dirac_conjugated_toeplitz(u, geo_h)), 0.0), excl))
        checks.append(Check(f"loopgeom/phi-negative/n={n}", "phi(Vbar) = T_Vbar", cfg.tolerance(1e-12),
                            lambda v=v: (_entry_gap(lg.kahler_connection_phi(v, geo_h), lg.toeplitz(v)), 0.0),
                            excl))
    return checks


def _entry_gap(a, b, radius: int = 128) -> float:
    return max_entry_difference(a, b, radius)


def chern_checks(cfg: RunConfig) -> list[Check]:
    alg = cfg.algebra
    geo = lg.GeometryConfig(alg, 0.5)
    checks = []
    plus = {"convention": Convention.KERNEL_PLUS}
    for x, y, n, i, j in monomial_pairs(alg, cfg.max_mode):
        tag = f"n={n}/{alg.basis_labels[i]},{alg.basis_labels[j]}"
        target = -1j * symplectic_form(x, y)
        checks.append(Check(f"chern/first-chern/{tag}", "first Chern form = -i omega", cfg.tolerance(1e-6),
                            lambda x=x, y=y, t=target: (lg.first_chern(x, y, geo), t), plus))
        checks.append(Check(f"chern/radul-phi/{tag}", "first Chern form = Radul cocycle of phi",
                            cfg.tolerance(1e-6),
                            lambda x=x, y=y: (lg.first_chern(x, y, geo), lg.kahler_radul(x, y, geo)), plus))
        checks.append(Check(f"chern/lambda/{tag}", "first Chern form = ad* lambda^D", cfg.tolerance(1e-6),
                            lambda x=x, y=y: (lg.first_chern(x, y, geo), lg.loop_lambda(x, y)), plus))
        checks.append(Check(f"chern/truncation/{tag}", "truncation path of the first Chern form",
                            cfg.tolerance(1e-5),
                            lambda x=x, y=y, t=target: (lg.first_chern_truncated(x, y, geo, cfg.cutoffs), t), plus))
    for n in (1, 2):
        x = LoopElement.monomial(alg, n, 0)
        y = LoopElement.monomial(alg, -n, 0)
        checks.append(Check(f"chern/weight-independence/n={n}", "diagonal-weight independence",
                            cfg.tolerance(1e-8),
                            lambda x=x, y=y: (lg.first_chern(x, y, geo, laplacian_weight()),
                                              lg.first_chern(x, y, geo, shifted_square_weight())), plus))
    for n in range(1, 6):
        for sign in (1, -1):
            z = LoopElement.monomial(alg, sign * n, (n + 1) % alg.dim) + LoopElement.monomial(alg, 0, 0)
            checks.append(Check(f"chern/trace-phi/{sign * n}", "tr^Q(phi(Z)) = 0", cfg.tolerance(1e-9),
                                lambda z=z: (weighted_trace(lg.kahler_connection_phi(z, geo), geo.weight), 0.0)))
    return checks
