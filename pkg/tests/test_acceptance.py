"""Acceptance suite: one test and one printed PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v`` (lines are printed even
without ``-s``) or directly with ``python tests/test_acceptance.py``.
"""

import math
import sys
import time

import numpy as np

from weightedtrace import cocycles as cc
from weightedtrace import loop_geometry as lg
from weightedtrace.corpus import (banded_pairs, covariance_cases, generators, monomial_pairs,
                                  multiplication_pairs, random_banded, random_loops, weight_triples)
from weightedtrace.expr import parse_operator
from weightedtrace.lie_core import LoopElement, ad_operator, killing_inner, su2, symplectic_form
from weightedtrace.mode_ops import (Convention, abs_dirac_power, block, commutator, compose, dirac,
                                    epsilon_sign, hs_norm_squared, identity, laplacian_plus_one_weight,
                                    laplacian_weight, mode_settings, multiplication_operator, shift_operator,
                                    truncate)
from weightedtrace.reg_traces import (canonical_trace_TR, covariance_check, residue, weight_dependence,
                                      weighted_trace, wres_from_modes)
from weightedtrace.suites import delta_squared_random
from weightedtrace.symbol_calc import symbol_abs_power, symbol_residue_matches_modes, wodzicki_residue

ALG = su2()
KAHLER = lg.GeometryConfig(ALG, 0.5)


class Criterion:
    """Collects sub-check errors against tolerances and prints one summary line."""

    def __init__(self, number: int, title: str):
        self.number = number
        self.title = title
        self.subs: list[tuple[str, float, float]] = []
        self.flags: list[tuple[str, bool, str]] = []

    def check(self, name: str, err: float, tol: float) -> None:
        self.subs.append((name, float(err), tol))

    def require(self, name: str, ok: bool, detail: str) -> None:
        self.flags.append((name, bool(ok), detail))

    def failures(self) -> list[str]:
        bad = [f"{n} (err {e:.2e} > tol {t:.0e})" for n, e, t in self.subs if not e <= t]
        return bad + [f"{n} ({d})" for n, ok, d in self.flags if not ok]

    def line(self) -> str:
        bad = self.failures()
        status = "PASS" if not bad else "FAIL"
        parts = [f"{n}: max err {e:.2e} / tol {t:.0e}" for n, e, t in self.subs]
        parts += [f"{n}: {'yes' if ok else 'no'}" for n, ok, _ in self.flags]
        text = f"criterion {self.number:>2} [{status}] {self.title} | " + "; ".join(parts)
        if bad:
            text += " | failing: " + ", ".join(bad)
        return text


def finish(crit: Criterion, capsys=None) -> None:
    line = crit.line()
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)
    assert not crit.failures(), line


def max_err(pairs) -> float:
    return max((abs(complex(a) - complex(b)) for a, b in pairs), default=0.0)


def test_criterion_01_restricted_cocycle_monomials(capsys):
    crit = Criterion(1, "lambda^D(ad z^n a, ad z^-n b) = n<a,b>, su(2), n = 1..5")
    start = time.perf_counter()
    with mode_settings(convention=Convention.KERNEL_PLUS):
        diag = [(lg.loop_lambda(x, y), n * killing_inner(ALG, ALG.basis_vector(i), ALG.basis_vector(j)))
                for x, y, n, i, j in monomial_pairs(ALG, 5)]
        off = [(lg.loop_lambda(LoopElement.monomial(ALG, n, a), LoopElement.monomial(ALG, -p, b)), 0.0)
               for n in range(1, 6) for p in range(1, 6) if n != p for a in range(3) for b in range(3)]
    elapsed = time.perf_counter() - start
    crit.check("monomial pairs", max_err(diag), 1e-12)
    crit.check("off-diagonal n != p", max_err(off), 1e-12)
    crit.check("runtime s", elapsed, 1.0)
    finish(crit, capsys)


def test_criterion_02_hilbert_schmidt_identity(capsys):
    crit = Criterion(2, "entry-sum |(ad_X)+-|^2 = sum_{k>0} k|a_k|^2, 20 random loops of degree <= 6")
    g = ALG.metric
    pairs = []
    for x in random_loops(ALG, 20, 6, seed=7):
        formula = sum(k * np.real(np.conj(a) @ g @ a) for k, a in x.coeffs.items() if k > 0)
        pairs.append((hs_norm_squared(block(ad_operator(x), "+-"), g), formula))
    crit.check("random loops", max_err(pairs), 1e-12)
    finish(crit, capsys)


def test_criterion_03_first_chern_chain(capsys):
    crit = Criterion(3, "r1 = c_R(phi, phi) = ad* lambda^D = -i omega on the monomial corpus")
    start = time.perf_counter()
    zeta_path, trunc_path = [], []
    with mode_settings(convention=Convention.KERNEL_PLUS):
        for x, y, *_ in monomial_pairs(ALG, 5):
            target = -1j * symplectic_form(x, y)
            r1 = lg.first_chern(x, y, KAHLER)
            zeta_path += [(r1, target), (lg.kahler_radul(x, y, KAHLER), target), (lg.loop_lambda(x, y), target)]
            trunc_path.append((lg.first_chern_truncated(x, y, KAHLER, lg.RICHARDSON_CUTOFFS), target))
    elapsed = time.perf_counter() - start
    crit.check("zeta-exact path", max_err(zeta_path), 1e-6)
    crit.check(f"truncation path (M up to {max(lg.RICHARDSON_CUTOFFS)})", max_err(trunc_path), 1e-5)
    crit.check("runtime s", elapsed, 60.0)
    finish(crit, capsys)


def test_criterion_04_radul_residue_formula(capsys):
    crit = Criterion(4, "tr^Q[A, B] = -(1/ord Q) res([log Q, A] B) on banded pairs")
    pairs = banded_pairs(24)
    assert len(pairs) >= 20
    for w in (laplacian_weight(), laplacian_plus_one_weight()):
        crit.check(f"{len(pairs)} pairs, Q = {w.name}",
                   max_err((cc.radul(p.a, p.b, w), cc.radul_residue_form(p.a, p.b, w)) for p in pairs), 1e-8)
    finish(crit, capsys)


def test_criterion_05_residue_normalization(capsys):
    crit = Criterion(5, "ord Q * Res_{z=0} = symbol residue; res(|D+P|^-1 Id_d) = 2d")
    q = laplacian_weight()
    rng = np.random.default_rng(17)
    corpus = list(generators(1).values()) + list(generators(3).values())
    corpus += [random_banded(rng, d, 2) for d in (1, 2) for _ in range(6)]
    crit.check("corpus", max_err(symbol_residue_matches_modes(a, q) for a in corpus), 1e-9)
    vals = []
    for d in (1, 2, 3):
        vals += [(wres_from_modes(abs_dirac_power(-1.0, d), q), 2 * d),
                 (wodzicki_residue(symbol_abs_power(-1.0, d)), 2 * d),
                 (residue(abs_dirac_power(-1.0, d)), 2 * d)]
    crit.check("|D+P|^-1 Id_d, d = 1..3", max_err(vals), 1e-9)
    finish(crit, capsys)


def test_criterion_06_weight_dependence_and_covariance(capsys):
    crit = Criterion(6, "weight dependence by a log-ratio residue; covariance under conjugation")
    crit.check("weight dependence", max_err(weight_dependence(t.a, t.weight1, t.weight2)
                                            for t in weight_triples()), 1e-8)
    crit.check("covariance", max_err(covariance_check(c.a, c.weight, c.c, c.c_inv, c.shift)
                                     for c in covariance_cases()), 1e-9)
    finish(crit, capsys)


def dense_schwinger(a, b, cutoff=16):
    eps = truncate(epsilon_sign(a.d), cutoff)
    ma, mb = truncate(a, cutoff), truncate(b, cutoff)
    return 0.5 * complex(np.trace(eps @ (eps @ ma - ma @ eps) @ (eps @ mb - mb @ eps)))


ENGINEERED = [("eps z D", "z^-1 D"), ("z |D|", "z^-1 D"), ("eps z D^2", "z^-1"), ("z eps D", "z^-1 |D|"),
              ("eps z^2 |D|", "z^-2 D"), ("z D^2", "eps z^-1 D"), ("eps z |D|^-1", "z^-1 D^2")]


def test_criterion_07_schwinger_and_defect_identity(capsys):
    crit = Criterion(7, "c_S = finite Schwinger trace; obstruction 0; c_TR defect identity incl. nonzero instance")
    mult = multiplication_pairs(12)
    crit.check("c_S vs ordinary trace", max_err((cc.schwinger(p.a, p.b), dense_schwinger(p.a, p.b)) for p in mult),
               1e-9)
    crit.check("c_S vs c_TR", max_err((cc.schwinger(p.a, p.b), cc.c_TR(p.a, p.b)) for p in mult), 1e-9)
    crit.check("obstruction residue", max_err((cc.obstruction_residue(p.a, p.b), 0.0) for p in mult), 1e-9)
    defect = []
    best = 0.0
    for a, b in [(p.a, p.b) for p in banded_pairs(12, seed=5)] + \
            [(parse_operator(sa), parse_operator(sb)) for sa, sb in ENGINEERED]:
        obstruction = cc.obstruction_residue(a, b)
        defect.append((cc.c_TR(a, b) + cc.c_TR(b, a), -obstruction))
        best = max(best, abs(obstruction))
    crit.check("defect identity", max_err(defect), 1e-8)
    crit.require("engineered nonzero instance", best > 1e-6,
                 f"largest |res(eps[A,[log|D|,B]])| over {len(defect)} classical pairs is {best:.1e}")
    finish(crit, capsys)


def test_criterion_08_kahler_lemmas(capsys):
    crit = Criterion(8, "tr^Q(phi(Z)) = 0 for 10 monomials; delta(ad* lambda^D) = 0 on 10 triples")
    monos = [LoopElement.monomial(ALG, k, k % 3) for k in (-5, -4, -3, -2, -1, 1, 2, 3, 4, 5)]
    crit.check("tr^Q(phi(Z))", max_err((weighted_trace(lg.kahler_connection_phi(z, KAHLER), KAHLER.weight), 0.0)
                                       for z in monos), 1e-9)
    loops = random_loops(ALG, 30, 3)
    with mode_settings(convention=Convention.KERNEL_PLUS):
        closed = [(lg.closedness_lambda(*loops[3 * t:3 * t + 3]), 0.0) for t in range(10)]
    crit.check("delta(ad* lambda^D)", max_err(closed), 1e-12)
    finish(crit, capsys)


def real_mono(k, i):
    return LoopElement.monomial(ALG, k, i) + LoopElement.monomial(ALG, -k, i)


RICCI_PAIRS = [(real_mono(1, 0), real_mono(1, 0)), (real_mono(1, 0), real_mono(2, 0) + real_mono(1, 1)),
               (real_mono(2, 0) + real_mono(1, 1), real_mono(2, 0) + real_mono(1, 1))]


def test_criterion_09_odd_class_weights_and_residue(capsys):
    crit = Criterion(9, "odd-class weight independence at s = 1; res R^s(X, Y) = 0")
    w1, w2 = laplacian_weight(), laplacian_plus_one_weight()
    geo1 = lg.GeometryConfig(ALG, 1.0)
    crit.check("Ricci, two odd-class weights",
               max_err((lg.ricci(x, y, geo1, w1), lg.ricci(x, y, geo1, w2)) for x, y in RICCI_PAIRS), 1e-8)
    odd_ops = [dirac(1), compose(dirac(1), dirac(1)),
               compose(multiplication_operator({1: 1.0, -2: 0.5}, 1), compose(dirac(1), compose(dirac(1), dirac(1))))]
    crit.check("tr^Q of odd-class operators", max_err((weighted_trace(a, w1), weighted_trace(a, w2)) for a in odd_ops),
               1e-8)
    res = [(lg.riemann_residue(x, y, lg.GeometryConfig(ALG, s)), 0.0) for s in (0.5, 0.75, 1.0)
           for x, y in RICCI_PAIRS]
    crit.check("res R^s, s in {1/2, 3/4, 1}", max_err(res), 1e-8)
    finish(crit, capsys)


def test_criterion_10_order_fits(capsys):
    crit = Criterion(10, "fitted orders at M = 512 within 0.05")
    x, y = RICCI_PAIRS[1]
    r_half = lg.riemann_operator(x, y, KAHLER)
    crit.check("R^1/2 order vs -1", abs(lg.fit_order(r_half, 512) + 1.0), 0.05)
    for s in (0.25, 0.5, 0.75):
        fitted = lg.fit_order(lg.riemann_operator(x, y, lg.GeometryConfig(ALG, s)), 512, traced=True)
        crit.check(f"tr_Lie R^{s} vs {-2 * min(1.0, 2 * s):g}", abs(fitted + 2 * min(1.0, 2 * s)), 0.05)
    xp = LoopElement.monomial(ALG, 1, 0) + LoopElement.monomial(ALG, 2, 1)
    ym = LoopElement.monomial(ALG, -1, 0) + LoopElement.monomial(ALG, -1, 2)
    omega = lg.complex_curvature(xp, ym, KAHLER)
    crit.check("tr_Lie Omega vs -2", abs(lg.fit_order(omega, 512, traced=True) + 2.0), 0.05)
    finish(crit, capsys)


def test_criterion_11_engine_self_tests(capsys):
    crit = Criterion(11, "tr^{Delta+P}(c Id) = 0; delta^2 = 0; TR[A, B] = 0 at non-integer order")
    q = laplacian_weight()
    crit.check("constant identity traces", max_err((weighted_trace(c * identity(d), q), 0.0)
                                                   for c in (1.0, -2.5, 3j, 0.125) for d in (1, 3)), 1e-12)
    crit.check("delta^2", max_err((delta_squared_random(deg, seed), 0.0) for deg in (1, 2) for seed in range(5)),
               1e-12)
    rng = np.random.default_rng(23)
    comms = []
    for beta in (math.pi, 0.5, 1.3):
        a = compose(random_banded(rng, 1, 1, names=("Id", "D")), abs_dirac_power(-beta, 1))
        b = compose(shift_operator(int(rng.integers(1, 3)), 1), abs_dirac_power(0.25, 1))
        comms.append((canonical_trace_TR(commutator(a, b)), 0.0))
    crit.check("TR[A, B]", max_err(comms), 1e-9)
    finish(crit, capsys)


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion"):
            try:
                fn(None)
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
