import numpy as np
import pytest
from hypothesis import given, strategies as st

from weightedtrace import loop_geometry as lg
from weightedtrace.corpus import random_loops
from weightedtrace.lie_core import AlgebraError, LoopElement, ad_operator, loop_bracket, random_loop, su2, symplectic_form
from weightedtrace.mode_ops import (Convention, ModeError, abs_dirac_weight, laplacian_plus_one_weight,
                                    laplacian_weight, max_entry_difference, mode_settings)
from weightedtrace.reg_traces import weighted_trace

seeds = st.integers(0, 10 ** 6)
ALG = su2()


def mono(k, label, c=1.0):
    return LoopElement.monomial(ALG, k, label, c)


def real_mono(k, label):
    return mono(k, label) + mono(-k, label)


def apply_band(op, y):
    """Apply a band operator to a loop, mode by mode."""
    out = {}
    for k in op.bands:
        for n, b in y.coeffs.items():
            out[n + k] = out.get(n + k, 0) + op.entry(k, n) @ b
    return LoopElement(y.algebra, out)


def test_config_validation():
    with pytest.raises(ModeError):
        lg.GeometryConfig(ALG, s=0.0)
    with pytest.raises(ModeError):
        lg.kahler_connection_phi(mono(1, "e1"), lg.GeometryConfig(ALG, s=0.75))
    with pytest.raises(ModeError):
        lg.complex_curvature(mono(-1, "e1"), mono(-1, "e2"), lg.GeometryConfig(ALG))


@given(seeds, st.sampled_from([0.25, 0.5, 0.75, 1.0]))
def test_theta_band_route_matches_closed_form(seed, s):
    cfg = lg.GeometryConfig(ALG, s)
    u = random_loop(ALG, 3, np.random.default_rng(seed), integer=True)
    band = lg.theta_s(u, cfg)
    exact = lg.exact_theta(u, cfg)
    ns = np.array([-400, -37, -1, 0, 1, 5, 260, 900])
    for k in set(band.bands) | set(exact.bands):
        np.testing.assert_allclose(band.values(k, ns), exact.entries(k, ns), atol=1e-12)


@given(seeds)
def test_theta_prime_swaps_arguments(seed):
    cfg = lg.GeometryConfig(ALG, 0.75)
    rng = np.random.default_rng(seed)
    w, z = random_loop(ALG, 3, rng, integer=True), random_loop(ALG, 3, rng, integer=True)
    assert apply_band(lg.theta_prime(w, cfg), z).is_close(lg.apply_theta(z, w, cfg), 1e-12)
    assert apply_band(lg.theta_s(z, cfg), w).is_close(lg.apply_theta(z, w, cfg), 1e-12)


def test_theta_on_constant_loop():
    cfg = lg.GeometryConfig(ALG, 0.5)
    c = mono(0, "e1")
    op = lg.theta_s(c, cfg)
    ad = ALG.ad(ALG.basis_vector(0))
    for n in (0, 1, -3, 50):
        mu = cfg.mu([n])[0]
        np.testing.assert_allclose(op.entry(0, n), (1 - 0.5 * mu ** -0.5) * ad, atol=1e-14)
    np.testing.assert_allclose(op.entry(0, 0), 0.5 * ad, atol=1e-14)


def test_constant_loop_curvature():
    cfg = lg.GeometryConfig(ALG, 0.5)
    omega = lg.curvature_s(mono(0, "e1"), mono(0, "e2"), cfg)
    ad3 = ALG.ad(ALG.structure_constants[0, 1])
    for n in (0, 2, -7, 100):
        f = 1 - 0.5 * cfg.mu([n])[0] ** -0.5
        np.testing.assert_allclose(omega.entry(0, n), (f * f - f) * ad3, atol=1e-13)


@given(seeds, st.sampled_from([0.5, 0.75]))
def test_riemann_routes_agree(seed, s):
    cfg = lg.GeometryConfig(ALG, s)
    x, y = random_loops(ALG, 2, 2, seed=seed, real=True)
    band = lg.riemann_operator(x, y, cfg)
    exact = lg.exact_riemann(x, y, cfg)
    ns = np.array([-300, -4, 0, 3, 80, 700])
    for k in set(band.bands) | set(exact.bands):
        np.testing.assert_allclose(band.values(k, ns), exact.entries(k, ns), atol=1e-10)


def test_riemann_is_curvature_action():
    cfg = lg.GeometryConfig(ALG, 0.75)
    x, y, z = real_mono(1, "e1"), real_mono(2, "e2") + mono(0, "e3"), real_mono(1, "e3")
    lhs = apply_band(lg.riemann_operator(x, y, cfg), z)
    rhs = apply_band(lg.curvature_s(z, x, cfg), y)
    assert lhs.is_close(rhs, 1e-10)


PAIRS = [(real_mono(1, "e1"), real_mono(1, "e1")),
         (real_mono(1, "e1"), real_mono(2, "e1") + real_mono(1, "e2"))]


@pytest.mark.parametrize("s", [0.5, 0.75])
@pytest.mark.parametrize("pair", range(len(PAIRS)))
def test_ricci_weighted_equals_truncated(s, pair):
    x, y = PAIRS[pair]
    cfg = lg.GeometryConfig(ALG, s)
    assert lg.ricci(x, y, cfg) == pytest.approx(lg.ricci_truncated(x, y, cfg), abs=1e-5)


@pytest.mark.parametrize("pair", range(len(PAIRS)))
def test_ricci_at_integer_index_is_finite_sum(pair):
    x, y = PAIRS[pair]
    cfg = lg.GeometryConfig(ALG, 1.0)
    exact = lg.exact_riemann(x, y, cfg)
    finite = lg.partial_trace(exact, 64)
    assert finite == pytest.approx(lg.partial_trace(exact, 128), abs=1e-12)
    assert lg.ricci(x, y, cfg) == pytest.approx(finite, abs=1e-9)
    assert lg.ricci(x, y, cfg, laplacian_plus_one_weight()) == pytest.approx(finite, abs=1e-8)


@pytest.mark.parametrize("s", [0.5, 0.75, 1.0])
def test_riemann_residue_vanishes(s):
    x, y = PAIRS[1]
    assert abs(lg.riemann_residue(x, y, lg.GeometryConfig(ALG, s))) < 1e-8


def test_riemann_residue_below_trace_class_range():
    x, y = PAIRS[0]
    assert abs(lg.riemann_residue(x, y, lg.GeometryConfig(ALG, 0.25))) > 0.1


@pytest.mark.parametrize("s", [0.25, 0.5, 0.75])
def test_order_of_traced_riemann(s):
    x, y = PAIRS[1]
    fitted = lg.fit_order(lg.riemann_operator(x, y, lg.GeometryConfig(ALG, s)), 512, traced=True)
    assert abs(fitted + 2 * min(1.0, 2 * s)) < 0.05


def test_order_fit_recovers_known_power():
    op = lg.ExactBands(1, {0: lambda ns: (np.abs(ns) ** -1.5 * (1 + 3.0 / np.abs(ns)))[:, None, None]})
    assert lg.fit_order(op, 512) == pytest.approx(-1.5, abs=1e-3)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_first_chern_matches_symplectic(n):
    cfg = lg.GeometryConfig(ALG, 0.5)
    for i in ("e1", "e2"):
        for j in ("e1", "e3"):
            x, y = mono(n, i), mono(-n, j)
            rec = lg.chern_identities(x, y, cfg)
            target = -1j * symplectic_form(x, y)
            assert rec.max_spread() < 1e-6
            assert rec.first_chern == pytest.approx(target, abs=1e-6)
            assert lg.first_chern_truncated(x, y, cfg) == pytest.approx(target, abs=1e-5)


def test_first_chern_value_from_killing_form():
    cfg = lg.GeometryConfig(ALG, 0.5)
    x, y = mono(3, "e2"), mono(-3, "e2")
    kill = -np.trace(ALG.ad(ALG.basis_vector(1)) @ ALG.ad(ALG.basis_vector(1)))
    assert lg.first_chern(x, y, cfg) == pytest.approx(3 * kill, abs=1e-6)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_phi_toeplitz_identities_kernel_excluded(n):
    cfg = lg.GeometryConfig(ALG, 0.5)
    u, v = mono(n, "e1"), mono(-n, "e2")
    with mode_settings(convention=Convention.KERNEL_EXCLUDED):
        assert max_entry_difference(lg.kahler_connection_phi(u, cfg), lg.dirac_conjugated_toeplitz(u, cfg), 128) < 1e-12
        assert max_entry_difference(lg.kahler_connection_phi(v, cfg), lg.toeplitz(v), 128) < 1e-12


def test_phi_toeplitz_fails_at_kernel_with_kernel_plus():
    cfg = lg.GeometryConfig(ALG, 0.5)
    v = mono(-1, "e2")
    assert max_entry_difference(lg.kahler_connection_phi(v, cfg), lg.toeplitz(v), 128) > 0.1


@pytest.mark.parametrize("k", [-3, -1, 0, 2, 5])
def test_trace_of_phi_vanishes(k):
    cfg = lg.GeometryConfig(ALG, 0.5)
    z = mono(k, "e3") + mono(0, "e1")
    assert abs(weighted_trace(lg.kahler_connection_phi(z, cfg), cfg.weight)) < 1e-9


@given(seeds)
def test_lambda_closed(seed):
    x, y, z = random_loops(ALG, 3, 3, seed=seed)
    assert abs(lg.closedness_lambda(x, y, z)) < 1e-12


@given(seeds)
def test_covariant_trace_variation(seed):
    cfg = lg.GeometryConfig(ALG, 0.5)
    rng = np.random.default_rng(seed)
    u, w = random_loop(ALG, 2, rng, integer=True), random_loop(ALG, 2, rng, integer=True)
    for weight in (laplacian_weight(), abs_dirac_weight()):
        lhs, rhs = lg.covariant_trace_variation(lg.theta_s(u, cfg), ad_operator(w), weight)
        assert lhs == pytest.approx(rhs, abs=1e-8)


def test_richardson_on_synthetic_sequence():
    cutoffs = lg.RICHARDSON_CUTOFFS
    values = [3.0 + 2.0 / m - 5.0 / m ** 2 + 0.5 / m ** 3 for m in cutoffs]
    assert lg.richardson(cutoffs, values, (1, 2, 3)) == pytest.approx(3.0, abs=1e-12)
    with pytest.raises(ModeError):
        lg.richardson((10, 20), [1.0, 2.0], (1, 2))


def test_tail_exponents():
    assert lg.tail_exponents(0.5) == (1.0, 2.0, 3.0, 4.0)
    assert lg.tail_exponents(0.75)[:3] == (1.0, 1.5, 2.0)


def test_validate_loop_rejects_other_algebra():
    with pytest.raises(AlgebraError):
        lg.validate_loop(LoopElement.monomial(su2(), 1, 0), lg.GeometryConfig(ALG))


def test_bracket_with_conjugate_monomial_is_constant():
    assert loop_bracket(mono(2, "e1"), mono(-2, "e2")).is_close(mono(0, "e3"))
