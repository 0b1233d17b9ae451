import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lorentzlab import ContractError, UnsupportedIndexError, catalog, gcn
from lorentzlab.curvature import gram_schmidt_frame, orthonormal_christoffel
from lorentzlab.distributions import Distribution
from lorentzlab.fields import ScalarField
from lorentzlab.stretch import (StretchSpec, b_beta, bar, bar_frame, key_lemma_bound, niceness_certificate, normal_block,
                                ricci_asymptotics, skew_normal_form, stretch, stretched_christoffel_table,
                                switch)
from lorentzlab.suites import g1_family


@pytest.mark.parametrize("c", [2.0, 3.0])
def test_stretching_g1_gives_gc(c):
    g, H, V = g1_family()
    gb = stretch(StretchSpec(g, V, ScalarField.constant(1.0 / c, 3)))
    x = np.random.default_rng(0).uniform(-2, 2, (20, 3))
    gc = gcn.gcn_metric(gcn.GcnParams(c, 3))
    np.testing.assert_allclose(gb(x), gc(x), atol=1e-12)
    np.testing.assert_allclose(gb.jet(x, 2).hess, gc.jet(x, 2).hess, atol=1e-10)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 1000), st.floats(0.05, 3.0))
def test_bar_map_is_an_isometry(seed, f):
    g = catalog.polynomial_metric(4, seed=seed)
    x = np.random.default_rng(seed).uniform(-0.5, 0.5, 4)
    fr = gram_schmidt_frame(g, x)
    spec = StretchSpec(g, Distribution(fr.fields[:1]), ScalarField.constant(f, 4))
    u, v = np.random.default_rng(seed + 1).normal(size=(2, 4))
    G, Gb = g(x), stretch(spec)(x)
    assert bar(spec, x, u) @ Gb @ bar(spec, x, v) == pytest.approx(u @ G @ v, rel=1e-9, abs=1e-9)


def test_switch_is_riemannian_and_flips_only_V():
    g, H, V = g1_family()
    spec = StretchSpec(g, V, ScalarField.constant(1.0, 3))
    x = np.array([0.1, 0.5, -0.9])
    S = switch(spec, x)
    assert np.all(np.linalg.eigvalsh(S) > 0)
    Hb, Vb, G = H.basis(x), V.basis(x), g(x)
    np.testing.assert_allclose(Hb.T @ S @ Hb, Hb.T @ G @ Hb, atol=1e-14)
    np.testing.assert_allclose(Vb.T @ S @ Vb, -(Vb.T @ G @ Vb), atol=1e-14)


def test_stretch_spec_contract():
    g = catalog.minkowski(3)
    with pytest.raises(ContractError):
        StretchSpec(g, Distribution.coordinate([1], 3), ScalarField.constant(1.0, 3)).check(np.zeros(3))
    with pytest.raises(ContractError):
        StretchSpec(g, Distribution.coordinate([0], 3), ScalarField.constant(-1.0, 3)).check(np.zeros(3))


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 1000), st.sampled_from([(3, 1), (4, 1), (4, 2)]))
def test_stretched_table_matches_brute_force(seed, nq):
    n, q = nq
    g = catalog.polynomial_metric(n, q, seed=seed, scale=0.1)
    x = np.random.default_rng(seed).uniform(-0.5, 0.5, n)
    fr = gram_schmidt_frame(g, x)
    f = ScalarField(lambda y: 0.8 + 0.1 * np.sin(y[..., 0] + y[..., 1]), n)
    gb = stretch(StretchSpec(g, Distribution(fr.fields[:q]), f))
    brute = orthonormal_christoffel(gb, bar_frame(fr, f, q), x).entries
    Gam = orthonormal_christoffel(g, fr, x).entries
    df = fr.vectors(x) @ f.jet(x, 1).grad
    tab = stretched_christoffel_table(Gam, float(f(x)), df, [i < q for i in range(n)])
    assert np.max(np.abs(tab - brute)) < 1e-9


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 7))
def test_skew_normal_form_reconstructs(seed, m):
    M = np.random.default_rng(seed).normal(size=(m, m))
    A = M - M.T
    lam, P = skew_normal_form(A)
    np.testing.assert_allclose(P @ P.T, np.eye(m), atol=1e-12)
    np.testing.assert_allclose(P.T @ normal_block(lam, m) @ P, A, atol=1e-10)
    assert np.all(lam >= 0) and np.all(np.diff(lam) <= 0)
    assert len(lam) == m // 2


def test_skew_normal_form_rejects_non_skew():
    with pytest.raises(ContractError):
        skew_normal_form(np.eye(3))


@pytest.mark.parametrize("c", [1.0, 2.0])
def test_b_beta_of_gc(c):
    fr = gcn.gcn_frame(gcn.GcnParams(c, 3))
    H = Distribution(fr.fields[1:])
    bb = b_beta(gcn.gcn_metric(gcn.GcnParams(c, 3)), H, np.array([0.2, 0.3, -0.4]))
    np.testing.assert_allclose(bb.b, 2 * c * c * np.eye(3), atol=1e-12)
    assert bb.trace_b == pytest.approx(2 * c * c)
    assert bb.lam_sq == pytest.approx(c * c)
    lam, _ = skew_normal_form(bb.A)
    np.testing.assert_allclose(lam, [c], atol=1e-12)


def test_b_beta_needs_codimension_one():
    with pytest.raises(UnsupportedIndexError):
        b_beta(catalog.polynomial_metric(4, 2), Distribution.coordinate([2, 3], 4), np.zeros(4))


def test_gc_plane_field_is_nice():
    fr = gcn.gcn_frame(gcn.GcnParams(1.5, 4))
    H = Distribution(fr.fields[1:])
    cert = niceness_certificate(gcn.gcn_metric(gcn.GcnParams(1.5, 4)), H, np.zeros((1, 4)), trials=200)
    assert all(cert.nice().values())


def test_integrable_plane_field_is_not_nice():
    cert = niceness_certificate(catalog.minkowski(3), Distribution.coordinate([1, 2], 3), np.zeros((1, 3)),
                                trials=100)
    assert not any(cert.nice().values())


def test_asymptotics_exact_family():
    g, H, V = g1_family()
    rep = ricci_asymptotics(g, H, np.array([0.3, -0.2, 0.5]), V=V)
    for s in rep.scaled:
        assert np.max(np.abs(s - rep.quarter_b)) < 1e-9


def test_asymptotics_of_integrable_flat_data_vanish():
    rep = ricci_asymptotics(catalog.minkowski(3), Distribution.coordinate([1, 2], 3), np.zeros(3),
                            V=Distribution.coordinate([0], 3))
    assert rep.C0 == rep.C1 == rep.C == 0.0
    assert not np.any(rep.quarter_b)


def test_key_lemma_on_both_sides_of_the_threshold():
    g = catalog.minkowski(3)
    x = np.zeros(3)
    V, H = np.eye(3)[:, :1], np.eye(3)[:, 1:]
    f = 0.1
    flat = H + V @ np.array([[0.05, 0.0]])
    res = key_lemma_bound(g, V, H, f, flat, x)
    assert res.nontimelike and res.slack == pytest.approx(0.05)
    steep = H + V @ np.array([[0.2, 0.0]])
    res = key_lemma_bound(g, V, H, f, steep, x)
    assert not res.nontimelike
    w = res.witness
    Gb = np.diag([-1.0 / f**2, 1.0, 1.0])
    assert w @ Gb @ w < 0
