import numpy as np
import pytest
from scipy.integrate import solve_ivp

from lorentzlab import ContractError, DomainEscapeError
from lorentzlab import foliation as fol


def box_for(family, lim, n=2, r_B=0.5, r_J=1.0):
    return fol.make_box(family, lim, np.zeros(n), 1, r_B, r_J)


def test_horizontal_leaves_are_constant():
    H = fol.slope_family(0.0)
    leaf = fol.integrate_leaf(H, box_for([H], H), [0.3], grid=11)
    np.testing.assert_allclose(leaf.values[leaf.mask], 0.3, atol=1e-15)


@pytest.mark.parametrize("slope", [-0.7, 0.25, 1.0])
def test_slope_leaves_are_lines(slope):
    H = fol.slope_family(slope)
    box = box_for([H], H)
    leaf = fol.integrate_leaf(H, box, [0.1], grid=21)
    np.testing.assert_allclose(leaf.values[..., 0], 0.1 + slope * leaf.z[..., 0], atol=1e-14)


@pytest.mark.parametrize("k,t", [(1, 0.2), (4, -0.3), (16, 0.1)])
def test_phi_leaves_match_reference_integration(k, t):
    H = fol.phi_family(k)
    box = box_for([H], fol.slope_family(0.0))
    leaf = fol.integrate_leaf(H, box, [t], grid=21)
    for zi in (0, 5, 15, 20):
        z = leaf.z[zi, 0]
        ref = solve_ivp(lambda s, y: np.sin(k * y) / k, [0.0, z], [t], rtol=1e-12, atol=1e-14) if z else None
        expect = ref.y[0, -1] if z else t
        assert abs(leaf.values[zi, 0] - expect) < 1e-8


def test_leaf_passes_through_its_base_point():
    H = fol.phi_family(2)
    leaf = fol.integrate_leaf(H, box_for([H], fol.slope_family(0.0)), [0.25], grid=41)
    assert leaf.values[20, 0] == 0.25


def test_refining_ode_steps_barely_changes_the_leaf():
    H = fol.phi_family(8)
    box = box_for([H], fol.slope_family(0.0))
    a = fol.integrate_leaf(H, box, [0.2], grid=21, ode_steps=256)
    b = fol.integrate_leaf(H, box, [0.2], grid=21, ode_steps=512)
    assert np.nanmax(np.abs(a.values - b.values)) < 1e-9


@pytest.mark.parametrize("n", [2, 3])
def test_leaf_is_tangent_to_the_distribution(n):
    H = fol.phi_family(2, n=n)
    box = fol.make_box([H], H, np.zeros(n), 1, 0.5, 1.0)
    leaf = fol.integrate_leaf(H, box, [0.1], grid=11)
    assert fol.tangency_residual(H, leaf, ode_steps=128, probes=5) < 1e-6


def test_grid_derivative_of_a_two_dimensional_leaf():
    H = fol.slope_family(0.3, n=3)
    box = fol.make_box([H], H, np.zeros(3), 1, 0.5, 1.0)
    leaf = fol.integrate_leaf(H, box, [0.0], grid=11)
    D = leaf.derivative()
    inner = D[leaf.mask]
    # points whose grid neighbour lies outside the ball have no central difference
    ok = np.all(np.isfinite(inner), axis=(-2, -1))
    assert ok.sum() > 0.5 * len(ok)
    np.testing.assert_allclose(inner[ok][:, 0, 0], 0.3, atol=1e-12)
    np.testing.assert_allclose(inner[ok][:, 0, 1], 0.0, atol=1e-12)


def test_box_invariants():
    with pytest.raises(ContractError):
        fol.BoxDomain(np.zeros(2), 1, 0.5, 1.0, a=1.0, C=3.0)
    with pytest.raises(ContractError):
        fol.BoxDomain(np.zeros(2), 1, 0.5, 1.0, a=2.5, C=0.0)
    box = fol.BoxDomain(np.zeros(2), 1, 0.5, 1.0, a=1.0, C=0.5)
    assert box.r_I == pytest.approx(0.5)
    H = fol.slope_family(0.5)
    with pytest.raises(ContractError):
        fol.integrate_leaf(H, box, [0.6])


def test_understated_slope_bound_lets_the_leaf_escape():
    H = fol.slope_family(2.0)
    box = fol.BoxDomain(np.zeros(2), 1, 0.5, 0.3, a=0.1, C=0.0)
    with pytest.raises(DomainEscapeError) as info:
        fol.integrate_leaf(H, box, [0.0], grid=5)
    assert info.value.point is not None


def test_make_box_shrinks_until_valid():
    H = fol.slope_family(3.0)
    box = fol.make_box([H], H, np.zeros(2), 1, 0.5, 1.0)
    assert box.a * box.r_B < box.r_J and box.r_B < 0.5


def test_cauchy_bound_with_identical_distributions():
    H = fol.phi_family(2)
    box = box_for([H], H)
    chk = fol.cauchy_bound_check(H, H, H, box, [[0.0], [0.2]], grid=11)
    assert chk.lhs == 0.0 and chk.rhs == 0.0 and chk.passed


def test_cauchy_bound_for_slope_family():
    c = 0.2
    fam = [fol.slope_family(c + 1.0 / k) for k in (1, 2, 4)]
    lim = fol.slope_family(c)
    box = box_for(fam, lim)
    assert box.C == 0.0
    chk = fol.cauchy_bound_check(fam[0], fam[2], lim, box, [[0.0]], grid=21)
    assert chk.lhs == pytest.approx(box.r_B * (1.0 - 0.25), abs=1e-12)
    assert chk.passed


def test_constant_family_converges_immediately():
    H = fol.slope_family(0.4)
    box = box_for([H], H)
    rep = fol.convergence_sweep([H, H], [1, 2], H, box, [[0.0]], grid=11)
    assert rep.distance_to_limit == [0.0, 0.0]
    assert rep.all_cauchy_pass


def test_phi_family_sweep():
    ks = [1, 2, 4, 8, 16]
    fam = [fol.phi_family(k) for k in ks]
    box = box_for(fam, fol.slope_family(0.0))
    rep = fol.convergence_sweep(fam, ks, fol.slope_family(0.0), box, [[0.0], [0.3]], grid=21)
    for k, d in zip(ks, rep.distance_to_limit):
        assert d <= box.r_B / k + 1e-8
    assert rep.all_cauchy_pass and rep.c1_decreasing
