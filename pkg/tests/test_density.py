import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from qrmt.density import (
    density_curve, density_moment, functional_eq_residual, integrate_rho, resolvent, rho, rho_rs,
    rs_arc, stieltjes_inversion, support,
)
from qrmt.moments import mu0, rs_moment

lams = st.floats(min_value=0.05, max_value=4.0)


def test_support_is_inversion_symmetric():
    sp = support(1.0)
    assert sp.z_minus * sp.z_plus == pytest.approx(1.0)
    assert sp.z_plus == pytest.approx(2 * math.e - 1 + 2 * math.sqrt(math.e * (math.e - 1)))
    with pytest.raises(ValueError):
        support(0.0)


def test_resolvent_values():
    assert float(np.real(resolvent(-1.0, 1.0))) == pytest.approx(-0.5, abs=1e-14)
    with pytest.raises(ValueError):
        resolvent(1.0, 1.0)      # inside the support
    with pytest.raises(ValueError):
        resolvent(0.0, 1.0)


@pytest.mark.parametrize("offset", ["right", -1.0, 10.0])
def test_resolvent_matches_quadrature(offset):
    lam = 1.0
    sp = support(lam)
    y = sp.z_plus + 0.5 if offset == "right" else offset
    if sp.z_minus < y < sp.z_plus:
        pytest.skip("inside support")
    val = integrate_rho(lambda t: 1.0 / (y - t), lam)
    assert float(np.real(resolvent(y, lam))) == pytest.approx(val, rel=1e-10)


def test_resolvent_normalisation_at_infinity():
    assert abs(1e8 * resolvent(1e8, 1.0) - 1.0) < 1e-6


@settings(max_examples=20, deadline=None)
@given(lams)
def test_mass_and_positivity(lam):
    assert integrate_rho(np.ones_like, lam) == pytest.approx(1.0, abs=1e-10)
    sp = support(lam)
    x = np.linspace(sp.z_minus, sp.z_plus, 101)
    assert np.all(rho(x, lam) >= 0)
    assert rho(sp.z_minus - 1e-3, lam) == 0.0 and rho(sp.z_plus + 1e-3, lam) == 0.0


def test_density_vanishes_continuously_at_edges():
    sp = support(1.0)
    assert rho(sp.z_minus + 1e-10, 1.0) < 1e-3
    assert rho(sp.z_plus - 1e-10, 1.0) < 1e-3


@pytest.mark.parametrize("lam", [0.3, 1.0, 2.5])
def test_moments_match_mu0(lam):
    for l in range(1, 6):
        assert density_moment(l, lam) == pytest.approx(mu0(l, lam), rel=1e-10)


@pytest.mark.parametrize("l", [1, 2, 3])
def test_inversion_symmetry_of_measure(l):
    lam = 1.0
    assert integrate_rho(lambda x: x**l, lam) == pytest.approx(integrate_rho(lambda x: x ** (-l), lam), rel=1e-10)


def test_stieltjes_inversion():
    lam = 1.0
    sp = support(lam)
    xs = np.linspace(sp.z_minus, sp.z_plus, 52)[1:-1]
    err = max(abs(stieltjes_inversion(x, lam) - rho(x, lam)) for x in xs)
    assert err < 1e-6
    assert stieltjes_inversion(1.0, lam) == pytest.approx(rho(1.0, lam), abs=1e-6)
    assert abs(stieltjes_inversion(sp.z_plus + 1.0, lam)) < 1e-8
    assert abs(stieltjes_inversion(-1.0, lam)) < 1e-8


def test_rho_rs_normalisation_and_moments():
    lam = 1.0
    tc = rs_arc(lam)
    assert rho_rs(tc + 0.1, lam) == 0.0 and rho_rs(-tc - 0.1, lam) == 0.0
    mass = integrate.quad(lambda t: rho_rs(t, lam), -tc, tc, limit=200)[0]
    assert mass == pytest.approx(1.0, abs=1e-8)
    for l in range(1, 5):
        m = integrate.quad(lambda t: math.cos(l * t) * rho_rs(t, lam), -tc, tc, limit=200)[0]
        assert m == pytest.approx(rs_moment(l, lam), abs=1e-7)


@pytest.mark.parametrize("lam", [0.1, 1.0, 3.0])
def test_functional_equation(lam):
    sp = support(lam)
    el = math.exp(lam)
    pts = [0.5 * el * sp.z_minus, el, el * (sp.z_minus + 0.25 * (sp.z_plus - sp.z_minus)), 3.0 * el * sp.z_plus]
    for x in pts:
        assert functional_eq_residual(x, lam) < 1e-4


def test_density_curve():
    cur = density_curve(1.0, 10)
    assert len(cur.grid) == 10 and len(cur.values) == 10
    assert abs(cur.mass - 1.0) < 1e-8
    assert np.all(np.diff(cur.grid) > 0)
    np.testing.assert_allclose(cur.values, rho(cur.grid, 1.0))
