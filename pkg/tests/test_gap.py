import math

import numpy as np
import pytest
from scipy import integrate

from qrmt import gap as gp
from qrmt.ensemble import QParams
from qrmt.kernels import kernel_edge


@pytest.fixture(scope="module")
def p():
    return QParams.from_cL(1, 1.0, 2 * math.pi)


def test_far_left_gap_is_one(p):
    cfg = gp.FredholmConfig()
    assert gp.gap_probability(-cfg.depth(p.c), p, cfg) == pytest.approx(1.0, abs=1e-10)


def test_monotone_and_bounded(p):
    s = np.arange(-4.0, 6.01, 0.25)
    g = np.array([gp.gap_probability(v, p) for v in s])
    assert np.all(g > 0) and np.all(g <= 1.0)
    assert np.all(np.diff(g) <= 1e-15)
    assert g[-1] < 1e-40


@pytest.mark.parametrize("s", [-3.0, -1.0, 0.0, 1.5, 4.0])
def test_node_and_depth_doubling(p, s):
    base = gp.gap_probability(s, p, gp.FredholmConfig(check=True))
    deep = gp.gap_probability(s, p, gp.FredholmConfig(T=2 * gp.FredholmConfig().depth(p.c)))
    assert base == pytest.approx(deep, abs=1e-8)


@pytest.mark.parametrize("s", np.arange(-4.0, 4.01, 1.0))
def test_two_term_series_bracket(p, s):
    lo, hi = gp.gap_series_bracket(s, p)
    g = gp.gap_probability(s, p)
    assert lo - 1e-12 <= g <= hi + 1e-12


def test_pdf_normalised(p):
    mass, _ = integrate.quad(lambda s: gp.leftmost_pdf(s, p), -5.0, 8.0, limit=200)
    assert mass == pytest.approx(1.0, abs=1e-3)


@pytest.mark.parametrize("s", [-3.0, -1.0, 0.5, 2.0])
def test_pdf_methods_agree(p, s):
    a = gp.leftmost_pdf(s, p, method="fd")
    b = gp.leftmost_pdf(s, p, method="resolvent")
    assert a == pytest.approx(b, rel=1e-6)


def test_pdf_bad_method(p):
    with pytest.raises(ValueError):
        gp.leftmost_pdf(0.0, p, method="nope")


def test_left_tail(p):
    s = np.linspace(-4.5, -3.0, 16)
    lp = np.log([gp.leftmost_pdf(v, p) for v in s])
    assert np.polyfit(s, lp, 2)[0] == pytest.approx(-p.c, rel=0.05)
    for v in (-3.5, -4.0, -5.0):
        assert gp.leftmost_pdf(v, p) / kernel_edge(v, v, p) == pytest.approx(1.0, rel=0.1)


@pytest.mark.parametrize("c", [0.5, 2.0])
def test_left_tail_other_strengths(c):
    q = QParams.from_cL(1, c, 2 * math.pi)
    s = np.linspace(-4.5, -3.0, 16)
    lp = np.log([gp.leftmost_pdf(v, q) for v in s])
    assert np.polyfit(s, lp, 2)[0] == pytest.approx(-c, rel=0.05)


def test_gap2d_limits_and_monotonicity():
    L = 2 * math.pi
    assert gp.gap2d_product(-30.0, L) == pytest.approx(1.0, abs=1e-12)
    s = np.linspace(-5, 15, 41)
    g = np.array([gp.gap2d_product(v, L) for v in s])
    assert np.all(np.diff(g) < 0)
    assert gp.gap2d_product(25.0, L) < 1e-100


def test_gap2d_truncation_is_converged():
    L = 2 * math.pi
    for s in (0.0, 10.0, 20.0):
        a = gp.gap2d_log_product(s, L)
        n = int(math.ceil(((s + 8.3) * L / (2 * math.pi) - 1) / 2)) + 2
        assert a == pytest.approx(gp.gap2d_log_product(s, L, 2 * n + 10), abs=1e-15)


def test_right_tail_coefficient():
    f = gp.right_tail_exponent(2 * math.pi)
    assert f.target == pytest.approx(1 / 12)
    assert f.ratio == pytest.approx(1.0, abs=0.05)
    assert not f.inconclusive
    g = gp.right_tail_exponent(math.pi)
    assert f.coefficient / g.coefficient == pytest.approx(2.0, rel=0.05)


def test_right_tail_stable_under_more_factors():
    a = gp.right_tail_exponent(2 * math.pi)
    b = gp.right_tail_exponent(2 * math.pi, n_factors=200)
    assert a.coefficient == pytest.approx(b.coefficient, rel=1e-10)
