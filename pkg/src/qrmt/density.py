"""Limiting global density of the scaled ensemble (q = e^{-lambda/N}).

Coordinates here are the inversion-symmetric ones: the support is
[z_-, z_+] with z_- z_+ = 1.  The density in SW coordinates is the same
curve stretched by e^lambda.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import NumericalPrecisionError


@dataclass(frozen=True)
class Support:
    z_minus: float
    z_plus: float
    lam: float

    @property
    def width(self) -> float:
        return self.z_plus - self.z_minus


def support(lam: float) -> Support:
    """Endpoints -z -/+ sqrt(z^2 - 1) with z = 1 - 2 e^lam."""
    if lam <= 0:
        raise ValueError("lambda must be positive")
    # -z = 2 e^lam - 1 and z^2 - 1 = 4 e^lam (e^lam - 1); written to avoid cancellation
    a = 2.0 * math.exp(lam) - 1.0
    r = 2.0 * math.sqrt(math.exp(lam) * math.expm1(lam))
    zp = a + r
    return Support(1.0 / zp, zp, float(lam))


def _sqrt_disc(y, sp: Support):
    # sqrt((1+y)^2 - 4 y e^lam) with a cut along the support only
    return np.sqrt(y - sp.z_plus + 0j) * np.sqrt(y - sp.z_minus + 0j)


def resolvent(y, lam: float):
    """Closed-form resolvent G(y) = int rho(t) / (y - t) dt.

    Real y must be off the support and nonzero; complex y is accepted
    anywhere off the real segment.  The square root is taken as
    sqrt(y - z_+) sqrt(y - z_-), which is analytic off [z_-, z_+] and
    behaves like y at infinity, so that y G(y) -> 1.
    """
    sp = support(lam)
    yc = np.asarray(y, dtype=complex)
    if np.any(yc == 0):
        raise ValueError("resolvent undefined at y = 0")
    real = np.isrealobj(y) or np.all(np.imag(yc) == 0)
    if real:
        yr = yc.real
        if np.any((yr >= sp.z_minus) & (yr <= sp.z_plus)):
            raise ValueError("real y inside the support; use rho instead")
    s = _sqrt_disc(yc, sp)
    e = math.exp(lam)
    out = -np.log((1.0 + yc + s) / (2.0 * yc * e)) / (lam * yc)
    if real:
        out = out.real
    return out.item() if np.ndim(out) == 0 else out


def rho(x, lam: float):
    """Scaled density (1/(pi lam x)) arctan(sqrt(4 e^lam x - (1+x)^2) / (1+x)) on the support."""
    sp = support(lam)
    x = np.asarray(x, float)
    inside = (x > sp.z_minus) & (x < sp.z_plus)
    xi = np.where(inside, x, 1.0)
    disc = np.maximum(4.0 * math.exp(lam) * xi - (1.0 + xi) ** 2, 0.0)
    # 1 + x > 0 on the support, so the plain arctan is already the continuous branch
    val = np.arctan2(np.sqrt(disc), 1.0 + xi) / (math.pi * lam * xi)
    out = np.where(inside, val, 0.0)
    return float(out) if out.ndim == 0 else out


def density_nodes(lam: float, n: int = 200):
    """Gauss-Legendre nodes in theta for x = mid - half cos(theta).

    The square-root edges become analytic in theta, so smooth integrands
    against rho converge spectrally.  Returns (x, weights) with the
    Jacobian folded into the weights.
    """
    sp = support(lam)
    t, w = np.polynomial.legendre.leggauss(n)
    th = 0.5 * math.pi * (t + 1.0)
    mid = 0.5 * (sp.z_plus + sp.z_minus)
    half = 0.5 * sp.width
    x = mid - half * np.cos(th)
    return x, w * 0.5 * math.pi * half * np.sin(th)


def integrate_rho(f, lam: float, n: int = 200) -> float:
    """int f(x) rho(x) dx over the support."""
    x, w = density_nodes(lam, n)
    return float(np.sum(w * rho(x, lam) * f(x)))


def density_moment(l: int, lam: float, n: int = 200) -> float:
    return integrate_rho(lambda x: x**l, lam, n)


@dataclass(frozen=True)
class DensityCurve:
    grid: np.ndarray
    values: np.ndarray
    mass: float
    support: Support


def density_curve(lam: float, points: int) -> DensityCurve:
    """Density on a Chebyshev-type grid clustered at the soft edges.

    ``mass`` is computed with the matching theta-quadrature.
    """
    if points < 2:
        raise ValueError("need at least 2 points")
    sp = support(lam)
    th = np.linspace(0.0, math.pi, points)
    mid = 0.5 * (sp.z_plus + sp.z_minus)
    x = mid - 0.5 * sp.width * np.cos(th)
    return DensityCurve(x, rho(x, lam), integrate_rho(np.ones_like, lam), sp)


def stieltjes_inversion(x: float, lam: float, eps=(1e-3, 5e-4, 2.5e-4), tol: float = 1e-7) -> float:
    """Density from the jump of G across the cut, extrapolated to eps -> 0.

    (1/(2 pi i)) (G(x - i eps) - G(x + i eps)) = -Im G(x + i eps) / pi,
    then Neville (Richardson) extrapolation through the given eps values.
    """
    eps = np.asarray(eps, float)
    vals = np.array([-np.imag(resolvent(complex(x, e), lam)) / math.pi for e in eps])
    # Neville table at 0
    P = vals.copy()
    n = len(eps)
    prev = P[0]
    for m in range(1, n):
        for i in range(n - m):
            P[i] = (eps[i + m] * P[i] - eps[i] * P[i + 1]) / (eps[i + m] - eps[i])
        if m == n - 1:
            # off the support the raw values are O(eps) and P[0] ~ 0, so scale by the data
            scale = max(abs(P[0]), float(np.max(np.abs(vals))))
            if abs(P[0] - prev) > max(tol, 1e-3 * scale):
                raise NumericalPrecisionError("Stieltjes inversion extrapolation did not settle")
        prev = P[0]
    return float(P[0])


def rho_rs(theta, lam: float):
    """Rogers-Szego limiting density on the circle.

    (1/(pi lam)) log((1 - cos t_c + 2 cos t + 2 cos(t/2) sqrt(2 cos t - 2 cos t_c)) / (1 + cos t_c))
    for cos t >= cos t_c = 2 e^{-lam/2} - 1, zero elsewhere.  In this form it
    already integrates to 1 over [-pi, pi].
    """
    th = np.asarray(theta, float)
    cc = 2.0 * math.exp(-0.5 * lam) - 1.0
    ct = np.cos(th)
    inside = ct >= cc
    rad = np.sqrt(np.maximum(2.0 * ct - 2.0 * cc, 0.0))
    arg = (1.0 - cc + 2.0 * ct + 2.0 * np.cos(0.5 * th) * rad) / (1.0 + cc)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = np.log(np.where(inside, arg, 1.0)) / (math.pi * lam)
    out = np.where(inside, val, 0.0)
    return float(out) if out.ndim == 0 else out


def rs_arc(lam: float) -> float:
    """Half-width theta_c of the Rogers-Szego arc."""
    return math.acos(2.0 * math.exp(-0.5 * lam) - 1.0)


# ---------------------------------------------------------------------------
# functional equation and log potential (SW coordinates)
# ---------------------------------------------------------------------------

def _hilbert(y: float, lam: float) -> float:
    """PV int rho(s) / (y - s) ds by quadrature (plain integral off the support)."""
    sp = support(lam)
    f = lambda s: rho(s, lam)
    if sp.z_minus < y < sp.z_plus:
        val, err = integrate.quad(f, sp.z_minus, sp.z_plus, weight="cauchy", wvar=y,
                                  epsabs=1e-14, epsrel=1e-12, limit=400)
        # quad returns int f(s) / (s - y)
        val = -val
    else:
        val, err = integrate.quad(lambda s: f(s) / (y - s), sp.z_minus, sp.z_plus,
                                  epsabs=1e-14, epsrel=1e-12, limit=400)
    if not np.isfinite(val) or err > 1e-8 * max(1.0, abs(val)):
        raise NumericalPrecisionError(f"principal value quadrature did not converge (err {err:.2g})")
    return float(val)


def functional_eq_residual(x: float, lam: float) -> float:
    """|e^{-u} + e^{u-y} - e^{-lam} - e^{-y}| with y = log x.

    ``x`` is in SW coordinates (support e^lam [z_-, z_+]), where the density
    is rho_SW(t) = e^{-lam} rho(t e^{-lam}).  Off the support
    u = lam x int rho_SW(t)/(x - t) dt.  On the support u is the boundary
    value lam x (PV - i pi rho_SW(x)); the real principal value alone does
    not satisfy the equation.
    """
    if x <= 0:
        raise ValueError("x must be positive")
    e = math.exp(-lam)
    xs = x * e
    hv = e * _hilbert(xs, lam)
    u = complex(lam * x * hv, -math.pi * lam * x * e * rho(xs, lam))
    y = math.log(x)
    r = np.exp(-u) + np.exp(u - y) - math.exp(-lam) - math.exp(-y)
    return float(abs(r))


def log_potential_sw(x: float, lam: float, n: int = 400) -> float:
    """int log|x - t| rho_SW(t) dt for x off the SW-coordinate support."""
    el = math.exp(lam)
    return integrate_rho(lambda s: np.log(np.abs(x - el * s)), lam, n)
