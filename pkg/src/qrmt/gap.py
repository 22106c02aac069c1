"""Edge gap probability, leftmost-particle density, and the cylinder-gas product.

The gap probability on (-inf, s) is a Fredholm determinant of the edge
kernel, discretised on Gauss-Legendre nodes as det(I - W^{1/2} K W^{1/2}).
The kernel decays like exp(-c X^2) to the left, so the half line is cut at
min(s, 0) - T with exp(-c T^2) < 1e-16.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import log_ndtr

from .ensemble import QParams
from .errors import NumericalPrecisionError
from .kernels import kernel_edge_matrix


@dataclass(frozen=True)
class FredholmConfig:
    nodes: int = 80
    T: float | None = None      # None: chosen from e^{-c T^2} < 1e-16
    richardson: bool = True
    check: bool = False          # compare with doubled node count

    def depth(self, c: float) -> float:
        if self.T is not None:
            return float(self.T)
        return math.sqrt(16.0 * math.log(10.0) / c)


def _nodes(s: float, p: QParams, cfg: FredholmConfig, n: int | None = None):
    n = cfg.nodes if n is None else n
    lo = min(s, 0.0) - cfg.depth(p.c)
    t, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (s - lo)
    return half * t + 0.5 * (s + lo), half * w


def _operator(s: float, p: QParams, cfg: FredholmConfig, n: int | None = None):
    x, w = _nodes(s, p, cfg, n)
    K = kernel_edge_matrix(x, p)
    sw = np.sqrt(w)
    return x, w, sw[:, None] * K * sw[None, :]


def log_gap_probability(s: float, p: QParams, cfg: FredholmConfig | None = None, n: int | None = None) -> float:
    """log det(I - K) on (-inf, s), from the eigenvalues of the symmetric matrix.

    Summing log1p(-mu) keeps full relative accuracy in 1 - E deep in the
    left tail, where the determinant is 1 - tiny.
    """
    cfg = cfg or FredholmConfig()
    _, _, A = _operator(s, p, cfg, n)
    mu = np.linalg.eigvalsh(A)
    if np.any(mu >= 1.0):
        return -math.inf
    return float(np.sum(np.log1p(-mu)))


def gap_probability(s: float, p: QParams, cfg: FredholmConfig | None = None) -> float:
    """E(0; (-inf, s)) for the edge process."""
    cfg = cfg or FredholmConfig()
    lg = log_gap_probability(s, p, cfg)
    if cfg.check:
        lg2 = log_gap_probability(s, p, cfg, n=2 * cfg.nodes)
        if abs(math.exp(lg) - math.exp(lg2)) > 1e-8:
            raise NumericalPrecisionError(
                f"Fredholm determinant not converged at s={s}: {math.exp(lg)} vs {math.exp(lg2)}")
    return math.exp(lg)


def one_minus_gap(s: float, p: QParams, cfg: FredholmConfig | None = None) -> float:
    return -math.expm1(log_gap_probability(s, p, cfg))


def leftmost_pdf(s: float, p: QParams, cfg: FredholmConfig | None = None,
                 h: float = 1e-3, method: str = "auto") -> float:
    """Density of the leftmost particle, -dE/ds.

    ``method="fd"``: five-point central difference of log E at step h and
    h/2, combined by Richardson extrapolation, then multiplied by -E.
    Working with log E keeps relative accuracy in both tails.
    ``method="resolvent"``: E(s) R(s, s) with the resolvent kernel at the
    endpoint, R(s,s) = K(s,s) + k^T W^{1/2} (I - A)^{-1} W^{1/2} k.
    ``method="auto"`` uses the difference quotient unless E(s) < 1e-8,
    where eigenvalues crowd 1 and the resolvent form is the stable one.
    """
    cfg = cfg or FredholmConfig()
    if method == "auto":
        method = "fd" if log_gap_probability(s, p, cfg) > math.log(1e-8) else "resolvent"
    if method == "resolvent":
        x, w, A = _operator(s, p, cfg)
        from .kernels import kernel_edge

        k = np.asarray(kernel_edge(x, np.full_like(x, s), p))
        b = np.sqrt(w) * k
        R = float(kernel_edge(s, s, p)) + b @ np.linalg.solve(np.eye(len(x)) - A, b)
        return math.exp(log_gap_probability(s, p, cfg)) * R
    if method != "fd":
        raise ValueError(f"unknown method {method!r}")

    f = lambda t: log_gap_probability(t, p, cfg)

    def d5(hh):
        return (-f(s + 2 * hh) + 8 * f(s + hh) - 8 * f(s - hh) + f(s - 2 * hh)) / (12.0 * hh)

    E = math.exp(f(s))
    d1 = d5(h)
    if not cfg.richardson:
        return -E * d1
    d2 = d5(h / 2)
    est = d2 + (d2 - d1) / 15.0
    if abs(d2 - d1) > 1e-5 * max(1e-300, abs(est)):
        raise NumericalPrecisionError(f"finite-difference derivative noisy at s={s}")
    return -E * est


def gap_series_bracket(s: float, p: QParams, cfg: FredholmConfig | None = None):
    """First two truncations of the correlation-function expansion of E.

    Returns (1 - I1, 1 - I1 + I2/2) with I1 = int K(x,x) and
    I2 = int int det[[K11, K12], [K21, K22]].
    """
    cfg = cfg or FredholmConfig()
    x, w = _nodes(s, p, cfg)
    K = kernel_edge_matrix(x, p)
    d = np.diag(K)
    I1 = float(np.sum(w * d))
    I2 = float(I1 * I1 - np.sum(w[:, None] * w[None, :] * K * K))
    return 1.0 - I1, 1.0 - I1 + 0.5 * I2


# ---------------------------------------------------------------------------
# two-dimensional cylinder gas
# ---------------------------------------------------------------------------

def gap2d_log_product(s: float, L: float, n_factors: int | None = None) -> float:
    """log of prod_{l>=0} P(Z > s - m_l), m_l = 2 pi (2l + 1)/L, Z standard normal.

    Each factor is the normalised Gaussian tail (1/2) erfc((s - m_l)/sqrt 2),
    which tends to 1 as s -> -inf.  Without a cap on ``n_factors`` the
    product is truncated once log(factor) > -1e-16 for every later l.
    """
    if n_factors is None:
        # beyond m_l - s > 8.3 the Gaussian tail is below 1e-16
        n_factors = max(1, int(math.ceil(((s + 8.3) * L / (2.0 * math.pi) - 1.0) / 2.0)) + 2)
    l = np.arange(n_factors)
    m = 2.0 * math.pi * (2 * l + 1) / L
    return float(math.fsum(log_ndtr(m - s)))


def gap2d_product(s: float, L: float, n_factors: int | None = None) -> float:
    return math.exp(gap2d_log_product(s, L, n_factors))


@dataclass(frozen=True)
class TailFit:
    coefficient: float
    target: float
    ratio: float
    rel_residual: float
    inconclusive: bool


def right_tail_exponent(L: float, s_range=(10.0, 20.0), points: int = 41,
                        n_factors: int | None = None) -> TailFit:
    """Least-squares fit of -log gap2d against a cubic in s on ``s_range``.

    The tail law is exp(-s^3 L / (24 pi) + O(s^2)), so the fit keeps s^2, s
    and constant terms alongside s^3; the s^3 coefficient is compared with
    L / (24 pi).  A relative fit residual above 10% marks the result
    inconclusive.
    """
    s = np.linspace(s_range[0], s_range[1], points)
    y = np.array([-gap2d_log_product(v, L, n_factors) for v in s])
    A = np.vstack([s**3, s**2, s, np.ones_like(s)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = float(np.linalg.norm(A @ coef - y) / np.linalg.norm(y))
    target = L / (24.0 * math.pi)
    return TailFit(float(coef[0]), target, float(coef[0] / target), resid, resid > 0.1)
