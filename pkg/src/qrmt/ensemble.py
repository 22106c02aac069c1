"""Parameters, weights and exact normalisations of the SW / SW_e ensembles.

Two coordinate systems are used throughout.  The exponential (log-gas)
coordinates ``x`` carry the Boltzmann factor

    prod exp(-c x_j^2) prod_{j<k} sinh^2(pi (x_k - x_j) / L),

and the Stieltjes-Wigert coordinates are ``u = q^{-N} exp(2 pi x / L)``,
with the log-normal weight ``(k / sqrt(pi)) exp(-k^2 log^2 u)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .qcore import check_q
from .signedlog import SignedLog


@dataclass(frozen=True)
class QParams:
    """Coupled parameter set (N, c, L) with k^2 = c L^2 / (2 pi)^2 and q = exp(-1/(2 k^2)).

    Build it with one of the constructors; all derived quantities are
    properties so they can never drift out of sync.
    """

    N: int
    c: float
    L: float
    lam: float | None = None
    derived: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"N must be a positive integer, got {self.N}")
        if not (self.c > 0 and self.L > 0):
            raise ValueError("c and L must be positive")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "c", float(self.c))
        object.__setattr__(self, "L", float(self.L))

    # constructors
    @classmethod
    def from_cL(cls, N: int, c: float, L: float) -> "QParams":
        return cls(N, c, L)

    @classmethod
    def from_q(cls, N: int, q: float, c: float = 1.0) -> "QParams":
        """Fix q and c; the period L follows."""
        check_q(q)
        k2 = 1.0 / (2.0 * -math.log(q))
        L = 2.0 * math.pi * math.sqrt(k2 / c)
        return cls(N, c, L, derived=("L",))

    @classmethod
    def scaled(cls, N: int, lam: float, c: float = 1.0) -> "QParams":
        """Large-N regime q = exp(-lam / N)."""
        if lam <= 0:
            raise ValueError("lambda must be positive")
        k2 = N / (2.0 * lam)
        L = 2.0 * math.pi * math.sqrt(k2 / c)
        return cls(N, c, L, lam=float(lam), derived=("c", "L"))

    def with_N(self, N: int) -> "QParams":
        if self.lam is not None:
            return QParams.scaled(N, self.lam, self.c)
        return QParams(N, self.c, self.L, derived=self.derived)

    # derived quantities
    @property
    def k2(self) -> float:
        return self.c * self.L**2 / (2.0 * math.pi) ** 2

    @property
    def k(self) -> float:
        return math.sqrt(self.k2)

    @property
    def eps(self) -> float:
        """-log q = 2 pi^2 / (c L^2)."""
        if self.lam is not None:
            return self.lam / self.N
        return 1.0 / (2.0 * self.k2)

    @property
    def q(self) -> float:
        return math.exp(-self.eps)

    @property
    def qhat(self) -> float:
        return math.exp(-self.c * self.L**2 / 2.0)

    @property
    def left_edge(self) -> float:
        """Leading-order left edge -pi N / (L c) in x coordinates."""
        return -math.pi * self.N / (self.L * self.c)

    def as_dict(self) -> dict:
        return {"N": self.N, "c": self.c, "L": self.L, "k2": self.k2, "q": self.q,
                "lambda": self.lam, "qhat": self.qhat}


# ---------------------------------------------------------------------------
# coordinates
# ---------------------------------------------------------------------------

def x_to_u(x, p: QParams):
    return np.exp(p.N * p.eps + 2.0 * math.pi * np.asarray(x, float) / p.L)


def u_to_x(u, p: QParams):
    u = np.asarray(u, float)
    if np.any(u <= 0):
        raise ValueError("SW coordinates must be positive")
    return (np.log(u) - p.N * p.eps) * p.L / (2.0 * math.pi)


# ---------------------------------------------------------------------------
# weights and one-dimensional moments
# ---------------------------------------------------------------------------

def weight_sw(u, p: QParams):
    """Log-normal weight (k / sqrt(pi)) exp(-k^2 log(u)^2)."""
    u = np.asarray(u, float)
    if np.any(u <= 0):
        raise ValueError("weight_sw is defined for u > 0")
    out = p.k / math.sqrt(math.pi) * np.exp(-p.k2 * np.log(u) ** 2)
    return float(out) if out.ndim == 0 else out


def log_weight_sw(u, p: QParams):
    u = np.asarray(u, float)
    return math.log(p.k / math.sqrt(math.pi)) - p.k2 * np.log(u) ** 2


def lognormal_moment(n: float, p: QParams) -> SignedLog:
    """int_0^inf u^n w(u) du = q^{-(n+1)^2/2}."""
    return SignedLog(1, 0.5 * (n + 1.0) ** 2 * p.eps)


# ---------------------------------------------------------------------------
# normalisations
# ---------------------------------------------------------------------------

def _log_sw_common(N: int, q: float) -> float:
    acc = math.lgamma(N + 1)
    for j in range(1, N):
        acc += (N - j) * math.log1p(-q**j)
    return acc


def norm_sw(p: QParams) -> SignedLog:
    """C_N = N! q^{-N(2N-1)(2N+1)/6} prod_{j<N} (1 - q^j)^{N-j}."""
    N = p.N
    return SignedLog(1, _log_sw_common(N, p.q) + N * (2 * N - 1) * (2 * N + 1) / 6.0 * p.eps)


def norm_swe(p: QParams) -> SignedLog:
    """Normalisation of the exponential-coordinate ensemble.

    C = N! 2^{-N(N-1)} (pi/c)^{N/2} q^{-N(N^2-1)/6} prod_{j<N} (1 - q^j)^{N-j},
    i.e. the SW constant times (pi/c)^{N/2} 2^{-N(N-1)} q^{N^3/2}.  This is
    what the change of variables gives; it is checked against quadrature in
    the tests.
    """
    N = p.N
    lg = (_log_sw_common(N, p.q) - N * (N - 1) * math.log(2.0)
          + 0.5 * N * math.log(math.pi / p.c) + N * (N * N - 1) / 6.0 * p.eps)
    return SignedLog(1, lg)


# ---------------------------------------------------------------------------
# Boltzmann factor
# ---------------------------------------------------------------------------

def log_abs_sinh(t):
    """log|sinh t| without overflow for large |t|."""
    a = np.abs(np.asarray(t, float))
    with np.errstate(divide="ignore"):
        return a + np.log1p(-np.exp(-2.0 * a)) - math.log(2.0)


def log_density_swe(xs, p: QParams) -> float:
    """Unnormalised log density -2 U_L of a configuration in x coordinates.

    Coincident points give -inf.  Works on a single configuration (N,) or a
    batch (..., N).
    """
    xs = np.asarray(xs, float)
    one = -p.c * np.sum(xs**2, axis=-1)
    d = xs[..., :, None] - xs[..., None, :]
    iu = np.triu_indices(xs.shape[-1], 1)
    pair = 2.0 * np.sum(log_abs_sinh(math.pi * d[..., iu[0], iu[1]] / p.L), axis=-1)
    out = one + pair
    return float(out) if np.ndim(out) == 0 else out


def log_density_swstar(us, N: int, p: QParams) -> float:
    """log of prod u^{-N} w(u) prod (u_j - u_k)^2, the inversion-symmetric form."""
    us = np.asarray(us, float)
    lw = np.sum(-N * np.log(us) + log_weight_sw(us, p))
    d = us[:, None] - us[None, :]
    iu = np.triu_indices(len(us), 1)
    with np.errstate(divide="ignore"):
        return float(lw + 2.0 * np.sum(np.log(np.abs(d[iu]))))


# ---------------------------------------------------------------------------
# exact mean square displacement at L = 2 pi
# ---------------------------------------------------------------------------

def mean_square_displacement(N: int, c: float) -> float:
    """<sum x_j^2> at L = 2 pi, as -d/dc log C(c).

    At L = 2 pi we have k^2 = c and q = exp(-1/(2c)), so d(log q)/dc =
    1/(2 c^2).  Differentiating the closed-form normalisation term by term:

        N/(2c) + N(N^2-1)/(12 c^2) + sum_j (N-j) j q^j / ((1-q^j) 2 c^2).
    """
    if c <= 0:
        raise ValueError("c must be positive")
    q = math.exp(-1.0 / (2.0 * c))
    out = N / (2.0 * c) + N * (N * N - 1) / (12.0 * c * c)
    for j in range(1, N):
        out += (N - j) * j * q**j / (-math.expm1(j * math.log(q))) / (2.0 * c * c)
    return out
