"""Metropolis sampler for the beta = 2 log-gas in exponential coordinates.

The target density is exp(-c sum x_j^2) prod_{j<k} sinh^2(pi (x_j - x_k)/L).
All chains advance together in numpy; each chain owns its own random
stream spawned from one SeedSequence, so results do not depend on how
many chains are run side by side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .ensemble import QParams, log_abs_sinh, log_density_swe
from .errors import SamplerDiagnosticsError

TARGET_ACCEPTANCE = 0.4
AUDIT_EVERY = 10_000
AUDIT_TOL = 1e-10
MIN_BATCHES = 20


@dataclass
class ChainState:
    """Positions (chains, N), cached log densities, and per-chain step widths."""

    xs: np.ndarray
    energy: np.ndarray
    step_width: np.ndarray
    rngs: list = field(repr=False)


@dataclass(frozen=True)
class SampleStats:
    edges: np.ndarray
    density: np.ndarray          # per-particle one-point density, integrates to 1
    density_se: np.ndarray
    moments: dict                # l -> (estimate of <sum_j e^{2 pi l x_j / L}>, se)
    acceptance_rate: float
    n_batches: int
    sweeps: int
    burn_in: int
    audits: int
    max_audit_error: float

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[1:] + self.edges[:-1])


def default_burn_in(N: int) -> int:
    return max(10_000, 100 * N)


def default_edges(p: QParams, bins: int = 40) -> np.ndarray:
    half = abs(p.left_edge) + 4.0 / math.sqrt(p.c)
    return np.linspace(-half, half, bins + 1)


def _pair_delta(xs: np.ndarray, i: int, new: np.ndarray, L: float) -> np.ndarray:
    """Change in 2 sum_{j != i} log|sinh(pi (x_i - x_j)/L)| when x_i -> new."""
    others = np.delete(xs, i, axis=1)
    old = xs[:, i:i + 1]
    with np.errstate(divide="ignore"):
        a = log_abs_sinh(math.pi * (new[:, None] - others) / L)
        b = log_abs_sinh(math.pi * (old - others) / L)
    return 2.0 * np.sum(a - b, axis=1)


def move_delta(xs: np.ndarray, i: int, new: np.ndarray, p: QParams) -> np.ndarray:
    """log-density difference for moving particle i of every chain to ``new``."""
    old = xs[:, i]
    return -p.c * (new * new - old * old) + _pair_delta(xs, i, new, p.L)


def audit_delta(xs: np.ndarray, i: int, new: np.ndarray, p: QParams) -> float:
    """Largest gap between the O(N) delta and a full recomputation."""
    moved = xs.copy()
    moved[:, i] = new
    full = log_density_swe(moved, p) - log_density_swe(xs, p)
    fast = move_delta(xs, i, new, p)
    ok = np.isfinite(full) & np.isfinite(fast)
    return float(np.max(np.abs(full[ok] - fast[ok]), initial=0.0))


def init_state(p: QParams, n_chains: int, seed: int) -> ChainState:
    rngs = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n_chains)]
    # start on an evenly spaced lattice across the bulk, with a small jitter
    base = np.linspace(p.left_edge, -p.left_edge, p.N) if p.N > 1 else np.zeros(1)
    xs = np.stack([base + 0.01 * r.standard_normal(p.N) for r in rngs])
    energy = np.atleast_1d(log_density_swe(xs, p))
    return ChainState(xs, energy, np.full(n_chains, 0.5 / math.sqrt(p.c)), rngs)


class _Streams:
    """Block draws of (normal, uniform) pairs from each chain's own generator."""

    def __init__(self, rngs, N: int, block: int = 512):
        self.rngs, self.N, self.block = rngs, N, block
        self.pos = block

    def next(self):
        if self.pos == self.block:
            self.z = np.stack([r.standard_normal((self.block, self.N)) for r in self.rngs], axis=1)
            self.u = np.stack([r.random((self.block, self.N)) for r in self.rngs], axis=1)
            self.pos = 0
        k = self.pos
        self.pos += 1
        return self.z[k], self.u[k]


def _sweep(state: ChainState, p: QParams, streams: _Streams) -> np.ndarray:
    z, u = streams.next()
    accepted = np.zeros(len(state.energy))
    with np.errstate(invalid="ignore"):
        logu = np.log(u)
    for i in range(p.N):
        new = state.xs[:, i] + state.step_width * z[:, i]
        d = move_delta(state.xs, i, new, p)
        acc = logu[:, i] < d          # -inf deltas (coincident points) reject
        state.xs[acc, i] = new[acc]
        state.energy[acc] += d[acc]
        accepted += acc
    return accepted / p.N


def _audit(state: ChainState, p: QParams) -> float:
    full = np.atleast_1d(log_density_swe(state.xs, p))
    err = float(np.max(np.abs(full - state.energy)))
    scale = max(1.0, float(np.max(np.abs(full))))
    if err > AUDIT_TOL * scale:
        raise SamplerDiagnosticsError(f"cached energy drifted by {err:.3g}")
    state.energy = full
    return err


def run_chain(p: QParams, steps: int, burn_in: int | None = None, seed: int = 0,
              n_chains: int = 20, edges=None, moment_orders=(1, 2),
              gap_levels=None) -> SampleStats:
    """Sample ``steps`` sweeps per chain after burn-in.

    One sweep is N single-particle Gaussian proposals.  During burn-in each
    chain's proposal width is nudged towards 40% acceptance and then frozen.
    Standard errors come from batch means over (chain, segment) batches,
    with at least 20 batches in total.
    """
    if steps < 1 or n_chains < 1:
        raise ValueError("steps and n_chains must be positive")
    burn_in = default_burn_in(p.N) if burn_in is None else burn_in
    edges = default_edges(p) if edges is None else np.asarray(edges, float)
    nb = len(edges) - 1
    seg = max(1, math.ceil(MIN_BATCHES / n_chains))
    if steps < seg:
        raise ValueError("too few sweeps for the requested batching")
    bounds = np.linspace(0, steps, seg + 1).astype(int)

    state = init_state(p, n_chains, seed)
    streams = _Streams(state.rngs, p.N)
    audits, worst = 0, 0.0

    window = np.zeros(n_chains)
    for t in range(1, burn_in + 1):
        window += _sweep(state, p, streams)
        if t % 100 == 0:
            state.step_width *= np.exp(window / 100.0 - TARGET_ACCEPTANCE)
            window[:] = 0.0
        if t % AUDIT_EVERY == 0:
            worst = max(worst, _audit(state, p)); audits += 1

    C = n_chains
    hist = np.zeros((C, seg, nb))
    mom = {l: np.zeros((C, seg)) for l in moment_orders}
    gaps = None if gap_levels is None else np.zeros((C, seg, len(gap_levels)))
    acc_total = np.zeros(C)
    rows = np.repeat(np.arange(C), p.N)
    for k in range(seg):
        for t in range(bounds[k], bounds[k + 1]):
            acc_total += _sweep(state, p, streams)
            b = np.searchsorted(edges, state.xs, side="right") - 1
            inside = (b >= 0) & (b < nb)
            np.add.at(hist[:, k], (rows[inside.ravel()], b.ravel()[inside.ravel()]), 1.0)
            e = np.exp(2.0 * math.pi * state.xs / p.L)
            for l in moment_orders:
                mom[l][:, k] += np.sum(e**l, axis=1)
            if gaps is not None:
                gaps[:, k] += state.xs.min(axis=1)[:, None] > np.asarray(gap_levels)[None, :]
            if (t + 1) % AUDIT_EVERY == 0:
                worst = max(worst, _audit(state, p)); audits += 1
    worst = max(worst, _audit(state, p)); audits += 1

    rate = float(np.mean(acc_total) / steps)
    if not 0.05 <= rate <= 0.95:
        raise SamplerDiagnosticsError(f"acceptance rate {rate:.3f} outside [0.05, 0.95]")

    lengths = np.diff(bounds).astype(float)[None, :]
    width = np.diff(edges)
    dens = (hist / (lengths[..., None] * p.N * width)).reshape(C * seg, nb)
    mean, se = _batch_stats(dens)
    moments = {}
    for l in moment_orders:
        moments[l] = _batch_stats((mom[l] / lengths).ravel())
    stats = SampleStats(edges, mean, se, moments, rate, C * seg, steps, burn_in, audits, worst)
    if gaps is not None:
        g = (gaps / lengths[..., None]).reshape(C * seg, -1)
        object.__setattr__(stats, "_gap", _batch_stats(g))
    return stats


def _batch_stats(batches: np.ndarray):
    """Mean and standard error across equal-weight batches (axis 0)."""
    n = batches.shape[0]
    m = batches.mean(axis=0)
    se = batches.std(axis=0, ddof=1) / math.sqrt(n)
    if np.ndim(m) == 0:
        return float(m), float(se)
    return m, se


def gap_frequency(p: QParams, s, steps: int, seed: int = 0, n_chains: int = 20,
                  burn_in: int | None = None):
    """Fraction of sweeps with no particle below left_edge + s, with its standard error.

    ``s`` may be a scalar or a sequence; the return matches.
    """
    levels = np.atleast_1d(np.asarray(s, float)) + p.left_edge
    stats = run_chain(p, steps, burn_in, seed, n_chains, edges=np.array([-1.0, 1.0]),
                      moment_orders=(), gap_levels=levels)
    m, se = stats._gap
    if np.ndim(s) == 0:
        return float(m[0]), float(se[0])
    return m, se


def bin_average_density(edges, p: QParams, per_bin: int = 16) -> np.ndarray:
    """Exact K(x, x)/N averaged over each histogram bin (Gauss-Legendre)."""
    from .kernels import density_swe

    t, w = np.polynomial.legendre.leggauss(per_bin)
    edges = np.asarray(edges, float)
    lo, hi = edges[:-1, None], edges[1:, None]
    x = 0.5 * (hi - lo) * t[None, :] + 0.5 * (hi + lo)
    vals = np.asarray(density_swe(x.ravel(), p)).reshape(x.shape)
    return 0.5 * np.sum(w * vals, axis=1) / p.N
