"""Classical standard map, Lyapunov estimators, and ensemble (Liouville) evolution.

The classical pair does not couple: the interaction potential carries an
hbar prefactor that vanishes in the classical limit, so everything here is
strictly one-particle and no function takes a coupling strength.

Map convention (kick first, then drift, matching the quantum split step):

    p' = wrap(p + K sin x)
    x' = wrap(x + p')

with wrap onto the fundamental domain [-pi, pi).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .observables import PhaseSpaceDistribution

TWO_PI = 2.0 * np.pi

ISLAND_K_LOW = 1.0
ISLAND_K_HIGH = 7.0
ISLAND_THRESHOLD = 0.1
ISLAND_PROBE_STEPS = 50


class NoChaoticSeaError(RuntimeError):
    """Every probed initial condition looked island-trapped."""


def wrap(a):
    return (a + np.pi) % TWO_PI - np.pi


@dataclass(frozen=True)
class PhasePoint:
    x: float
    p: float

    def __post_init__(self):
        if not (-np.pi <= self.x < np.pi and -np.pi <= self.p < np.pi):
            raise ValueError("phase point outside fundamental domain [-pi, pi)^2")


@dataclass
class ClassicalEnsemble:
    """Equal-weight swarm of phase points, stored as coordinate arrays."""

    x: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        self.x = np.atleast_1d(np.asarray(self.x, dtype=float))
        self.p = np.atleast_1d(np.asarray(self.p, dtype=float))
        if self.x.shape != self.p.shape or self.x.ndim != 1 or self.x.size < 1:
            raise ValueError("x and p must be equal-length 1d arrays, size >= 1")
        if np.any(self.x < -np.pi) or np.any(self.x >= np.pi) or np.any(self.p < -np.pi) or np.any(self.p >= np.pi):
            raise ValueError("ensemble points must be wrapped into [-pi, pi)")

    @property
    def size(self) -> int:
        return int(self.x.size)


@dataclass(frozen=True)
class LyapunovEstimate:
    lam: float
    std_error: float
    n_samples: int
    n_steps: int
    n_excluded: int
    kick_strength: float

    def __post_init__(self):
        if self.std_error < 0:
            raise ValueError("std_error must be >= 0")
        if self.n_samples < 100:
            raise ValueError("Lyapunov estimates require >= 100 initial conditions")


def _map_arrays(x, p, k):
    p2 = wrap(p + k * np.sin(x))
    x2 = wrap(x + p2)
    return x2, p2


def standard_map_step(pt: PhasePoint, k: float) -> PhasePoint:
    x2, p2 = _map_arrays(np.float64(pt.x), np.float64(pt.p), k)
    return PhasePoint(float(x2), float(p2))


def tangent_step(pt: PhasePoint, v: tuple[float, float], k: float):
    """Advance a point and a tangent vector (column convention, v = (vx, vp)).

    Jacobian in (x, p): [[1 + K cos x, 1], [K cos x, 1]]; det = 1 exactly.
    """
    vx, vp = v
    if vx == 0.0 and vp == 0.0:
        raise ValueError("tangent vector must be nonzero")
    c = k * np.cos(pt.x)
    v2 = ((1.0 + c) * vx + vp, c * vx + vp)
    return standard_map_step(pt, k), v2


def _finite_time_exponents(x, p, k, n_steps):
    """Benettin accumulators for an array of initial conditions."""
    vx = np.ones_like(x)
    vp = np.zeros_like(x)
    acc = np.zeros_like(x)
    for _ in range(n_steps):
        c = k * np.cos(x)
        vx2 = (1.0 + c) * vx + vp
        vp2 = c * vx + vp
        x, p = _map_arrays(x, p, k)
        nrm = np.hypot(vx2, vp2)
        acc += np.log(nrm)
        vx, vp = vx2 / nrm, vp2 / nrm
    return acc / n_steps


def _island_mask(lam_per_sample, k):
    if ISLAND_K_LOW < k < ISLAND_K_HIGH:
        return lam_per_sample < ISLAND_THRESHOLD
    return np.zeros_like(lam_per_sample, dtype=bool)


def lyapunov_exponent(k: float, n_samples: int = 400, n_steps: int = 1000, seed=0) -> LyapunovEstimate:
    """Tangent-map Lyapunov exponent averaged over random initial conditions.

    For mixed phase space (1 < K < 7) samples whose finite-time exponent
    falls below 0.1 are flagged as island candidates and excluded.
    """
    if n_samples < 100:
        raise ValueError("n_samples must be >= 100")
    rng = np.random.default_rng(seed)
    x = rng.uniform(-np.pi, np.pi, n_samples)
    p = rng.uniform(-np.pi, np.pi, n_samples)
    lam = _finite_time_exponents(x, p, k, n_steps)
    trapped = _island_mask(lam, k)
    kept = lam[~trapped]
    if kept.size == 0:
        raise NoChaoticSeaError(f"all {n_samples} samples island-trapped at K={k}")
    err = float(kept.std(ddof=1) / np.sqrt(kept.size)) if kept.size > 1 else 0.0
    return LyapunovEstimate(
        lam=float(max(kept.mean(), 0.0)),
        std_error=err,
        n_samples=n_samples,
        n_steps=n_steps,
        n_excluded=int(trapped.sum()),
        kick_strength=k,
    )


def lyapunov_exponent_separation(
    k: float, n_samples: int = 400, n_steps: int = 1000, seed=0, d0: float = 1e-8
) -> LyapunovEstimate:
    """Independent estimator: growth of a renormalized two-trajectory separation."""
    if n_samples < 100:
        raise ValueError("n_samples must be >= 100")
    rng = np.random.default_rng(seed)
    x = rng.uniform(-np.pi, np.pi, n_samples)
    p = rng.uniform(-np.pi, np.pi, n_samples)
    ang = rng.uniform(0.0, TWO_PI, n_samples)
    xb, pb = x + d0 * np.cos(ang), p + d0 * np.sin(ang)
    acc = np.zeros(n_samples)
    for _ in range(n_steps):
        x, p = _map_arrays(x, p, k)
        xb, pb = _map_arrays(xb, pb, k)
        dx = wrap(xb - x)
        dp = wrap(pb - p)
        d = np.hypot(dx, dp)
        d = np.where(d == 0.0, np.finfo(float).tiny, d)
        acc += np.log(d / d0)
        scale = d0 / d
        xb = x + dx * scale
        pb = p + dp * scale
    lam = acc / n_steps
    trapped = _island_mask(lam, k)
    kept = lam[~trapped]
    if kept.size == 0:
        raise NoChaoticSeaError(f"all {n_samples} samples island-trapped at K={k}")
    err = float(kept.std(ddof=1) / np.sqrt(kept.size)) if kept.size > 1 else 0.0
    return LyapunovEstimate(
        lam=float(max(kept.mean(), 0.0)),
        std_error=err,
        n_samples=n_samples,
        n_steps=n_steps,
        n_excluded=int(trapped.sum()),
        kick_strength=k,
    )


def draw_chaotic_points(k: float, n: int, rng, max_tries: int = 40):
    """Uniform points restricted to the chaotic sea by the island heuristic.

    K >= 7 is treated as fully chaotic (no rejection); K < 1 has no connected
    chaotic sea and is refused.
    """
    rng = np.random.default_rng(rng)
    if k < ISLAND_K_LOW:
        raise NoChaoticSeaError(f"no chaotic sea to sample at K={k} < 1")
    xs, ps = [], []
    have = 0
    for _ in range(max_tries):
        x = rng.uniform(-np.pi, np.pi, n)
        p = rng.uniform(-np.pi, np.pi, n)
        if ISLAND_K_LOW < k < ISLAND_K_HIGH:
            lam = _finite_time_exponents(x, p, k, ISLAND_PROBE_STEPS)
            keep = ~_island_mask(lam, k)
            x, p = x[keep], p[keep]
        xs.append(x)
        ps.append(p)
        have += x.size
        if have >= n:
            break
    if have < n:
        raise NoChaoticSeaError(f"could not find {n} chaotic-sea points at K={k}")
    return np.concatenate(xs)[:n], np.concatenate(ps)[:n]


def sample_gaussian_ensemble(spec, n_points: int, seed, hbar_eff: float) -> ClassicalEnsemble:
    """Points matching the quantum packet's |psi|^2 marginals.

    std(x) = sigma/sqrt(2), std(p) = hbar_eff/(sqrt(2) sigma), wrapped onto
    the torus. hbar_eff must be supplied because a GaussianSpec carries no
    grid to infer it from.
    """
    if n_points < 1:
        raise ValueError("n_points must be >= 1")
    rng = np.random.default_rng(seed)
    sx = spec.sigma / np.sqrt(2.0)
    sp = hbar_eff / (np.sqrt(2.0) * spec.sigma)
    x = wrap(rng.normal(spec.center_x, sx, n_points))
    p = wrap(rng.normal(spec.center_p, sp, n_points))
    return ClassicalEnsemble(x, p)


def evolve_ensemble(ens: ClassicalEnsemble, k: float, n_steps: int) -> ClassicalEnsemble:
    if n_steps < 0:
        raise ValueError("n_steps must be >= 0")
    x, p = ens.x.copy(), ens.p.copy()
    for _ in range(n_steps):
        x, p = _map_arrays(x, p, k)
    return ClassicalEnsemble(x, p)


def histogram(ens: ClassicalEnsemble, bins_x: int, bins_p: int) -> PhaseSpaceDistribution:
    """Normalized occupation histogram over the fundamental domain."""
    if bins_x < 2 or bins_p < 2:
        raise ValueError("need at least 2 bins per axis")
    counts, _, _ = np.histogram2d(
        ens.x, ens.p, bins=[bins_x, bins_p], range=[[-np.pi, np.pi], [-np.pi, np.pi]]
    )
    values = counts / counts.sum()
    xc = -np.pi + TWO_PI * (np.arange(bins_x) + 0.5) / bins_x
    pc = -np.pi + TWO_PI * (np.arange(bins_p) + 0.5) / bins_p
    return PhaseSpaceDistribution(values=values, kind="classical", x_centers=xc, p_centers=pc)
