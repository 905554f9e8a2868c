"""Reduced densities, purity, and torus phase-space distributions.

The discrete Wigner function lives on a 2N x 2N half-step lattice

    X_a = -pi + (pi/N)(a + 2 x_offset),   P_b = -pi + (pi/N)(b + 2 p_offset)

for a, b = 0..2N-1, defined by the parity-constrained sum

    W(a, b) = (-1)^a / (2N) * sum_{a' = a mod 2}  rho[(a+a')/2 mod N, (a-a')/2 mod N]
                                                  * exp[-i (pi/N) (b + 2 p_offset) a']

which is real whenever 2*p_offset is an integer, sums to exactly Tr rho = 1,
and reproduces diag(rho) as its x-marginal on even columns. Localized states
show the well-known ghost images: a copy at the pi-shifted position whose sign
alternates along the momentum axis (and vice versa). They are a boundary
condition artifact of the periodized lattice and are kept, not filtered;
Gaussian smoothing (the Husimi view) suppresses them exponentially.

Quantitative quantum-classical comparisons use the Husimi distribution against
an identically smoothed classical histogram, since total variation between a
signed Wigner function and a positive density is not meaningful.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft

TWO_PI = 2.0 * np.pi

KINDS = ("wigner", "husimi", "classical")


@dataclass
class ReducedDensity:
    """One-particle density matrix from a partial trace."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"density matrix must be square, got {m.shape}")
        if np.abs(m - m.conj().T).max() > 1e-9:
            raise ValueError("density matrix is not Hermitian")
        tr = m.trace().real
        if abs(tr - 1.0) > 1e-9:
            raise ValueError(f"density matrix trace {tr} is not 1")
        self.matrix = m

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass
class PhaseSpaceDistribution:
    """Real 2D phase-space grid with explicit cell centers.

    values[i, j] is the weight at (x_centers[i], p_centers[j]); the grid sums
    to 1. Kind 'wigner' may be negative pointwise; 'husimi' and 'classical'
    are nonnegative.
    """

    values: np.ndarray
    kind: str
    x_centers: np.ndarray
    p_centers: np.ndarray

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        v = np.asarray(self.values, dtype=float)
        if v.shape != (len(self.x_centers), len(self.p_centers)):
            raise ValueError("values shape does not match center arrays")
        if self.kind != "wigner" and v.min() < -1e-9:
            raise ValueError(f"{self.kind} distribution has negative weight {v.min()}")
        self.values = v


@dataclass
class PuritySeries:
    """P(t) at integer kick counts, with run metadata."""

    times: np.ndarray
    values: np.ndarray
    stderr: np.ndarray
    n1: int
    n2: int
    k1: float
    k2: float
    eps: float
    seed: int
    n_initial_states: int

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=int)
        self.values = np.asarray(self.values, dtype=float)
        self.stderr = np.asarray(self.stderr, dtype=float)
        if not (self.times.shape == self.values.shape == self.stderr.shape):
            raise ValueError("times, values, stderr must have equal shapes")
        lo = 1.0 / min(self.n1, self.n2) - 1e-9
        if self.values.min() < lo or self.values.max() > 1.0 + 1e-9:
            raise ValueError("purity values outside [1/min(N1,N2), 1]")


def reduce(state, which: int) -> ReducedDensity:
    """Partial trace of a pure two-particle state; which selects particle 1 or 2."""
    a = state.amplitudes
    if which == 1:
        return ReducedDensity(a @ a.conj().T)
    if which == 2:
        return ReducedDensity(a.T @ a.conj())
    raise ValueError("which must be 1 or 2")


def purity(rho: ReducedDensity) -> float:
    m = rho.matrix
    return float(np.vdot(m, m).real)


def purity_from_state(state) -> float:
    """Tr[rho1^2] without forming the larger Gram matrix.

    ||A A^H||_F^2 equals ||A^H A||_F^2, so the Gram matrix of the smaller
    dimension suffices; rank-1 BLAS herk does the heavy lifting.
    """
    from scipy.linalg import blas

    a = state.amplitudes if hasattr(state, "amplitudes") else np.asarray(state)
    n1, n2 = a.shape
    a = np.ascontiguousarray(a if n1 <= n2 else a.T)
    g = blas.zherk(1.0, a, trans=0, lower=0)
    whole = np.vdot(g, g).real
    diag = float((np.abs(np.diagonal(g)) ** 2).sum())
    return float(2.0 * whole - diag)


def _wigner_index_tables(n: int):
    a = np.arange(2 * n)[:, None]
    r = np.arange(n)[None, :]
    a0 = a & 1
    m = (a + a0) // 2
    j1 = (m + r) % n
    j2 = (m - a0 - r) % n
    return a0, j1, j2


def wigner(rho: ReducedDensity, grid) -> PhaseSpaceDistribution:
    """Discrete Wigner function on the 2N x 2N half-step lattice."""
    n = grid.n_sites
    if rho.dim != n:
        raise ValueError(f"density dim {rho.dim} does not match grid N={n}")
    tp2 = 2.0 * grid.p_offset
    if abs(tp2 - round(tp2)) > 1e-12:
        raise ValueError("wigner requires p_offset in {0, 0.5} for a real-valued lattice")
    tp2 = int(round(tp2))
    a0, j1, j2 = _wigner_index_tables(n)
    v = rho.matrix[j1, j2] * np.exp(-1j * TWO_PI * tp2 * np.arange(n) / n)[None, :]
    t = sfft.fft(v, axis=1)
    b = np.arange(2 * n)[None, :]
    pref = np.exp(-1j * (np.pi / n) * (b + tp2) * a0)
    w = ((-1.0) ** np.arange(2 * n))[:, None] / (2.0 * n) * pref * t[:, b[0] % n]
    imax = np.abs(w.imag).max()
    if imax > 1e-9:
        raise RuntimeError(f"Wigner imaginary residue {imax}; inconsistent input")
    xc = -np.pi + (np.pi / n) * (np.arange(2 * n) + 2.0 * grid.x_offset)
    pc = -np.pi + (np.pi / n) * (np.arange(2 * n) + tp2)
    return PhaseSpaceDistribution(values=w.real, kind="wigner", x_centers=xc, p_centers=pc)


def wigner_to_density(dist: PhaseSpaceDistribution, grid) -> np.ndarray:
    """Exact linear inverse of wigner(); every element is covered twice, averaged."""
    n = grid.n_sites
    if dist.values.shape != (2 * n, 2 * n):
        raise ValueError("distribution shape does not match grid")
    tp2 = int(round(2.0 * grid.p_offset))
    a0, j1, j2 = _wigner_index_tables(n)
    b = np.arange(n)[None, :]
    pref = np.exp(-1j * (np.pi / n) * (b + tp2) * a0)
    signs = ((-1.0) ** np.arange(2 * n))[:, None]
    t = dist.values[:, :n] * 2.0 * n * signs / pref
    v = sfft.ifft(t, axis=1) * np.exp(1j * TWO_PI * tp2 * np.arange(n) / n)[None, :]
    rho = np.zeros((n, n), dtype=np.complex128)
    np.add.at(rho, (j1.ravel(), j2.ravel()), v.ravel())
    return rho / 2.0


def _packet_columns(grid, x_center: float, p_centers: np.ndarray, sigma: float) -> np.ndarray:
    """Unit-norm wrapped Gaussian packets, one column per momentum center."""
    x = grid.x_nodes()
    hbar = grid.hbar_eff
    g = np.zeros((grid.n_sites, len(p_centers)), dtype=np.complex128)
    for w in range(-3, 4):
        d = x + TWO_PI * w - x_center
        g += np.exp(-(d * d)[:, None] / (2.0 * sigma * sigma) + 1j * np.outer(d, p_centers) / hbar)
    g /= np.linalg.norm(g, axis=0, keepdims=True)
    return g


def husimi(rho: ReducedDensity, grid, resolution: int = 128, sigma: float | None = None) -> PhaseSpaceDistribution:
    """Coherent-state expectations <g|rho|g> on a cell-centered grid, sum 1."""
    if resolution < 16:
        raise ValueError("resolution must be >= 16")
    if sigma is None:
        sigma = float(np.sqrt(grid.hbar_eff))
    n = grid.n_sites
    if rho.dim != n:
        raise ValueError(f"density dim {rho.dim} does not match grid N={n}")
    centers = -np.pi + TWO_PI * (np.arange(resolution) + 0.5) / resolution
    h = np.empty((resolution, resolution), dtype=float)
    for i, xc in enumerate(centers):
        g = _packet_columns(grid, xc, centers, sigma)
        h[i, :] = np.einsum("jc,jc->c", g.conj(), rho.matrix @ g).real
    if h.min() < -1e-9:
        raise RuntimeError(f"Husimi produced negative weight {h.min()}")
    np.clip(h, 0.0, None, out=h)
    h /= h.sum()
    return PhaseSpaceDistribution(values=h, kind="husimi", x_centers=centers, p_centers=centers)


def _periodic_kernel(targets: np.ndarray, sources: np.ndarray, width_sq: float) -> np.ndarray:
    k = np.zeros((len(targets), len(sources)))
    for w in (-TWO_PI, 0.0, TWO_PI):
        d = targets[:, None] - sources[None, :] + w
        k += np.exp(-d * d / width_sq)
    return k


def kernel_smooth(
    dist: PhaseSpaceDistribution,
    x_centers: np.ndarray,
    p_centers: np.ndarray,
    sigma: float,
    hbar_eff: float,
) -> PhaseSpaceDistribution:
    """Coherent-state-width Gaussian smoothing onto a target grid, sum 1.

    Kernel exp[-dx^2/sigma^2 - sigma^2 dp^2/hbar^2], the overlap kernel that
    turns a Wigner function into the matching Husimi distribution.
    """
    kx = _periodic_kernel(np.asarray(x_centers), dist.x_centers, sigma * sigma)
    kp = _periodic_kernel(np.asarray(p_centers), dist.p_centers, (hbar_eff / sigma) ** 2)
    out = kx @ dist.values @ kp.T
    total = out.sum()
    if not total > 0:
        raise ValueError("smoothed distribution has no weight")
    out /= total
    kind = "classical" if dist.kind == "classical" else "husimi"
    return PhaseSpaceDistribution(values=out, kind=kind, x_centers=np.asarray(x_centers), p_centers=np.asarray(p_centers))


def correspondence_distance(q: PhaseSpaceDistribution, cl: PhaseSpaceDistribution) -> float:
    """Total-variation distance between a quantum and a classical distribution."""
    if q.kind == "wigner":
        raise ValueError("smooth the Wigner function first; TV against a signed grid is meaningless")
    if cl.kind != "classical":
        raise ValueError("reference must be a classical distribution")
    if q.values.shape != cl.values.shape:
        raise ValueError("grid mismatch between distributions")
    if not (np.allclose(q.x_centers, cl.x_centers) and np.allclose(q.p_centers, cl.p_centers)):
        raise ValueError("distributions live on different grids")
    return float(0.5 * np.abs(q.values / q.values.sum() - cl.values / cl.values.sum()).sum())
