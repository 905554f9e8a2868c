"""One- and two-particle quantum states on a discretized torus phase space.

Conventions
-----------
Phase space is x, p in [-pi, pi) per particle, discretized with N sites, so
the effective Planck constant is hbar = 2*pi/N. Grid nodes carry optional
offsets (in units of one grid step):

    x_j = -pi + 2*pi*(j + x_offset)/N        j = 0..N-1
    p_k = -pi + 2*pi*(k + p_offset)/N        k = 0..N-1

The default p_offset = 1/2 puts momenta on a half-integer ladder, which
avoids the exact p <-> -p parity degeneracy of the integer ladder.

The position <-> momentum change of basis is the offset discrete Fourier
kernel <p_k|x_j> = exp[-i p_k x_j / hbar] / sqrt(N), i.e.

    F[k, j] = exp[-i (2*pi/N) (k + p_offset - N/2) (j + x_offset - N/2)] / sqrt(N).

One driving period of the pair (kick first, then free flight, matching the
classical map in `rotorpair.classical`) acts as

    psi' = F12^dag  exp[-i (p1^2 + p2^2) T / (2 hbar)]  F12
           exp[-i (K1 cos x1 + K2 cos x2) / hbar]  exp[-i eps sin(x1 - x2 - c)]  psi

where F12 = F1 (x) F2. The interaction phase is deliberately hbar-free: the
coupling enters the Hamiltonian with an hbar prefactor that cancels the 1/hbar
of the propagator, so the kick map depends on eps and the relative angle only.

The fast path runs in O(N1 N2 log(N1 N2)) per step. The x_offset/p_offset
dependence of F reduces to diagonal phases around a plain FFT; the momentum
side phase commutes with the free propagator and cancels between F and F^dag,
which is what `_one_particle_phases` exploits. Dense oracles built directly
from the F kernel are provided for small sizes to test that reduction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.fft as sfft

TWO_PI = 2.0 * np.pi

NORM_TOL = 1e-9
ORACLE_MAX_ONE = 64
ORACLE_MAX_TWO = 1024
GAUSSIAN_WINDINGS = 3


class InvalidStateError(ValueError):
    """State construction produced something unnormalizable."""


class GridMismatchError(ValueError):
    """Operands live on different grids."""


class OracleSizeError(ValueError):
    """Dense oracle requested above its size guard."""


@dataclass(frozen=True)
class TorusGrid:
    """Discretization of one torus degree of freedom."""

    n_sites: int
    x_offset: float = 0.0
    p_offset: float = 0.5

    def __post_init__(self) -> None:
        if self.n_sites < 2 or self.n_sites % 2 != 0:
            raise ValueError(f"n_sites must be even and >= 2, got {self.n_sites}")
        if not (0.0 <= self.x_offset < 1.0 and 0.0 <= self.p_offset < 1.0):
            raise ValueError("grid offsets must lie in [0, 1)")

    @property
    def hbar_eff(self) -> float:
        return TWO_PI / self.n_sites

    def x_nodes(self) -> np.ndarray:
        n = self.n_sites
        return -np.pi + TWO_PI * (np.arange(n) + self.x_offset) / n

    def p_nodes(self) -> np.ndarray:
        n = self.n_sites
        return -np.pi + TWO_PI * (np.arange(n) + self.p_offset) / n


@dataclass(frozen=True)
class RotorParams:
    """Kicked-rotor parameters: V(x) = K cos x applied once per period T."""

    kick_strength: float
    period: float = 1.0

    def __post_init__(self) -> None:
        if self.kick_strength < 0:
            raise ValueError("kick_strength must be >= 0")
        if self.period <= 0:
            raise ValueError("period must be > 0")


@dataclass(frozen=True)
class CouplingParams:
    """Per-kick interaction phase exp[-i strength sin(x1 - x2 - phase_offset)]."""

    strength: float
    phase_offset: float = 0.33

    def __post_init__(self) -> None:
        if self.strength < 0:
            raise ValueError("strength must be >= 0")


@dataclass(frozen=True)
class GaussianSpec:
    """Minimal-uncertainty wavepacket: center and position width sigma.

    Position variance is sigma^2/2 and momentum variance hbar^2/(2 sigma^2);
    sigma = sqrt(hbar_eff) gives equal spreads sqrt(hbar_eff/2) in both.
    """

    center_x: float
    center_p: float
    sigma: float

    def __post_init__(self) -> None:
        if self.sigma <= 0:
            raise ValueError("sigma must be > 0")
        if not (-np.pi <= self.center_x < np.pi and -np.pi <= self.center_p < np.pi):
            raise ValueError("center must lie in [-pi, pi)^2")


@dataclass
class OneParticleState:
    grid: TorusGrid
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (self.grid.n_sites,):
            raise InvalidStateError(
                f"amplitude shape {amps.shape} does not match grid N={self.grid.n_sites}"
            )
        nrm = np.linalg.norm(amps)
        if abs(nrm - 1.0) > NORM_TOL:
            raise InvalidStateError(f"state norm {nrm!r} is not 1")
        self.amplitudes = amps

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass
class TwoParticleState:
    grid1: TorusGrid
    grid2: TorusGrid
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (self.grid1.n_sites, self.grid2.n_sites):
            raise InvalidStateError(
                f"amplitude shape {amps.shape} does not match grids "
                f"({self.grid1.n_sites}, {self.grid2.n_sites})"
            )
        nrm = np.linalg.norm(amps)
        if abs(nrm - 1.0) > NORM_TOL:
            raise InvalidStateError(f"state norm {nrm!r} is not 1")
        self.amplitudes = amps

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def product_state(s1: OneParticleState, s2: OneParticleState) -> TwoParticleState:
    return TwoParticleState(s1.grid, s2.grid, np.outer(s1.amplitudes, s2.amplitudes))


def make_gaussian(grid: TorusGrid, spec: GaussianSpec) -> OneParticleState:
    """Wrapped Gaussian wavepacket, images summed over +-3 torus periods."""
    x = grid.x_nodes()
    hbar = grid.hbar_eff
    windings = TWO_PI * np.arange(-GAUSSIAN_WINDINGS, GAUSSIAN_WINDINGS + 1)
    d = x[:, None] + windings[None, :] - spec.center_x
    amps = np.exp(1j * spec.center_p * d / hbar - d * d / (2.0 * spec.sigma**2)).sum(axis=1)
    nrm = np.linalg.norm(amps)
    if not nrm > 1e-150:
        raise InvalidStateError(
            f"Gaussian with sigma={spec.sigma} underflows on an N={grid.n_sites} grid"
        )
    return OneParticleState(grid, amps / nrm)


def _raw_fourier_kernel(grid: TorusGrid) -> np.ndarray:
    """Dense <p_k|x_j> matrix, used only by the oracles (independent of the fast path)."""
    n = grid.n_sites
    k = np.arange(n) + grid.p_offset - n / 2.0
    j = np.arange(n) + grid.x_offset - n / 2.0
    return np.exp(-1j * (TWO_PI / n) * np.outer(k, j)) / np.sqrt(n)


def _kick_phase(grid: TorusGrid, rotor: RotorParams) -> np.ndarray:
    return np.exp(-1j * rotor.kick_strength * np.cos(grid.x_nodes()) / grid.hbar_eff)


def _free_phase(grid: TorusGrid, rotor: RotorParams) -> np.ndarray:
    p = grid.p_nodes()
    return np.exp(-1j * p * p * rotor.period / (2.0 * grid.hbar_eff))


@lru_cache(maxsize=64)
def _one_particle_phases(grid: TorusGrid, rotor: RotorParams):
    # The offset DFT factorizes as F = D1 . FFT . lam with D1 diagonal in k
    # and lam diagonal in j; D1 commutes with the free phase and drops out of
    # F^dag D_free F, so only lam survives in the split step.
    n = grid.n_sites
    lam = np.exp(-1j * (TWO_PI / n) * (grid.p_offset - n / 2.0) * np.arange(n))
    pre = lam * _kick_phase(grid, rotor)
    mid = _free_phase(grid, rotor)
    post = lam.conj()
    return pre, mid, post


def floquet_step_one(state: OneParticleState, params: RotorParams) -> OneParticleState:
    """One kick period: kick phase, then free flight, via offset FFTs."""
    pre, mid, post = _one_particle_phases(state.grid, params)
    out = post * sfft.ifft(mid * sfft.fft(pre * state.amplitudes, norm="ortho"), norm="ortho")
    return OneParticleState(state.grid, out)


class TwoParticleStepPlan:
    """Precomputed phase arrays for the coupled two-particle kick period.

    apply() accepts any array of shape (..., N1, N2) so that batches of
    states can be evolved in one FFT call; results are identical to the
    per-state path to machine precision.
    """

    def __init__(
        self,
        grid1: TorusGrid,
        grid2: TorusGrid,
        rotor1: RotorParams,
        rotor2: RotorParams,
        coupling: CouplingParams,
    ):
        self.grid1, self.grid2 = grid1, grid2
        pre1, mid1, post1 = _one_particle_phases(grid1, rotor1)
        pre2, mid2, post2 = _one_particle_phases(grid2, rotor2)
        x1 = grid1.x_nodes()[:, None]
        x2 = grid2.x_nodes()[None, :]
        couple = np.exp(-1j * coupling.strength * np.sin(x1 - x2 - coupling.phase_offset))
        self.pre = np.outer(pre1, pre2) * couple
        self.mid = np.outer(mid1, mid2)
        self.post = np.outer(post1, post2)

    def apply(self, amps: np.ndarray) -> np.ndarray:
        a = sfft.fft2(self.pre * amps, axes=(-2, -1), norm="ortho")
        a = sfft.ifft2(self.mid * a, axes=(-2, -1), norm="ortho")
        return self.post * a

    def apply_inverse(self, amps: np.ndarray) -> np.ndarray:
        a = sfft.fft2(self.post.conj() * amps, axes=(-2, -1), norm="ortho")
        a = sfft.ifft2(self.mid.conj() * a, axes=(-2, -1), norm="ortho")
        return self.pre.conj() * a


@lru_cache(maxsize=16)
def _two_particle_plan_cached(grid1, grid2, rotor1, rotor2, coupling) -> TwoParticleStepPlan:
    return TwoParticleStepPlan(grid1, grid2, rotor1, rotor2, coupling)


def two_particle_plan(
    grid1: TorusGrid,
    grid2: TorusGrid,
    rotor1: RotorParams,
    rotor2: RotorParams,
    coupling: CouplingParams,
) -> TwoParticleStepPlan:
    return _two_particle_plan_cached(grid1, grid2, rotor1, rotor2, coupling)


def floquet_step_two(
    state: TwoParticleState,
    params1: RotorParams,
    params2: RotorParams,
    coupling: CouplingParams,
) -> TwoParticleState:
    plan = two_particle_plan(state.grid1, state.grid2, params1, params2, coupling)
    return TwoParticleState(state.grid1, state.grid2, plan.apply(state.amplitudes))


def inverse_floquet_step_two(
    state: TwoParticleState,
    params1: RotorParams,
    params2: RotorParams,
    coupling: CouplingParams,
) -> TwoParticleState:
    plan = two_particle_plan(state.grid1, state.grid2, params1, params2, coupling)
    return TwoParticleState(state.grid1, state.grid2, plan.apply_inverse(state.amplitudes))


def dense_floquet_oracle_one(grid: TorusGrid, rotor: RotorParams) -> np.ndarray:
    """Explicit N x N one-period unitary for small N, built from the raw kernel."""
    if grid.n_sites > ORACLE_MAX_ONE:
        raise OracleSizeError(
            f"one-particle oracle limited to N <= {ORACLE_MAX_ONE}, got {grid.n_sites}"
        )
    f = _raw_fourier_kernel(grid)
    u_free = f.conj().T @ (_free_phase(grid, rotor)[:, None] * f)
    return u_free * _kick_phase(grid, rotor)[None, :]


def dense_floquet_oracle_two(
    grid1: TorusGrid,
    grid2: TorusGrid,
    rotor1: RotorParams,
    rotor2: RotorParams,
    coupling: CouplingParams,
) -> np.ndarray:
    """Explicit (N1 N2) x (N1 N2) coupled-pair unitary for small sizes."""
    n1, n2 = grid1.n_sites, grid2.n_sites
    if n1 * n2 > ORACLE_MAX_TWO:
        raise OracleSizeError(
            f"two-particle oracle limited to N1*N2 <= {ORACLE_MAX_TWO}, got {n1 * n2}"
        )
    f12 = np.kron(_raw_fourier_kernel(grid1), _raw_fourier_kernel(grid2))
    free = np.kron(_free_phase(grid1, rotor1), _free_phase(grid2, rotor2))
    kick = np.kron(_kick_phase(grid1, rotor1), _kick_phase(grid2, rotor2))
    x1 = grid1.x_nodes()[:, None]
    x2 = grid2.x_nodes()[None, :]
    couple = np.exp(-1j * coupling.strength * np.sin(x1 - x2 - coupling.phase_offset)).ravel()
    u_free = f12.conj().T @ (free[:, None] * f12)
    return u_free * (kick * couple)[None, :]


def momentum_amplitudes(state: OneParticleState) -> np.ndarray:
    """<p_k|psi> for all k, via the same offset-FFT reduction as the step."""
    grid = state.grid
    n = grid.n_sites
    lam = np.exp(-1j * (TWO_PI / n) * (grid.p_offset - n / 2.0) * np.arange(n))
    d1 = np.exp(-1j * (TWO_PI / n) * (grid.x_offset - n / 2.0) * (np.arange(n) + grid.p_offset - n / 2.0))
    # global phase split off lam differs from d1 by the constant term; fold exactly:
    # F = d1 . FFT . lam with d1_k = exp[-i (2pi/N)(k + p_offset - N/2)(x_offset - N/2)]
    return d1 * sfft.fft(lam * state.amplitudes, norm="ortho")


def _circular_mean(weights: np.ndarray, angles: np.ndarray) -> float:
    z = np.sum(weights * np.exp(1j * angles))
    return float(np.angle(z))


def expectation_x(state: OneParticleState) -> float:
    """Circular mean of the position distribution (exact for wrapped Gaussians)."""
    w = np.abs(state.amplitudes) ** 2
    return _circular_mean(w, state.grid.x_nodes())


def expectation_p(state: OneParticleState) -> float:
    w = np.abs(momentum_amplitudes(state)) ** 2
    return _circular_mean(w, state.grid.p_nodes())


def variance_x(state: OneParticleState) -> float:
    """Second central moment around the circular mean, wrapped differences."""
    w = np.abs(state.amplitudes) ** 2
    d = state.grid.x_nodes() - expectation_x(state)
    d = (d + np.pi) % TWO_PI - np.pi
    return float(np.sum(w * d * d))


def variance_p(state: OneParticleState) -> float:
    w = np.abs(momentum_amplitudes(state)) ** 2
    d = state.grid.p_nodes() - expectation_p(state)
    d = (d + np.pi) % TWO_PI - np.pi
    return float(np.sum(w * d * d))
